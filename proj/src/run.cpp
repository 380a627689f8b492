#include "proxpen/run.hpp"

#include "proxpen/kernels.hpp"
#include "proxpen/penalty.hpp"
#include "proxpen/pg.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <ostream>

namespace proxpen {

namespace {

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

Vector from_json_array(const nlohmann::json& j)
{
    const auto values = j.get<std::vector<double>>();
    return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

double median(std::vector<double> v)
{
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t k = v.size() / 2;
    return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

std::string acg_mode_name(AcgMode mode) { return mode == AcgMode::AtLeast ? "at-least" : "practical"; }

} // namespace

Method parse_method(const std::string& name)
{
    if (name == "aipp") return Method::Aipp;
    if (name == "pg") return Method::Pg;
    if (name == "qp-aipp") return Method::QpAipp;
    throw InvalidInput("unknown method '" + name + "' (expected aipp, pg or qp-aipp)");
}

std::string method_name(Method method)
{
    switch (method) {
    case Method::Aipp: return "aipp";
    case Method::Pg: return "pg";
    case Method::QpAipp: return "qp-aipp";
    }
    return "?";
}

std::string status_name(RunStatus status)
{
    switch (status) {
    case RunStatus::Success: return "SUCCESS";
    case RunStatus::ToleranceNotReached: return "TOLERANCE_NOT_REACHED";
    case RunStatus::InvalidInput: return "INVALID_INPUT";
    case RunStatus::NumericalFailure: return "NUMERICAL_FAILURE";
    }
    return "?";
}

int exit_code(RunStatus status)
{
    switch (status) {
    case RunStatus::Success: return 0;
    case RunStatus::ToleranceNotReached: return 2;
    case RunStatus::InvalidInput: return 3;
    case RunStatus::NumericalFailure: return 4;
    }
    return 4;
}

nlohmann::json RunRecord::to_json(bool include_wall_time) const
{
    nlohmann::json j = {
        {"schema", kSchema},
        {"method", method_name(method)},
        {"instance", {{"id", instance_id}, {"seed", seed}, {"l", l}, {"n", n}, {"M", curvature.upper},
                      {"m", curvature.lower}}},
        {"config", config},
        {"iterations", {{"inner", inner_iterations}, {"outer", outer_iterations}, {"projections", projections}}},
        {"objective", objective},
        {"criterion", criterion},
        {"tolerance", tolerance},
        {"status", status_name(status)},
    };
    if (l_eq > 0) j["instance"]["l_eq"] = l_eq;
    if (!message.empty()) j["message"] = message;
    if (method == Method::QpAipp) {
        j["c_schedule"] = c_schedule;
        j["loop_inner_iterations"] = loop_inner_iterations;
        j["v_norm"] = v_norm;
        j["feasibility"] = feasibility;
    }
    if (include_wall_time) j["wall_time_s"] = wall_time;
    return j;
}

nlohmann::json SolutionFile::to_json() const
{
    nlohmann::json j = {
        {"schema", kSchema},     {"method", method_name(method)}, {"instance_id", instance_id},
        {"z", to_std(z)},        {"v", to_std(v)},                {"rho", rho},
        {"rho_hat", rho_hat},    {"eta_hat", eta_hat},
    };
    if (method == Method::QpAipp) {
        j["p"] = to_std(p);
        j["c"] = c;
    }
    return j;
}

SolutionFile SolutionFile::from_json(const nlohmann::json& j)
{
    try {
        if (j.at("schema").get<std::string>() != kSchema) throw InvalidInput("solution file: unsupported schema");
        SolutionFile s;
        s.method = parse_method(j.at("method").get<std::string>());
        s.instance_id = j.value("instance_id", "");
        s.z = from_json_array(j.at("z"));
        s.v = from_json_array(j.at("v"));
        s.rho = j.value("rho", 0.0);
        s.rho_hat = j.value("rho_hat", 0.0);
        s.eta_hat = j.value("eta_hat", 0.0);
        if (s.method == Method::QpAipp) {
            s.p = from_json_array(j.at("p"));
            s.c = j.at("c").get<double>();
        }
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("solution file: ") + e.what());
    }
}

SolveOutcome solve_instance(const InstanceData& inst, const SolveOptions& options)
{
    const SimplexQpInstance& obj = objective_of(inst);
    SolveOutcome out;
    RunRecord& rec = out.record;
    rec.method = options.method;
    rec.instance_id = instance_id(inst);
    rec.seed = obj.seed;
    rec.l = obj.l();
    rec.n = obj.n();
    rec.curvature = obj.declared;
    if (const auto* lc = std::get_if<LinConstrQpInstance>(&inst)) rec.l_eq = lc->a_eq.rows();

    const auto start = std::chrono::steady_clock::now();
    try {
        const Vector z0 = obj.centroid();
        SolutionFile sol;
        sol.method = options.method;
        sol.instance_id = rec.instance_id;

        if (options.method == Method::QpAipp) {
            const auto* lc = std::get_if<LinConstrQpInstance>(&inst);
            if (!lc) throw InvalidInput("qp-aipp needs an instance with equality constraints (gen --l-eq)");
            const ConstrainedProblem cp = lc->problem();
            PenaltyConfig pc;
            pc.rho_hat = options.rho_hat;
            pc.eta_hat = options.eta_hat;
            pc.sigma = options.sigma;
            pc.acg_mode = options.acg_mode;
            pc.max_outer = options.max_iterations;
            rec.config = {{"sigma", pc.sigma},          {"lambda", 1.0 / (2.0 * obj.declared.lower)},
                          {"rho_hat", pc.rho_hat},      {"eta_hat", pc.eta_hat},
                          {"c_hat", pc.c_hat},          {"acg_mode", acg_mode_name(pc.acg_mode)},
                          {"z0", "centroid"},           {"a_norm_sq", cp.a_norm_sq}};
            rec.tolerance = pc.rho_hat;
            const QpAippResult res = qp_aipp(cp, z0, pc);
            for (const auto& loop : res.stats.loops) {
                rec.c_schedule.push_back(loop.c);
                rec.loop_inner_iterations.push_back(loop.inner);
                rec.outer_iterations += loop.outer;
                rec.projections += loop.inner + 1;
            }
            rec.inner_iterations = res.stats.total_inner();
            rec.objective = cp.f->value(res.triple.z);
            rec.v_norm = res.triple.v.norm();
            rec.feasibility = cp.constraint_residual(res.triple.z).norm();
            rec.criterion = rec.v_norm;
            sol.z = res.triple.z;
            sol.v = res.triple.v;
            sol.p = res.triple.p;
            sol.c = res.stats.final_c;
            sol.rho_hat = pc.rho_hat;
            sol.eta_hat = pc.eta_hat;
        } else {
            const CompositeProblem problem = obj.problem();
            const double scale = problem.smooth->gradient(z0).norm() + 1.0;
            const double tol = options.rho * scale;
            rec.tolerance = options.rho;
            sol.rho = options.rho;
            if (options.method == Method::Aipp) {
                AippConfig ac;
                ac.lambda = options.aipp_lambda_factor / obj.declared.lower;
                ac.sigma = options.sigma;
                ac.stop = AippStop::RefinedStationarity;
                ac.stationarity_tolerance = tol;
                ac.acg_mode = options.acg_mode;
                ac.max_outer = options.max_iterations;
                ac.trace = options.trace;
                rec.config = {{"sigma", ac.sigma}, {"lambda", ac.lambda}, {"rho", options.rho},
                              {"acg_mode", acg_mode_name(ac.acg_mode)}, {"z0", "centroid"}};
                const AippResult res = aipp(problem, z0, ac);
                rec.inner_iterations = res.stats.inner;
                rec.outer_iterations = res.stats.outer;
                rec.projections = res.stats.projections();
                sol.z = res.refined.z_g;
                sol.v = res.refined.v_g;
            } else {
                CgConfig cg;
                cg.lambda = options.pg_lambda_factor / obj.declared.upper;
                cg.tolerance = tol;
                cg.max_iterations = options.max_iterations;
                cg.trace = options.trace;
                rec.config = {{"lambda", cg.lambda}, {"rho", options.rho}, {"z0", "centroid"}};
                const PgResult res = run_pg(problem, z0, cg);
                rec.inner_iterations = res.iterations;
                rec.outer_iterations = res.iterations;
                rec.projections = res.iterations;
                sol.z = res.z;
                sol.v = res.v;
            }
            rec.objective = problem.value(sol.z);
            rec.criterion = sol.v.norm() / scale;
        }
        rec.status = RunStatus::Success;
        out.solution = std::move(sol);
    } catch (const InvalidInput& e) {
        rec.status = RunStatus::InvalidInput;
        rec.message = e.what();
    } catch (const IterationLimit& e) {
        rec.status = RunStatus::ToleranceNotReached;
        rec.message = e.what();
    } catch (const Error& e) {
        rec.status = RunStatus::NumericalFailure;
        rec.message = e.what();
    }
    rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

bool CheckReport::pass() const
{
    return !items.empty() && std::all_of(items.begin(), items.end(), [](const CheckItem& i) { return i.pass; });
}

nlohmann::json CheckReport::to_json() const
{
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& i : items) {
        arr.push_back({{"condition", i.name}, {"result", i.pass ? "PASS" : "FAIL"}, {"value", i.value},
                       {"threshold", i.threshold}});
    }
    return {{"result", pass() ? "PASS" : "FAIL"}, {"conditions", arr}};
}

double simplex_normal_cone_gap(const Vector& z, const Vector& s) { return s.maxCoeff() - s.dot(z); }

CheckReport check_solution(const SolutionFile& sol, const InstanceData& inst)
{
    const SimplexQpInstance& obj = objective_of(inst);
    const Index n = obj.n();
    if (sol.z.size() != n || sol.v.size() != n) throw InvalidInput("check: solution dimension does not match instance");

    CheckReport report;
    const bool feasible_domain = in_simplex(sol.z);
    {
        const double dev = std::max(std::abs(sol.z.sum() - 1.0), std::max(0.0, -sol.z.minCoeff()));
        report.items.push_back({"domain", feasible_domain, dev, 1e-9});
    }

    const auto f = obj.objective();
    Vector s = sol.v - f->gradient(sol.z);
    if (sol.method == Method::QpAipp) {
        const auto* lc = std::get_if<LinConstrQpInstance>(&inst);
        if (!lc) throw InvalidInput("check: qp-aipp solution needs a constrained instance");
        if (sol.p.size() != lc->a_eq.rows()) throw InvalidInput("check: multiplier dimension mismatch");
        Vector atp;
        kernels::gemv_t(lc->a_eq, sol.p, atp);
        s -= atp;
    }
    // v - grad(...) must lie in the normal cone of the simplex at z.
    const double gap = simplex_normal_cone_gap(sol.z, s);
    const double gap_tol = 1e-9 * (1.0 + s.lpNorm<Eigen::Infinity>());
    report.items.push_back({"inclusion", feasible_domain && gap <= gap_tol, gap, gap_tol});

    if (sol.method == Method::QpAipp) {
        const auto& lc = std::get<LinConstrQpInstance>(inst);
        Vector r;
        kernels::gemv(lc.a_eq, sol.z, r);
        r -= lc.b_eq;
        report.items.push_back({"stationarity", sol.v.norm() <= sol.rho_hat, sol.v.norm(), sol.rho_hat});
        report.items.push_back({"feasibility", r.norm() <= sol.eta_hat, r.norm(), sol.eta_hat});
        const double pdev = (sol.p - sol.c * r).norm();
        const double ptol = 1e-9 * (1.0 + sol.p.norm());
        report.items.push_back({"multiplier", pdev <= ptol, pdev, ptol});
    } else {
        const double scale = f->gradient(obj.centroid()).norm() + 1.0;
        const double crit = sol.v.norm() / scale;
        report.items.push_back({"criterion", crit <= sol.rho, crit, sol.rho});
    }
    return report;
}

int bench_threads(int requested)
{
    if (requested > 0) return requested;
    if (const char* env = std::getenv("PROXPEN_THREADS")) {
        const int t = std::atoi(env);
        if (t > 0) return t;
    }
    return kernels::max_threads();
}

std::vector<BenchRow> run_bench(const BenchOptions& options)
{
    require(!options.grid.empty(), "bench: empty grid");
    require(!options.methods.empty(), "bench: no methods");
    require(!options.seeds.empty(), "bench: no seeds");
    for (Method m : options.methods) require(m != Method::QpAipp, "bench: only aipp and pg are benchmarked");

    const std::size_t rows = options.grid.size();
    const std::size_t seeds = options.seeds.size();
    const std::size_t methods = options.methods.size();
    std::vector<BenchRow> table(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        table[r].upper = options.grid[r].first;
        table[r].lower = options.grid[r].second;
        table[r].records.assign(methods, std::vector<RunRecord>(seeds));
    }

    const long long tasks = static_cast<long long>(rows * seeds);
    const int threads = bench_threads(options.threads);
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (long long t = 0; t < tasks; ++t) {
        const std::size_t r = static_cast<std::size_t>(t) / seeds;
        const std::size_t s = static_cast<std::size_t>(t) % seeds;
        const auto [upper, lower] = options.grid[r];
        InstanceData inst;
        try {
            inst = gen_simplex_qp(options.l, options.n, upper, lower, options.seeds[s]);
        } catch (const Error& e) {
            for (std::size_t k = 0; k < methods; ++k) {
                RunRecord& rec = table[r].records[k][s];
                rec.method = options.methods[k];
                rec.status = dynamic_cast<const InvalidInput*>(&e) ? RunStatus::InvalidInput
                                                                   : RunStatus::NumericalFailure;
                rec.message = e.what();
            }
            continue;
        }
        for (std::size_t k = 0; k < methods; ++k) {
            SolveOptions so;
            so.method = options.methods[k];
            so.rho = options.rho;
            so.sigma = options.sigma;
            so.aipp_lambda_factor = options.aipp_lambda_factor;
            so.pg_lambda_factor = options.pg_lambda_factor;
            so.max_iterations = options.max_iterations;
            table[r].records[k][s] = solve_instance(inst, so).record;
        }
    }

    for (BenchRow& row : table) {
        std::vector<double> objectives;
        row.median_iterations.assign(methods, std::numeric_limits<double>::quiet_NaN());
        for (std::size_t k = 0; k < methods; ++k) {
            std::vector<double> iters;
            bool all_ok = true;
            for (const RunRecord& rec : row.records[k]) {
                all_ok = all_ok && rec.status == RunStatus::Success;
                iters.push_back(static_cast<double>(rec.inner_iterations));
                if (rec.status == RunStatus::Success) objectives.push_back(rec.objective);
            }
            if (all_ok) row.median_iterations[k] = median(iters);
        }
        row.g_bar = median(objectives);
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < methods; ++k) {
            if (row.median_iterations[k] < best) {
                best = row.median_iterations[k];
                row.winner = method_name(options.methods[k]);
            }
        }
    }
    return table;
}

void write_bench_csv(std::ostream& out, const BenchOptions& options, const std::vector<BenchRow>& rows)
{
    out << "M,m,g_bar";
    for (Method m : options.methods) out << ',' << method_name(m) << "_iterations";
    out << ",winner\n";
    const auto old_precision = out.precision(10);
    for (const BenchRow& row : rows) {
        out << row.upper << ',' << row.lower << ',' << row.g_bar;
        for (double it : row.median_iterations) {
            out << ',';
            if (std::isnan(it)) out << "NA";
            else out << it;
        }
        out << ',' << row.winner << '\n';
    }
    out.precision(old_precision);
}

} // namespace proxpen
