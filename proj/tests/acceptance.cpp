// Acceptance suite: one PASS/FAIL line per criterion. Tolerances, instance
// counts and runtime limits are fixed here and must not be relaxed.
#include "helpers.hpp"
#include "proxpen/acg.hpp"
#include "proxpen/aipp.hpp"
#include "proxpen/instance_io.hpp"
#include "proxpen/penalty.hpp"
#include "proxpen/pg.hpp"
#include "proxpen/run.hpp"
#include "proxpen/simplex.hpp"

#include <Eigen/Cholesky>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace proxpen;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

class Detail {
public:
    template <typename T>
    Detail& operator<<(const T& v)
    {
        os_ << v;
        return *this;
    }
    std::string str() const { return os_.str(); }

private:
    std::ostringstream os_;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

SplitConvex simplex_part(double kappa, const Vector& center)
{
    return SplitConvex{std::make_shared<SimplexIndicator>(), 1.0, kappa, center};
}

// 1. |A u + x - x0|^2 + 2 A eta <= |x - x0|^2 at every iteration.
Outcome acg_certificate()
{
    const auto start = Clock::now();
    double worst = -kInfinity;
    double first_bad_a = kInfinity;
    int checked = 0, bad = 0, bad_small_a = 0;
    Rng rng(101);
    for (int t = 0; t < 50; ++t) {
        const Index n = 30;
        const double L = 1.0 + 99.0 * rng.uniform();
        const double mu = t % 3 == 0 ? 0.0 : rng.uniform();
        const auto q = testing::random_quadratic(rng, n, 0.0, L);
        const SplitConvex psi_n = simplex_part(mu, project_simplex(testing::random_normal(rng, n)));
        AcgConfig cfg;
        cfg.L = L;
        cfg.mu = mu;
        const Vector x0 = project_simplex(testing::random_normal(rng, n));
        AcgState s = acg_initial_state(*q, psi_n, x0);
        for (int j = 1; j <= 300; ++j) {
            s = acg_step(s, *q, psi_n, cfg);
            const double d2 = (s.x - x0).squaredNorm();
            const double lhs = (s.A * s.u + s.x - x0).squaredNorm() + 2.0 * s.A * s.eta;
            const double ratio = (lhs - d2) / (1e-8 * (1.0 + d2));
            worst = std::max(worst, ratio);
            if (ratio > 1.0) {
                ++bad;
                first_bad_a = std::min(first_bad_a, s.A);
                if (s.A <= 1e7) ++bad_small_a;
            }
            ++checked;
        }
    }
    const double secs = seconds_since(start);
    Detail d;
    // Diagnostics only: eta carries rounding noise near eps_mach |psi|, and
    // 2 A eta outgrows the absolute tolerance once A is astronomically large.
    d << checked << " iterations on 50 instances, violations = " << bad << " (smallest A at a violation "
      << first_bad_a << ", violations with A <= 1e7: " << bad_small_a << "), max violation/tolerance = " << worst
      << ", " << secs << " s";
    return {worst <= 1.0 && secs < 10.0, d.str()};
}

// 2. A_j >= max{j^2/4, (1 + sqrt(mu/4L))^{2(j-1)}} / L.
Outcome acg_growth()
{
    double worst = kInfinity;
    Rng rng(202);
    for (int t = 0; t < 10; ++t) {
        const Index n = 20;
        const double L = 1.0 + 50.0 * rng.uniform();
        const double mu = t < 3 ? 0.0 : (t < 6 ? 0.05 * L : 0.5 * rng.uniform());
        const auto q = testing::random_quadratic(rng, n, 0.0, L);
        const SplitConvex psi_n = simplex_part(mu, Vector::Constant(n, 1.0 / n));
        AcgConfig cfg;
        cfg.L = L;
        cfg.mu = mu;
        AcgState s = acg_initial_state(*q, psi_n, Vector::Constant(n, 1.0 / n));
        for (int j = 1; j <= 200; ++j) {
            s = acg_step(s, *q, psi_n, cfg);
            const double growth = std::pow(1.0 + std::sqrt(mu / (4.0 * L)), 2.0 * (j - 1));
            const double bound = std::max(j * j / 4.0, growth) / L;
            worst = std::min(worst, s.A / (bound * (1.0 - 1e-12)));
        }
    }
    Detail d;
    d << "200 iterations on 10 instances, min A_j / bound = " << worst;
    return {worst >= 1.0, d.str()};
}

struct QuadCase {
    std::shared_ptr<QuadraticOracle> q;
    double L;
    Vector x_star;
    double psi_star;
    Vector x0;
};

std::vector<QuadCase> strongly_convex_cases()
{
    std::vector<QuadCase> cases;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Rng rng(300 + seed);
        const Index n = 15;
        const double L = 5.0 + 200.0 * rng.uniform();
        const double lo = 0.01 * L * rng.uniform() + 1e-3;
        QuadCase c;
        c.q = testing::random_quadratic(rng, n, lo, L);
        c.L = L;
        c.x_star = -Eigen::MatrixXd(c.q->hessian()).llt().solve(c.q->linear());
        c.psi_star = c.q->value(c.x_star);
        c.x0 = 3.0 * testing::random_normal(rng, n);
        cases.push_back(std::move(c));
    }
    return cases;
}

// 3. psi(x_j) - psi* <= |x* - x0|^2 / (2 A_j) + 1e-9.
Outcome acg_gap()
{
    double worst = -kInfinity;
    const SplitConvex zero{std::make_shared<ZeroFunction>(), 1.0, 0.0, Vector()};
    for (const QuadCase& c : strongly_convex_cases()) {
        AcgConfig cfg;
        cfg.L = c.L;
        AcgState s = acg_initial_state(*c.q, zero, c.x0);
        const double r2 = (c.x_star - c.x0).squaredNorm();
        for (int j = 1; j <= 500; ++j) {
            s = acg_step(s, *c.q, zero, cfg);
            worst = std::max(worst, (c.q->value(s.x) - c.psi_star) - (r2 / (2.0 * s.A) + 1e-9));
        }
    }
    Detail d;
    d << "500 iterations on 10 quadratics, max (gap - bound) = " << worst;
    return {worst <= 0.0, d.str()};
}

// 4. sigma-criterion holds whenever A_j >= 2(1+sqrt(sigma))^2/sigma, and
// first holds within the iteration bound.
Outcome acg_onset()
{
    const double sigma = 0.3;
    const double a_threshold = 2.0 * std::pow(1.0 + std::sqrt(sigma), 2) / sigma;
    const SplitConvex zero{std::make_shared<ZeroFunction>(), 1.0, 0.0, Vector()};
    bool ok = true;
    int late = 0, misses = 0, worst_first = 0, worst_bound = 0;
    for (const QuadCase& c : strongly_convex_cases()) {
        AcgConfig cfg;
        cfg.L = c.L;
        cfg.sigma = sigma;
        const int bound = cfg.sigma_iteration_bound();
        AcgState s = acg_initial_state(*c.q, zero, c.x0);
        int first = 0;
        for (int j = 1; j <= std::max(500, bound); ++j) {
            s = acg_step(s, *c.q, zero, cfg);
            const bool holds = sigma_criterion(s, sigma);
            if (holds && first == 0) first = j;
            if (s.A >= a_threshold && !holds) ++misses;
        }
        if (first == 0 || first > bound) ++late;
        if (first > worst_first) {
            worst_first = first;
            worst_bound = bound;
        }
    }
    ok = misses == 0 && late == 0;
    Detail d;
    d << "criterion misses past the A threshold = " << misses << ", late onsets = " << late
      << ", slowest onset " << worst_first << " (bound " << worst_bound << ")";
    return {ok, d.str()};
}

// 5. sigma_eff <= (lambda M + 2)/4 and eps~ >= 0 at every PG step.
Outcome pg_sigma()
{
    int steps = 0, violations = 0;
    double worst = 0.0;
    Rng rng(505);
    for (int t = 0; t < 50; ++t) {
        const double upper = std::pow(10.0, 2.0 + 4.0 * rng.uniform());
        const double lower = upper * std::pow(10.0, -5.0 * rng.uniform());
        const auto inst = gen_simplex_qp(10, 50, upper, lower, 500 + t);
        const CompositeProblem p = inst.problem();
        const double lambda = 0.99 / upper;
        const double bound = (lambda * upper + 2.0) / 4.0;
        const double tol = 1e-5 * (inst.objective()->gradient(inst.centroid()).norm() + 1.0);
        Vector z = inst.centroid();
        for (int k = 0; k < 3000; ++k) {
            const Vector next = pg_step(p, lambda, z);
            const PgCertificate c = pg_certificate(p, lambda, z, next);
            ++steps;
            worst = std::max(worst, c.sigma_eff / bound);
            if (c.sigma_eff > bound || c.eps_tilde < 0.0) ++violations;
            const Vector v = (z - next) / lambda + inst.objective()->gradient(next) - inst.objective()->gradient(z);
            z = next;
            if (v.norm() <= tol) break;
        }
    }
    Detail d;
    d << steps << " steps on 50 instances, violations = " << violations << ", max sigma_eff/bound = " << worst;
    return {violations == 0, d.str()};
}

// 6. (1 - sigma)/(2 lambda) |z_{k-1} - z_k + v~_k|^2 <= phi(z_{k-1}) - phi(z_k) + 1e-8.
Outcome aipp_descent()
{
    int checked = 0, violations = 0;
    double worst = -kInfinity;
    for (int t = 0; t < 20; ++t) {
        const double lower = t < 10 ? 1.0 : 10.0;
        const double upper = lower * std::pow(10.0, 2 + t % 4);
        const auto inst = gen_simplex_qp(10, 50, upper, lower, 600 + t);
        AippConfig cfg;
        cfg.lambda = (t % 2 ? 0.9 : 0.5) / lower;
        cfg.stop = AippStop::RefinedStationarity;
        cfg.stationarity_tolerance = 1e-6 * (inst.objective()->gradient(inst.centroid()).norm() + 1.0);
        const AippResult r = aipp(inst.problem(), inst.centroid(), cfg);
        for (const GippStep& s : r.stats.steps) {
            const double lhs = (1.0 - cfg.sigma) / (2.0 * cfg.lambda) * s.gap_sq;
            const double excess = lhs - (s.phi_prev - s.phi + 1e-8);
            worst = std::max(worst, excess);
            if (excess > 0.0) ++violations;
            ++checked;
        }
    }
    Detail d;
    d << checked << " outer iterations on 20 instances, violations = " << violations << ", max excess = " << worst;
    return {violations == 0, d.str()};
}

struct ContractRun {
    double residual_ratio;
    double eps_ratio;
    bool inclusion;
    double vg_ratio;
    double refine_ratio;
};

std::vector<ContractRun> contract_runs;
double contract_seconds = 0.0;

// 7. Output contract with tolerances from tolerance_map(1e-3, m, M).
Outcome aipp_contract()
{
    const auto start = Clock::now();
    const double rho_hat = 1e-3;
    contract_runs.clear();
    for (int t = 0; t < 20; ++t) {
        const double lower = 1.0;
        const double upper = t < 10 ? 1e2 : 1e4;
        const auto inst = gen_simplex_qp(10, 50, upper, lower, 700 + t);
        const CompositeProblem p = inst.problem();
        const ToleranceMap tol = tolerance_map(rho_hat, lower, upper);
        AippConfig cfg;
        cfg.lambda = 1.0 / (2.0 * lower);
        cfg.rho_bar = tol.rho_bar;
        cfg.eps_bar = tol.eps_bar;
        const AippResult r = aipp(p, inst.centroid(), cfg);
        const ProxApproxSolution& s = r.solution;
        const auto fn = [&](const Vector& x) { return p.value(x) + (x - s.z_minus).squaredNorm() / (2.0 * s.lambda); };
        const double coef = upper + 1.0 / cfg.lambda;
        const double b = cfg.rho_bar + std::sqrt(2.0 * cfg.eps_bar * coef);
        ContractRun run;
        run.residual_ratio = residual(s).norm() / cfg.rho_bar;
        run.eps_ratio = s.eps / cfg.eps_bar;
        run.inclusion = epsilon_subgradient_holds(fn, s.z, s.w, s.eps, sample_domain(SimplexIndicator(), 50, 200, t));
        run.vg_ratio = r.refined.v_g.norm() / rho_hat;
        run.refine_ratio =
            (r.refined.q_g.squaredNorm() + 2.0 * coef * r.refined.delta_g) / (b * b * (1.0 + 1e-8));
        contract_runs.push_back(run);
    }
    contract_seconds = seconds_since(start);
    double worst_res = 0.0, worst_eps = 0.0, worst_vg = 0.0;
    bool inclusion = true;
    for (const auto& r : contract_runs) {
        worst_res = std::max(worst_res, r.residual_ratio);
        worst_eps = std::max(worst_eps, r.eps_ratio);
        worst_vg = std::max(worst_vg, r.vg_ratio);
        inclusion = inclusion && r.inclusion;
    }
    Detail d;
    d << "20 runs; max |res|/rho_bar = " << worst_res << ", max eps/eps_bar = " << worst_eps
      << ", max |v_g|/rho_hat = " << worst_vg << ", sampled inclusion " << (inclusion ? "ok" : "VIOLATED") << ", "
      << contract_seconds << " s";
    return {worst_res <= 1.0 && worst_eps <= 1.0 && worst_vg <= 1.0 && inclusion && contract_seconds < 60.0,
            d.str()};
}

// 8. |q_g|^2 + 2 (M + 1/lambda) delta_g <= (rho_bar + sqrt(2 eps_bar (M + 1/lambda)))^2 (1 + 1e-8).
Outcome refine_inequality()
{
    if (contract_runs.empty()) return {false, "criterion 7 produced no runs"};
    double worst = 0.0;
    for (const auto& r : contract_runs) worst = std::max(worst, r.refine_ratio);
    Detail d;
    d << contract_runs.size() << " terminations, max lhs/bound = " << worst;
    return {worst <= 1.0, d.str()};
}

std::vector<QpAippResult> penalty_runs;

// 9. QP-AIPP end to end from the (infeasible) centroid.
Outcome qp_aipp_end_to_end()
{
    const auto start = Clock::now();
    penalty_runs.clear();
    int bad = 0;
    std::size_t max_loops = 0;
    double worst_v = 0.0, worst_feas = 0.0, worst_gap = 0.0, worst_p = 0.0;
    for (int t = 0; t < 10; ++t) {
        const auto inst = gen_linconstr_qp(10, 100, 10, 1e3, 1.0, 900 + t);
        const ConstrainedProblem cp = inst.problem();
        PenaltyConfig cfg;
        cfg.rho_hat = 1e-3;
        cfg.eta_hat = 1e-3;
        QpAippResult r;
        try {
            r = qp_aipp(cp, inst.objective.centroid(), cfg);
        } catch (const Error& e) {
            ++bad;
            continue;
        }
        const StationaryTriple& s = r.triple;
        const Vector res = cp.constraint_residual(s.z);
        const Vector cone = s.v - cp.f->gradient(s.z) - cp.a.transpose() * s.p;
        const double gap = simplex_normal_cone_gap(s.z, cone) / (1e-9 * (1.0 + cone.lpNorm<Eigen::Infinity>()));
        worst_v = std::max(worst_v, s.v.norm() / cfg.rho_hat);
        worst_feas = std::max(worst_feas, res.norm() / cfg.eta_hat);
        worst_gap = std::max(worst_gap, gap);
        worst_p = std::max(worst_p, (s.p - r.stats.final_c * res).norm() / (1e-12 * (1.0 + s.p.norm())));
        if (!in_simplex(s.z)) ++bad;
        max_loops = std::max(max_loops, r.stats.loops.size());
        penalty_runs.push_back(std::move(r));
    }
    const double secs = seconds_since(start);
    Detail d;
    d << penalty_runs.size() << "/10 finished; max |v|/rho_hat = " << worst_v << ", max |Az-b|/eta_hat = "
      << worst_feas << ", max inclusion gap/tol = " << worst_gap << ", max multiplier dev/tol = " << worst_p
      << ", max loops = " << max_loops << ", " << secs << " s";
    const bool ok = bad == 0 && penalty_runs.size() == 10 && worst_v <= 1.0 && worst_feas <= 1.0 && worst_gap <= 1.0 &&
                    worst_p <= 1.0 && max_loops <= 30 && secs < 300.0;
    return {ok, d.str()};
}

// 10. (c_l - c_hat) |A z_l - b|^2 <= 4 x the loop-1 value.
Outcome feasibility_decay()
{
    if (penalty_runs.empty()) return {false, "criterion 9 produced no runs"};
    double worst = 0.0;
    int violations = 0;
    for (const auto& r : penalty_runs) {
        const auto& loops = r.stats.loops;
        const double first = loops.front().c * loops.front().feasibility * loops.front().feasibility;
        for (std::size_t l = 1; l < loops.size(); ++l) {
            const double value = loops[l].c * loops[l].feasibility * loops[l].feasibility;
            const double ratio = first > 0.0 ? value / first : (value > 0.0 ? kInfinity : 0.0);
            worst = std::max(worst, ratio);
            if (value > 4.0 * first) ++violations;
        }
    }
    Detail d;
    d << penalty_runs.size() << " runs, violations = " << violations << ", max ratio to loop 1 = " << worst;
    return {violations == 0, d.str()};
}

// 11. Projection vs the enumeration oracle on 8000 grid points; idempotence
// and nonexpansiveness on 1e4 random pairs.
Outcome projection_oracle()
{
    double worst = 0.0;
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j)
            for (int k = 0; k < 20; ++k) {
                Vector x(3);
                x << -2.0 + 4.0 * i / 19.0, -2.0 + 4.0 * j / 19.0, -2.0 + 4.0 * k / 19.0;
                worst = std::max(worst, (project_simplex(x) - testing::project_simplex_enumerate(x)).norm());
            }
    Rng rng(1111);
    int bad = 0;
    for (int t = 0; t < 10000; ++t) {
        const Index n = 1 + static_cast<Index>(rng.uniform_int(0, 49));
        const Vector x = 2.0 * testing::random_normal(rng, n);
        const Vector y = 2.0 * testing::random_normal(rng, n);
        const Vector px = project_simplex(x), py = project_simplex(y);
        if ((project_simplex(px) - px).norm() > 1e-12) ++bad;
        if ((px - py).norm() > (x - y).norm() + 1e-12) ++bad;
    }
    Detail d;
    d << "grid max error = " << worst << ", property failures = " << bad;
    return {worst <= 1e-8 && bad == 0, d.str()};
}

// 12. Direction of the iteration-count tables at n = 50, l = 10.
Outcome table_direction()
{
    const auto start = Clock::now();
    BenchOptions o;
    for (double m : {16777216.0, 1048576.0, 65536.0, 4096.0, 256.0, 16.0}) o.grid.emplace_back(16777216.0, m);
    for (double upper : {4000.0, 16000.0, 64000.0, 256000.0, 1024000.0, 4096000.0}) o.grid.emplace_back(upper, 1.0);
    o.methods = {Method::Pg, Method::Aipp};
    o.seeds = {1, 2, 3, 4, 5};
    o.n = 50;
    o.l = 10;
    o.rho = 1e-5;
    o.sigma = 0.3;
    o.aipp_lambda_factor = 0.9;
    const auto rows = run_bench(o);
    const double secs = seconds_since(start);
    bool ok = secs < 600.0;
    Detail d;
    for (const auto& row : rows) {
        const double pg = row.median_iterations[0], ai = row.median_iterations[1];
        const double ratio = row.upper / row.lower;
        bool row_ok = true;
        if (std::isnan(pg) || std::isnan(ai)) row_ok = false;
        else if (ratio >= 1e4) row_ok = ai < pg;
        else if (ratio == 1.0) row_ok = pg <= ai;
        if (!row_ok) {
            ok = false;
            d << "(M=" << row.upper << ", m=" << row.lower << ": pg " << pg << " vs aipp " << ai << ") ";
        }
    }
    d << rows.size() << " rows, " << secs << " s";
    return {ok, d.str()};
}

// 13. Bitwise-identical instance files and identical run records.
Outcome determinism()
{
    auto bytes = [](const InstanceData& inst) {
        std::ostringstream os(std::ios::binary);
        write_instance(os, inst);
        return os.str();
    };
    bool ok = true;
    ok = ok && bytes(gen_simplex_qp(20, 300, 16777216.0, 16.0, 1)) == bytes(gen_simplex_qp(20, 300, 16777216.0, 16.0, 1));
    ok = ok && bytes(gen_linconstr_qp(10, 100, 10, 1e3, 1.0, 4)) == bytes(gen_linconstr_qp(10, 100, 10, 1e3, 1.0, 4));
    const InstanceData inst = gen_simplex_qp(10, 50, 1e5, 1.0, 2);
    const InstanceData lc = gen_linconstr_qp(10, 50, 5, 1e3, 1.0, 3);
    for (Method m : {Method::Aipp, Method::Pg, Method::QpAipp}) {
        SolveOptions so;
        so.method = m;
        so.rho = 1e-5;
        const InstanceData& target = m == Method::QpAipp ? lc : inst;
        const auto a = solve_instance(target, so);
        const auto b = solve_instance(target, so);
        ok = ok && a.record.status == RunStatus::Success && a.record.to_json(false) == b.record.to_json(false);
        ok = ok && a.solution && b.solution && a.solution->to_json() == b.solution->to_json();
    }
    return {ok, "instance bytes and run records (aipp, pg, qp-aipp) compared"};
}

} // namespace

int main()
{
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"ACG certificate inequality at every iteration", acg_certificate},
        {"ACG A-growth lower bound", acg_growth},
        {"ACG optimal-gap bound on strongly convex quadratics", acg_gap},
        {"ACG relative-error criterion onset", acg_onset},
        {"PG certificate sigma_eff bound", pg_sigma},
        {"AIPP outer descent", aipp_descent},
        {"AIPP output contract and refinement", aipp_contract},
        {"refinement inequality at AIPP termination", refine_inequality},
        {"QP-AIPP end to end", qp_aipp_end_to_end},
        {"penalty feasibility decay", feasibility_decay},
        {"simplex projection oracle equivalence", projection_oracle},
        {"iteration-count direction over the (M, m) grid", table_direction},
        {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("%s %2zu  %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
