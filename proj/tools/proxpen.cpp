// proxpen: generate instances, solve them, re-verify solutions, benchmark.
#include "proxpen/instance_io.hpp"
#include "proxpen/run.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace proxpen;

namespace {

constexpr int kExitInvalid = 3;

std::vector<std::pair<double, double>> parse_grid(const std::string& text)
{
    std::vector<std::pair<double, double>> grid;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        const auto colon = cell.find(':');
        if (colon == std::string::npos) throw InvalidInput("grid cell '" + cell + "' is not M:m");
        try {
            grid.emplace_back(std::stod(cell.substr(0, colon)), std::stod(cell.substr(colon + 1)));
        } catch (const std::logic_error&) {
            throw InvalidInput("grid cell '" + cell + "' is not numeric");
        }
    }
    return grid;
}

std::vector<std::pair<double, double>> preset_grid(const std::string& name)
{
    std::vector<std::pair<double, double>> grid;
    if (name == "vary-m") {
        for (double m : {16777216.0, 1048576.0, 65536.0, 4096.0, 256.0, 16.0}) grid.emplace_back(16777216.0, m);
    } else if (name == "vary-M") {
        for (double upper : {4000.0, 16000.0, 64000.0, 256000.0, 1024000.0, 4096000.0}) grid.emplace_back(upper, 1.0);
    } else {
        throw InvalidInput("unknown grid preset '" + name + "' (vary-m, vary-M)");
    }
    return grid;
}

AcgMode parse_acg_mode(const std::string& s)
{
    if (s == "practical") return AcgMode::Practical;
    if (s == "at-least") return AcgMode::AtLeast;
    throw InvalidInput("unknown acg mode '" + s + "' (practical, at-least)");
}

nlohmann::json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(path + ": " + e.what());
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Nonconvex composite optimization: AIPP, projected gradient and a quadratic penalty method"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate a simplex-constrained QP instance");
    Index gen_l = 20, gen_n = 300, gen_leq = 0;
    double gen_upper = 0.0, gen_lower = 0.0;
    std::uint64_t gen_seed = 1;
    std::string gen_out;
    gen->add_option("--l", gen_l, "rows of A")->capture_default_str();
    gen->add_option("--n", gen_n, "dimension")->capture_default_str();
    gen->add_option("--M", gen_upper, "upper curvature target")->required();
    gen->add_option("--m", gen_lower, "lower curvature target")->required();
    gen->add_option("--seed", gen_seed, "PRNG seed")->capture_default_str();
    gen->add_option("--l-eq", gen_leq, "number of equality constraints (0: none)")->capture_default_str();
    gen->add_option("--out", gen_out, "output instance file")->required();

    // solve
    auto* solve = app.add_subcommand("solve", "run a solver on an instance; prints a JSON run record");
    std::string solve_instance_path, solve_method = "aipp", solve_trace, solve_solution, solve_acg = "practical";
    SolveOptions so;
    solve->add_option("--instance", solve_instance_path, "instance file")->required();
    solve->add_option("--method", solve_method, "aipp, pg or qp-aipp")->capture_default_str();
    solve->add_option("--rho", so.rho, "relative stationarity tolerance (aipp, pg)")->capture_default_str();
    solve->add_option("--sigma", so.sigma, "ACG relative error parameter")->capture_default_str();
    solve->add_option("--lambda-factor", so.aipp_lambda_factor, "aipp prox stepsize lambda = factor/m")
        ->capture_default_str();
    solve->add_option("--pg-factor", so.pg_lambda_factor, "pg stepsize lambda = factor/M")->capture_default_str();
    solve->add_option("--rho-hat", so.rho_hat, "qp-aipp stationarity tolerance")->capture_default_str();
    solve->add_option("--eta-hat", so.eta_hat, "qp-aipp feasibility tolerance")->capture_default_str();
    solve->add_option("--acg-mode", solve_acg, "practical or at-least")->capture_default_str();
    solve->add_option("--max-iterations", so.max_iterations, "pg iterations / aipp outer iterations")
        ->capture_default_str();
    solve->add_option("--trace", solve_trace, "per-iteration CSV trace file");
    solve->add_option("--solution", solve_solution, "write the solution JSON here");

    // check
    auto* check = app.add_subcommand("check", "re-verify a solution against its instance");
    std::string check_solution_path, check_instance_path;
    check->add_option("--solution", check_solution_path, "solution JSON")->required();
    check->add_option("--instance", check_instance_path, "instance file")->required();

    // bench
    auto* bench = app.add_subcommand("bench", "iteration-count table over a grid of (M, m)");
    std::string bench_grid, bench_preset, bench_methods = "pg,aipp", bench_out;
    std::vector<std::uint64_t> bench_seeds;
    BenchOptions bo;
    bench->add_option("--grid", bench_grid, "comma-separated M:m cells");
    bench->add_option("--preset", bench_preset, "vary-m (M = 2^24, m = 2^24 .. 2^4) or vary-M (m = 1, M = 4000 .. 4096000)");
    bench->add_option("--methods", bench_methods, "comma-separated methods")->capture_default_str();
    bench->add_option("--seeds", bench_seeds, "seed list (default 1 2 3)");
    bench->add_option("--n", bo.n, "dimension")->capture_default_str();
    bench->add_option("--l", bo.l, "rows of A")->capture_default_str();
    bench->add_option("--rho", bo.rho, "relative stationarity tolerance")->capture_default_str();
    bench->add_option("--sigma", bo.sigma, "ACG relative error parameter")->capture_default_str();
    bench->add_option("--threads", bo.threads, "worker threads (0: PROXPEN_THREADS or all cores)");
    bench->add_option("--out", bench_out, "CSV output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInvalid;
    }

    try {
        if (*gen) {
            require(gen_l >= 1 && gen_n >= 1, "gen: --l and --n must be >= 1");
            require(gen_lower > 0.0, "gen: --m must be positive");
            require(gen_upper >= gen_lower, "gen: --M must be >= --m");
            require(gen_leq >= 0, "gen: --l-eq must be >= 0");
            InstanceData inst;
            if (gen_leq > 0) inst = gen_linconstr_qp(gen_l, gen_n, gen_leq, gen_upper, gen_lower, gen_seed);
            else inst = gen_simplex_qp(gen_l, gen_n, gen_upper, gen_lower, gen_seed);
            save_instance(gen_out, inst);
            std::cout << nlohmann::json{{"instance", instance_id(inst)}, {"file", gen_out}}.dump() << '\n';
            return 0;
        }

        if (*solve) {
            so.method = parse_method(solve_method);
            so.acg_mode = parse_acg_mode(solve_acg);
            const InstanceData inst = load_instance(solve_instance_path);
            std::ofstream trace;
            if (!solve_trace.empty()) {
                trace.open(solve_trace);
                if (!trace) throw InvalidInput("cannot open trace file " + solve_trace);
                so.trace = &trace;
            }
            const SolveOutcome outcome = solve_instance(inst, so);
            std::cout << outcome.record.to_json().dump(2) << '\n';
            if (outcome.solution && !solve_solution.empty()) {
                std::ofstream out(solve_solution);
                if (!out) throw InvalidInput("cannot open " + solve_solution);
                out << outcome.solution->to_json().dump() << '\n';
            }
            return exit_code(outcome.record.status);
        }

        if (*check) {
            const SolutionFile sol = SolutionFile::from_json(read_json_file(check_solution_path));
            const InstanceData inst = load_instance(check_instance_path);
            const CheckReport report = check_solution(sol, inst);
            std::cout << report.to_json().dump(2) << '\n';
            return report.pass() ? 0 : exit_code(RunStatus::ToleranceNotReached);
        }

        if (*bench) {
            require(bench_grid.empty() != bench_preset.empty(), "bench: give exactly one of --grid, --preset");
            bo.grid = bench_grid.empty() ? preset_grid(bench_preset) : parse_grid(bench_grid);
            bo.methods.clear();
            std::stringstream ss(bench_methods);
            for (std::string m; std::getline(ss, m, ',');) bo.methods.push_back(parse_method(m));
            if (!bench_seeds.empty()) bo.seeds = bench_seeds;
            const auto rows = run_bench(bo);
            if (bench_out.empty()) {
                write_bench_csv(std::cout, bo, rows);
            } else {
                std::ofstream out(bench_out);
                if (!out) throw InvalidInput("cannot open " + bench_out);
                write_bench_csv(out, bo, rows);
            }
            return 0;
        }
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(RunStatus::InvalidInput);
    } catch (const IterationLimit& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(RunStatus::ToleranceNotReached);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(RunStatus::NumericalFailure);
    }
    return 0;
}
