#pragma once

#include "proxpen/aipp.hpp"
#include "proxpen/instance_io.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace proxpen {

enum class Method { Aipp, Pg, QpAipp };

Method parse_method(const std::string& name);
std::string method_name(Method method);

enum class RunStatus { Success, ToleranceNotReached, InvalidInput, NumericalFailure };

std::string status_name(RunStatus status);
// 0 success, 2 tolerance not reached, 3 invalid input, 4 numerical failure.
int exit_code(RunStatus status);

struct SolveOptions {
    Method method = Method::Aipp;
    // Relative stationarity target |v| / (|grad g(z0)| + 1) for aipp and pg.
    double rho = 1e-7;
    double sigma = 0.3;
    double aipp_lambda_factor = 0.9; // lambda = factor / m
    double pg_lambda_factor = 0.99;  // lambda = factor / M
    double rho_hat = 1e-3;           // qp-aipp
    double eta_hat = 1e-3;           // qp-aipp
    AcgMode acg_mode = AcgMode::Practical;
    int max_iterations = 10'000'000; // pg iterations or aipp outer iterations
    std::ostream* trace = nullptr;
};

// One solver run, serialized as the versioned RunRecord JSON.
struct RunRecord {
    static constexpr const char* kSchema = "proxpen.run_record/1";

    Method method = Method::Aipp;
    std::string instance_id;
    std::uint64_t seed = 0;
    Index l = 0;
    Index n = 0;
    Index l_eq = 0;
    Curvature curvature;
    nlohmann::json config;
    long long inner_iterations = 0;
    long long outer_iterations = 0;
    long long projections = 0;
    double objective = 0.0;
    double criterion = 0.0;
    double tolerance = 0.0;
    double wall_time = 0.0;
    RunStatus status = RunStatus::Success;
    std::string message;
    // qp-aipp only
    std::vector<double> c_schedule;
    std::vector<long long> loop_inner_iterations;
    double v_norm = 0.0;
    double feasibility = 0.0;

    // include_wall_time=false gives the deterministic part of the record.
    nlohmann::json to_json(bool include_wall_time = true) const;
};

// Point returned by a solve, with what `check` needs to re-verify it.
struct SolutionFile {
    static constexpr const char* kSchema = "proxpen.solution/1";

    Method method = Method::Aipp;
    std::string instance_id;
    Vector z;
    Vector v;
    Vector p; // qp-aipp multiplier
    double c = 0.0;
    double rho = 0.0;
    double rho_hat = 0.0;
    double eta_hat = 0.0;

    nlohmann::json to_json() const;
    static SolutionFile from_json(const nlohmann::json& j);
};

struct SolveOutcome {
    RunRecord record;
    std::optional<SolutionFile> solution; // present on success
};

SolveOutcome solve_instance(const InstanceData& inst, const SolveOptions& options);

struct CheckItem {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double threshold = 0.0;
};

struct CheckReport {
    std::vector<CheckItem> items;
    bool pass() const;
    nlohmann::json to_json() const;
};

// max_i s_i - <s, z>: zero iff s is in the normal cone of the simplex at z
// (for z in the simplex).
double simplex_normal_cone_gap(const Vector& z, const Vector& s);

// Recomputes gradients at the stored point and re-evaluates every condition
// of the method's stopping rule.
CheckReport check_solution(const SolutionFile& sol, const InstanceData& inst);

struct BenchOptions {
    std::vector<std::pair<double, double>> grid; // (M, m) rows
    std::vector<Method> methods = {Method::Pg, Method::Aipp};
    std::vector<std::uint64_t> seeds = {1, 2, 3};
    Index n = 50;
    Index l = 10;
    double rho = 1e-5;
    double sigma = 0.3;
    double aipp_lambda_factor = 0.9;
    double pg_lambda_factor = 0.99;
    int max_iterations = 10'000'000;
    int threads = 0; // 0: PROXPEN_THREADS or the OpenMP default
};

struct BenchRow {
    double upper = 0.0;
    double lower = 0.0;
    double g_bar = 0.0;
    std::vector<double> median_iterations; // per method, NaN if any seed failed
    std::vector<std::vector<RunRecord>> records; // [method][seed]
    std::string winner;
};

std::vector<BenchRow> run_bench(const BenchOptions& options);
void write_bench_csv(std::ostream& out, const BenchOptions& options, const std::vector<BenchRow>& rows);
int bench_threads(int requested);

} // namespace proxpen
