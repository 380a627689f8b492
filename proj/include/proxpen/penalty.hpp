#pragma once

#include "proxpen/aipp.hpp"
#include "proxpen/problem.hpp"

#include <vector>

namespace proxpen {

struct PenaltyConfig {
    double rho_hat = 1e-3;
    double eta_hat = 1e-3;
    double c_hat = 0.0;
    double sigma = 0.3;
    int max_doublings = 60;
    // Start each loop from the previous loop's z_g instead of z0.
    bool warm_start = false;
    AcgMode acg_mode = AcgMode::Practical;
    int max_outer = 1'000'000;

    void validate() const;
};

// (z, v, p) with v in grad f(z) + dh(z) + A^T p, |v| <= rho_hat,
// |Az - b| <= eta_hat, and p = c (Az - b) for the final penalty c.
struct StationaryTriple {
    Vector z;
    Vector v;
    Vector p;
};

struct PenaltyLoop {
    double c = 0.0;
    double upper_curvature = 0.0;
    double rho_bar = 0.0;
    double eps_bar = 0.0;
    int outer = 0;
    long long inner = 0;
    double feasibility = 0.0; // |A z_g - b|
    double v_norm = 0.0;      // |v_g|
    double penalized_z = 0.0; // phi_c at the AIPP output z
    double penalized_zg = 0.0; // phi_c at z_g
};

struct PenaltyStats {
    std::vector<PenaltyLoop> loops;
    double final_c = 0.0;
    double lambda = 0.0;
    long long total_inner() const;
};

struct QpAippResult {
    StationaryTriple triple;
    PenaltyStats stats;
};

struct ToleranceMap {
    double rho_bar;
    double eps_bar;
};

// g_c = f + (c/2)|A . - b|^2 with curvature (m_f, L_f + c |A|^2).
CompositeProblem build_penalty(const ConstrainedProblem& cp, double c);

// (rho_hat / 4, rho_hat^2 / (32 (M + 2m)))
ToleranceMap tolerance_map(double rho_hat, double m, double M);

// lambda_max(A^T A) by power iteration, inflated by 1.01 so the result bounds
// the true value from above.
double spectral_norm_sq(const Matrix& a, double tol = 1e-10, int max_power_iters = 100'000);

QpAippResult qp_aipp(const ConstrainedProblem& cp, const Vector& z0, const PenaltyConfig& config);

} // namespace proxpen
