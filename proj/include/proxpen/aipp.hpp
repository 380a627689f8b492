#pragma once

#include "proxpen/acg.hpp"
#include "proxpen/problem.hpp"

#include <iosfwd>
#include <vector>

namespace proxpen {

enum class AcgMode {
    // Run at least ceil(6 sqrt(2 lambda M + 1)) inner iterations per call.
    AtLeast,
    // Stop each inner call as soon as the relative error test holds.
    Practical,
};

enum class AippStop {
    // Outer test |z_{k-1} - x + u| <= lambda rho_bar / 5, then continue the
    // same ACG run until eta / lambda <= eps_bar.
    ProxApprox,
    // After each outer iteration, refine z_k and stop once
    // |v_g| <= stationarity_tolerance.
    RefinedStationarity,
};

struct AippConfig {
    double lambda = 0.0;
    double sigma = 0.3;
    double rho_bar = 1e-3;
    double eps_bar = 1e-6;
    int max_outer = 1'000'000;
    AcgMode acg_mode = AcgMode::Practical;
    AippStop stop = AippStop::ProxApprox;
    double stationarity_tolerance = 0.0;
    double phi_floor = -1e50;
    int acg_max_iterations = 0; // 0: ACG default
    bool record_history = false;
    // CSV rows per outer iteration: k,inner,phi,residual_norm,eps
    std::ostream* trace = nullptr;

    // Requires 0 < lambda <= 1/m (see split_weight), 0 < sigma < 1.
    void validate(Curvature curvature) const;
};

// (lambda, z^-, z, w, eps) with w in the eps-subdifferential of
// phi + |. - z^-|^2 / (2 lambda) at z.
struct ProxApproxSolution {
    double lambda = 0.0;
    Vector z_minus;
    Vector z;
    Vector w;
    double eps = 0.0;
};

// Output of one composite gradient step from z:
//   z_g = argmin { l_g(u; z) + h(u) + (M + 1/lambda)/2 |u - z|^2 }
//   q_g = (M + 1/lambda)(z - z_g)
//   delta_g = h(z) - h(z_g) - <q_g - grad g(z), z - z_g>
//   v_g = q_g + grad g(z_g) - grad g(z),  v_g in grad g(z_g) + dh(z_g).
struct RefinedPoint {
    Vector z_g;
    Vector q_g;
    double delta_g = 0.0;
    Vector v_g;
};

// Quantities of one outer (GIPP) iteration.
struct GippStep {
    int inner = 0;
    double phi_prev = 0.0;
    double phi = 0.0;
    double v_tilde_sq = 0.0;  // |v~_k|^2
    double eps_tilde = 0.0;   // eps~_k
    double gap_sq = 0.0;      // |z_{k-1} - z_k + v~_k|^2
    // Filled when record_history is set.
    Vector z_prev;
    Vector z;
    Vector v_tilde;
};

struct AippStats {
    int outer = 0;
    long long inner = 0;
    int refinements = 0;
    double phi0 = 0.0;
    double phi_best = 0.0;
    std::vector<GippStep> steps;

    // Prox evaluations: one per inner iteration plus one per refinement.
    long long projections() const { return inner + refinements; }
    // Observable stand-in for the outer-iteration bound:
    //   ceil(25 R / ((1 - sigma)^2 lambda^2 rho_bar^2)) + 1 with
    //   R = (1 - sigma) lambda (phi(z0) - phi_best).
    double outer_bound_surrogate(double lambda, double sigma, double rho_bar) const;
};

struct AippResult {
    ProxApproxSolution solution;
    RefinedPoint refined;
    AippStats stats;
};

// Weight a of the split psi_s = lambda g + (a/2)|.-z^-|^2,
// psi_n = lambda h + ((1-a)/2)|.-z^-|^2. a = max(1/2, lambda m) keeps psi_s
// convex; for lambda <= 1/(2m) this is the even split a = 1/2.
double split_weight(double lambda, double m);

AippResult aipp(const CompositeProblem& problem, const Vector& z0, const AippConfig& config);

RefinedPoint refine(const CompositeProblem& problem, double lambda, const Vector& z);

// (z^- - z)/lambda + w
Vector residual(const ProxApproxSolution& sol);

} // namespace proxpen
