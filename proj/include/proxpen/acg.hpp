#pragma once

#include "proxpen/problem.hpp"

#include <functional>
#include <iosfwd>
#include <memory>

namespace proxpen {

// Nonsmooth part of an ACG problem in decomposed form:
//   psi_n(y) = scale * h(y) + (kappa/2) |y - center|^2.
// Keeping the quadratic explicit makes the y-update a single prox call.
struct SplitConvex {
    std::shared_ptr<const ProxableConvex> h;
    double scale = 1.0;
    double kappa = 0.0;
    Vector center;

    double value(const Vector& y) const;
    double strong_convexity() const { return scale * h->strong_convexity() + kappa; }
};

struct AcgState;

struct AcgConfig {
    double L = 1.0;     // upper curvature of psi_s
    double mu = 0.0;    // strong convexity modulus of psi_n
    double sigma = 0.3; // relative-error target, in (0, 1)
    int min_iterations = 0;
    int max_iterations = 0; // 0 selects default_max_iterations()
    // Checked only once the sigma-criterion holds.
    std::function<bool(const AcgState&)> extra_stop;
    // CSV rows: j,A,psi,u_norm,eta,criterion
    std::ostream* trace = nullptr;

    void validate() const;
    // Iterations within which the sigma-criterion is guaranteed to hold:
    // ceil(2 sqrt(2L) (1 + sqrt(sigma)) / sqrt(sigma)).
    int sigma_iteration_bound() const;
    // 10x the bound above, at least 1000.
    int default_max_iterations() const;
};

// Per-iteration quantities. The affine minorant is stored anchored at x0:
//   Gamma_j(y) = gamma_value + <gamma_slope, y - x0>.
struct AcgState {
    int j = 0;
    double A = 0.0;
    Vector x0;
    Vector x;
    Vector y;
    Vector gamma_slope;
    double gamma_value = 0.0;
    Vector u;
    double eta = 0.0;
    double psi_x = 0.0; // psi_s(x) + psi_n(x)

    double gamma(const Vector& point) const { return gamma_value + gamma_slope.dot(point - x0); }
};

struct AcgCertificate {
    Vector x;
    Vector u;
    double eta = 0.0;
    int iterations = 0;
};

// y = argmin { <slope, y> + psi_n(y) + |y - y0|^2 / (2A) }, obtained by
// completing the square: prox_{t scale h}(t (kappa c + y0/A - slope)) with
// t = 1 / (kappa + 1/A).
Vector solve_gamma_subproblem(const Vector& slope, const SplitConvex& psi_n, double A, const Vector& y0);

// A_0 = 0, Gamma_0 = 0, x = y = x0.
AcgState acg_initial_state(const SmoothOracle& psi_s, const SplitConvex& psi_n, const Vector& x0);

// One ACG iteration. Throws NumericalFailure on non-finite values or on a
// negative eta beyond 1e-10 times the magnitude of the cancelled terms;
// smaller negatives clamp to 0.
AcgState acg_step(const AcgState& state, const SmoothOracle& psi_s, const SplitConvex& psi_n, const AcgConfig& config);

// |u|^2 + 2 eta <= sigma |x0 - x + u|^2
bool sigma_criterion(const AcgState& state, double sigma);
// (|u|^2 + 2 eta) / |x0 - x + u|^2, with 0/0 read as 0.
double sigma_ratio(const AcgState& state);

// Stateful driver that supports continuing a finished run, which is how
// AIPP tightens eta after its outer stopping test fires.
class AcgSolver {
public:
    AcgSolver(std::shared_ptr<const SmoothOracle> psi_s, SplitConvex psi_n, const Vector& x0, AcgConfig config);

    const AcgState& state() const { return state_; }
    const AcgConfig& config() const { return config_; }

    void step();
    // Iterates until j >= min_iterations, the sigma-criterion holds and
    // extra_stop (if any) accepts. Returns immediately if already satisfied
    // by the current iterate after at least one step.
    AcgCertificate run();
    // Continuation: keep iterating until the sigma-criterion and `accept`
    // both hold.
    AcgCertificate run_until(const std::function<bool(const AcgState&)>& accept);

    AcgCertificate certificate() const;

private:
    bool done(const std::function<bool(const AcgState&)>& accept) const;

    std::shared_ptr<const SmoothOracle> psi_s_;
    SplitConvex psi_n_;
    AcgConfig config_;
    int max_iterations_;
    AcgState state_;
};

AcgCertificate run_acg(std::shared_ptr<const SmoothOracle> psi_s, SplitConvex psi_n, const Vector& x0,
                       const AcgConfig& config);

} // namespace proxpen
