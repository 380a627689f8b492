#include "proxpen/acg.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace proxpen {

double SplitConvex::value(const Vector& y) const
{
    const double hv = h->value(y);
    if (!std::isfinite(hv)) return kInfinity;
    double v = scale * hv;
    if (kappa != 0.0) v += 0.5 * kappa * (y - center).squaredNorm();
    return v;
}

void AcgConfig::validate() const
{
    require(L > 0.0 && std::isfinite(L), "AcgConfig: L must be positive and finite");
    require(mu >= 0.0 && std::isfinite(mu), "AcgConfig: mu must be nonnegative");
    require(sigma > 0.0 && sigma < 1.0, "AcgConfig: sigma must lie in (0, 1)");
    require(min_iterations >= 0, "AcgConfig: min_iterations must be >= 0");
    require(max_iterations >= 0, "AcgConfig: max_iterations must be >= 0");
    require(max_iterations == 0 || min_iterations <= max_iterations, "AcgConfig: min_iterations > max_iterations");
}

int AcgConfig::sigma_iteration_bound() const
{
    const double rs = std::sqrt(sigma);
    return static_cast<int>(std::ceil(2.0 * std::sqrt(2.0 * L) * (1.0 + rs) / rs));
}

int AcgConfig::default_max_iterations() const
{
    const double cap = 10.0 * static_cast<double>(sigma_iteration_bound());
    return static_cast<int>(std::clamp(cap, 1000.0, 1e9));
}

Vector solve_gamma_subproblem(const Vector& slope, const SplitConvex& psi_n, double A, const Vector& y0)
{
    if (!(A > 0.0)) throw InvalidInput("solve_gamma_subproblem: A must be positive");
    require_same_size(slope.size(), y0.size(), "solve_gamma_subproblem");
    const double t = 1.0 / (psi_n.kappa + 1.0 / A);
    Vector d = y0 / A - slope;
    if (psi_n.kappa != 0.0) d += psi_n.kappa * psi_n.center;
    d *= t;
    return psi_n.h->prox(t * psi_n.scale, d);
}

AcgState acg_initial_state(const SmoothOracle& psi_s, const SplitConvex& psi_n, const Vector& x0)
{
    require_same_size(x0.size(), psi_s.dimension(), "acg: x0");
    if (psi_n.kappa != 0.0) require_same_size(psi_n.center.size(), x0.size(), "acg: quadratic center");
    require(psi_n.h->in_domain(x0), "acg: x0 outside dom psi_n");

    AcgState s;
    s.x0 = x0;
    s.x = x0;
    s.y = x0;
    s.gamma_slope = Vector::Zero(x0.size());
    s.u = Vector::Zero(x0.size());
    s.psi_x = psi_s.value(x0) + psi_n.value(x0);
    return s;
}

AcgState acg_step(const AcgState& state, const SmoothOracle& psi_s, const SplitConvex& psi_n, const AcgConfig& config)
{
    const double L = config.L;
    const double A = state.A;
    const double a = config.mu * A + 1.0;
    const double A_next = A + (a + std::sqrt(a * a + 4.0 * L * a * A)) / (2.0 * L);
    const double w_old = A / A_next;
    const double w_new = (A_next - A) / A_next;

    AcgState next;
    next.j = state.j + 1;
    next.A = A_next;
    next.x0 = state.x0;

    const Vector x_tilde = w_old * state.x + w_new * state.y;
    Vector grad;
    const double val = psi_s.value_and_gradient(x_tilde, grad);
    const double lin_at_x0 = val + grad.dot(state.x0 - x_tilde);
    next.gamma_slope = w_old * state.gamma_slope + w_new * grad;
    next.gamma_value = w_old * state.gamma_value + w_new * lin_at_x0;

    next.y = solve_gamma_subproblem(next.gamma_slope, psi_n, A_next, state.x0);
    next.x = w_old * state.x + w_new * next.y;
    next.u = (state.x0 - next.y) / A_next;

    const double psi_s_x = psi_s.value(next.x);
    const double psi_n_x = psi_n.value(next.x);
    const double psi_n_y = psi_n.value(next.y);
    next.psi_x = psi_s_x + psi_n_x;
    if (!std::isfinite(next.psi_x) || !std::isfinite(psi_n_y) || !std::isfinite(A_next) ||
        !next.gamma_slope.allFinite()) {
        throw NumericalFailure("acg: non-finite value at iteration " + std::to_string(next.j));
    }

    // eta = psi(x) - Gamma(y) - psi_n(y) - <u, x - y>, regrouped so the
    // affine parts cancel exactly.
    const Vector dxy = next.x - next.y;
    const double gamma_x = next.gamma(next.x);
    const double cross = (next.gamma_slope - next.u).dot(dxy);
    double eta = (psi_s_x - gamma_x) + (psi_n_x - psi_n_y) + cross;
    if (eta < 0.0) {
        const double scale = 1.0 + std::abs(psi_s_x) + std::abs(gamma_x) + std::abs(psi_n_x) + std::abs(psi_n_y) +
                             std::abs(cross);
        if (eta < -1e-10 * scale) {
            throw NumericalFailure("acg: eta = " + std::to_string(eta) + " is negative beyond rounding at iteration " +
                                   std::to_string(next.j));
        }
        eta = 0.0;
    }
    next.eta = eta;

    if (config.trace) {
        *config.trace << next.j << ',' << next.A << ',' << next.psi_x << ',' << next.u.norm() << ',' << next.eta
                      << ',' << sigma_ratio(next) << '\n';
    }
    return next;
}

double sigma_ratio(const AcgState& state)
{
    const double num = state.u.squaredNorm() + 2.0 * state.eta;
    const double den = (state.x0 - state.x + state.u).squaredNorm();
    if (num == 0.0) return 0.0;
    return den == 0.0 ? kInfinity : num / den;
}

bool sigma_criterion(const AcgState& state, double sigma)
{
    const double num = state.u.squaredNorm() + 2.0 * state.eta;
    const double den = (state.x0 - state.x + state.u).squaredNorm();
    return num <= sigma * den;
}

AcgSolver::AcgSolver(std::shared_ptr<const SmoothOracle> psi_s, SplitConvex psi_n, const Vector& x0, AcgConfig config)
    : psi_s_(std::move(psi_s)), psi_n_(std::move(psi_n)), config_(std::move(config))
{
    require(psi_s_ != nullptr && psi_n_.h != nullptr, "AcgSolver: null component");
    config_.validate();
    max_iterations_ = config_.max_iterations > 0 ? config_.max_iterations : config_.default_max_iterations();
    max_iterations_ = std::max(max_iterations_, config_.min_iterations);
    state_ = acg_initial_state(*psi_s_, psi_n_, x0);
}

void AcgSolver::step() { state_ = acg_step(state_, *psi_s_, psi_n_, config_); }

bool AcgSolver::done(const std::function<bool(const AcgState&)>& accept) const
{
    if (state_.j < 1 || state_.j < config_.min_iterations) return false;
    if (!sigma_criterion(state_, config_.sigma)) return false;
    return !accept || accept(state_);
}

AcgCertificate AcgSolver::run() { return run_until(config_.extra_stop); }

AcgCertificate AcgSolver::run_until(const std::function<bool(const AcgState&)>& accept)
{
    while (!done(accept)) {
        if (state_.j >= max_iterations_) {
            throw IterationLimit("acg: no certificate within " + std::to_string(max_iterations_) + " iterations");
        }
        step();
    }
    return certificate();
}

AcgCertificate AcgSolver::certificate() const { return {state_.x, state_.u, state_.eta, state_.j}; }

AcgCertificate run_acg(std::shared_ptr<const SmoothOracle> psi_s, SplitConvex psi_n, const Vector& x0,
                       const AcgConfig& config)
{
    AcgSolver solver(std::move(psi_s), std::move(psi_n), x0, config);
    return solver.run();
}

} // namespace proxpen
