#include "proxpen/aipp.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <ostream>

namespace proxpen {

void AippConfig::validate(Curvature curvature) const
{
    require(lambda > 0.0 && std::isfinite(lambda), "AippConfig: lambda must be positive");
    require(sigma > 0.0 && sigma < 1.0, "AippConfig: sigma must lie in (0, 1)");
    require(max_outer >= 1, "AippConfig: max_outer must be >= 1");
    require(curvature.upper > 0.0, "AippConfig: upper curvature M must be positive");
    if (curvature.lower > 0.0) {
        require(lambda * curvature.lower <= 1.0 + 1e-12,
                "AippConfig: lambda must satisfy lambda <= 1/m so the prox subproblems stay convex");
    }
    if (stop == AippStop::ProxApprox) {
        require(rho_bar > 0.0 && eps_bar > 0.0, "AippConfig: tolerances (rho_bar, eps_bar) must be positive");
    } else {
        require(stationarity_tolerance > 0.0, "AippConfig: stationarity_tolerance must be positive");
    }
}

double split_weight(double lambda, double m) { return std::min(1.0, std::max(0.5, lambda * m)); }

double AippStats::outer_bound_surrogate(double lambda, double sigma, double rho_bar) const
{
    const double r = (1.0 - sigma) * lambda * std::max(0.0, phi0 - phi_best);
    const double s = (1.0 - sigma) * lambda * rho_bar;
    return std::ceil(25.0 * r / (s * s)) + 1.0;
}

Vector residual(const ProxApproxSolution& sol)
{
    require(sol.lambda > 0.0, "residual: lambda must be positive");
    return (sol.z_minus - sol.z) / sol.lambda + sol.w;
}

RefinedPoint refine(const CompositeProblem& problem, double lambda, const Vector& z)
{
    require(lambda > 0.0, "refine: lambda must be positive");
    const ProxableConvex& h = *problem.convex;
    const double hz = h.value(z);
    require(std::isfinite(hz), "refine: z outside dom h");

    const double coef = problem.smooth->curvature().upper + 1.0 / lambda;
    const double t = 1.0 / coef;
    const Vector grad_z = problem.smooth->gradient(z);

    RefinedPoint r;
    r.z_g = h.prox(t, z - t * grad_z);
    r.q_g = coef * (z - r.z_g);
    const double hzg = h.value(r.z_g);
    if (!std::isfinite(hzg)) throw NumericalFailure("refine: prox landed outside dom h");
    const double cross = (r.q_g - grad_z).dot(z - r.z_g);
    double delta = hz - hzg - cross;
    if (delta < 0.0) {
        // z drifts off dom h by rounding over long ACG runs; that drift meets
        // the normal-cone part of q_g - grad g(z), which can be large.
        const double scale =
            1.0 + std::abs(hz) + std::abs(hzg) + (r.q_g - grad_z).norm() * ((z - r.z_g).norm() + z.norm());
        if (delta < -1e-10 * scale) throw NumericalFailure("refine: negative delta_g beyond rounding");
        delta = 0.0;
    }
    r.delta_g = delta;
    r.v_g = r.q_g + problem.smooth->gradient(r.z_g) - grad_z;
    return r;
}

AippResult aipp(const CompositeProblem& problem, const Vector& z0, const AippConfig& config)
{
    const Curvature curv = problem.smooth->curvature();
    config.validate(curv);
    require_same_size(z0.size(), problem.dimension(), "aipp: z0");
    require(problem.convex->in_domain(z0), "aipp: z0 outside dom h");

    const double lambda = config.lambda;
    const double a = split_weight(lambda, curv.lower);
    const double kappa_n = 1.0 - a;

    AcgConfig acg;
    acg.L = lambda * curv.upper + a;
    acg.mu = kappa_n + lambda * problem.convex->strong_convexity();
    acg.sigma = config.sigma;
    acg.max_iterations = config.acg_max_iterations;
    if (config.acg_mode == AcgMode::AtLeast) {
        acg.min_iterations = static_cast<int>(std::ceil(6.0 * std::sqrt(2.0 * lambda * curv.upper + 1.0)));
    }

    AippResult result;
    AippStats& stats = result.stats;
    stats.phi0 = problem.value(z0);
    stats.phi_best = stats.phi0;

    Vector z_prev = z0;
    double phi_prev = stats.phi0;
    for (int k = 1; k <= config.max_outer; ++k) {
        auto psi_s = std::make_shared<ShiftedOracle>(problem.smooth, lambda, a, z_prev);
        SplitConvex psi_n{problem.convex, lambda, kappa_n, z_prev};
        AcgSolver solver(psi_s, psi_n, z_prev, acg);
        AcgCertificate cert = solver.run();

        bool finished = false;
        if (config.stop == AippStop::ProxApprox &&
            (z_prev - cert.x + cert.u).norm() <= lambda * config.rho_bar / 5.0) {
            const double eta_target = lambda * config.eps_bar;
            cert = solver.run_until([eta_target](const AcgState& s) { return s.eta <= eta_target; });
            finished = true;
        }

        const double phi = problem.value(cert.x);
        if (!std::isfinite(phi)) throw NumericalFailure("aipp: objective is not finite at an outer iterate");
        if (phi < config.phi_floor) {
            throw NumericalFailure("aipp: objective fell below the divergence floor; is phi bounded below?");
        }

        GippStep step;
        step.inner = cert.iterations;
        step.phi_prev = phi_prev;
        step.phi = phi;
        step.v_tilde_sq = cert.u.squaredNorm();
        step.eps_tilde = cert.eta;
        step.gap_sq = (z_prev - cert.x + cert.u).squaredNorm();
        if (config.record_history) {
            step.z_prev = z_prev;
            step.z = cert.x;
            step.v_tilde = cert.u;
        }
        stats.steps.push_back(std::move(step));
        stats.outer = k;
        stats.inner += cert.iterations;
        stats.phi_best = std::min(stats.phi_best, phi);

        if (config.trace) {
            *config.trace << k << ',' << cert.iterations << ',' << phi << ','
                          << (z_prev - cert.x + cert.u).norm() / lambda << ',' << cert.eta / lambda << '\n';
        }

        if (config.stop == AippStop::RefinedStationarity) {
            result.refined = refine(problem, lambda, cert.x);
            ++stats.refinements;
            finished = result.refined.v_g.norm() <= config.stationarity_tolerance;
        }

        if (finished) {
            result.solution = {lambda, z_prev, cert.x, cert.u / lambda, cert.eta / lambda};
            if (config.stop == AippStop::ProxApprox) {
                result.refined = refine(problem, lambda, cert.x);
                ++stats.refinements;
            }
            return result;
        }
        z_prev = cert.x;
        phi_prev = phi;
    }
    throw IterationLimit("aipp: no solution within " + std::to_string(config.max_outer) + " outer iterations");
}

} // namespace proxpen
