#include "proxpen/pg.hpp"

#include <cmath>
#include <ostream>

namespace proxpen {

namespace {

double resolve_lambda(const CgConfig& config, Curvature curvature)
{
    return config.lambda > 0.0 ? config.lambda : CgConfig::default_lambda(curvature);
}

PgCertificate certificate_from(double lambda, const Vector& z_prev, const Vector& z, double g_z, double g_prev,
                               const Vector& grad_prev)
{
    PgCertificate c;
    c.v_tilde = z_prev - z;
    const double d2 = c.v_tilde.squaredNorm();
    const double slope = grad_prev.dot(z - z_prev);
    double eps = lambda * (g_z - g_prev - slope) + 0.5 * d2;
    if (eps < 0.0) {
        // Rounding allowance scaled by the terms that cancel.
        const double scale = 1.0 + std::abs(g_z) + std::abs(g_prev) + std::abs(slope);
        if (eps < -1e-10 * lambda * scale) {
            throw NumericalFailure("pg_certificate: eps is negative beyond rounding; is lambda <= 1/m?");
        }
        eps = 0.0;
    }
    c.eps_tilde = eps;
    c.sigma_eff = d2 == 0.0 ? 0.0 : (d2 + 2.0 * eps) / (4.0 * d2);
    return c;
}

} // namespace

void CgConfig::validate(Curvature curvature) const
{
    const double l = resolve_lambda(*this, curvature);
    require(l > 0.0 && std::isfinite(l), "CgConfig: lambda must be positive");
    require(curvature.lower <= 0.0 || l <= 1.0 / curvature.lower * (1.0 + 1e-12), "CgConfig: need lambda <= 1/m");
    require(l * curvature.upper < 2.0, "CgConfig: need lambda < 2/M");
    require(tolerance > 0.0, "CgConfig: tolerance must be positive");
    require(max_iterations >= 1, "CgConfig: max_iterations must be >= 1");
}

Vector pg_step(const CompositeProblem& problem, double lambda, const Vector& z)
{
    require(lambda > 0.0, "pg_step: lambda must be positive");
    require(problem.convex->in_domain(z), "pg_step: z outside dom h");
    const Vector grad = problem.smooth->gradient(z);
    return problem.convex->prox(lambda, z - lambda * grad);
}

PgCertificate pg_certificate(const CompositeProblem& problem, double lambda, const Vector& z_prev, const Vector& z)
{
    const Vector expected = pg_step(problem, lambda, z_prev);
    const double scale = 1.0 + expected.lpNorm<Eigen::Infinity>();
    if ((expected - z).lpNorm<Eigen::Infinity>() > 1e-10 * scale) {
        throw InvalidInput("pg_certificate: z is not the gradient step from z_prev");
    }
    Vector grad_prev;
    const double g_prev = problem.smooth->value_and_gradient(z_prev, grad_prev);
    return certificate_from(lambda, z_prev, z, problem.smooth->value(z), g_prev, grad_prev);
}

PgResult run_pg(const CompositeProblem& problem, const Vector& z0, const CgConfig& config)
{
    const Curvature curv = problem.smooth->curvature();
    config.validate(curv);
    require_same_size(z0.size(), problem.dimension(), "run_pg: z0");
    require(problem.convex->in_domain(z0), "run_pg: z0 outside dom h");
    const double lambda = resolve_lambda(config, curv);
    const ProxableConvex& h = *problem.convex;

    Vector z_prev = z0;
    Vector grad_prev;
    double g_prev = problem.smooth->value_and_gradient(z_prev, grad_prev);
    Vector z;
    Vector grad;
    for (int k = 1; k <= config.max_iterations; ++k) {
        h.prox(lambda, z_prev - lambda * grad_prev, z);
        const double g_z = problem.smooth->value_and_gradient(z, grad);
        if (!std::isfinite(g_z)) throw NumericalFailure("run_pg: non-finite objective");
        Vector v = (z_prev - z) / lambda + grad - grad_prev;
        const double v_norm = v.norm();
        if (config.trace) {
            const PgCertificate c = certificate_from(lambda, z_prev, z, g_z, g_prev, grad_prev);
            *config.trace << k << ',' << g_z + h.value(z) << ',' << v_norm << ',' << c.sigma_eff << '\n';
        }
        if (v_norm <= config.tolerance) {
            return {z, std::move(v), k, g_z + h.value(z), lambda};
        }
        z_prev.swap(z);
        grad_prev.swap(grad);
        g_prev = g_z;
    }
    throw IterationLimit("run_pg: tolerance not reached within " + std::to_string(config.max_iterations) +
                         " iterations");
}

} // namespace proxpen
