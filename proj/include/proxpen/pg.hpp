#pragma once

#include "proxpen/problem.hpp"

#include <iosfwd>

namespace proxpen {

// Composite (projected) gradient method
//   z_k = prox_{lambda h}(z_{k-1} - lambda grad g(z_{k-1})).
struct CgConfig {
    double lambda = 0.0; // 0 selects default_lambda(): 0.99 / M
    double tolerance = 1e-6; // absolute bound on |v|
    int max_iterations = 10'000'000;
    // CSV rows: k,phi,v_norm,sigma_eff
    std::ostream* trace = nullptr;

    static double default_lambda(Curvature curvature) { return 0.99 / curvature.upper; }
    // lambda <= 1/m and lambda < 2/M
    void validate(Curvature curvature) const;
};

struct PgCertificate {
    Vector v_tilde;
    double eps_tilde = 0.0;
    double sigma_eff = 0.0;
};

struct PgResult {
    Vector z;
    Vector v; // in grad g(z) + dh(z)
    int iterations = 0;
    double phi = 0.0;
    double lambda = 0.0;
};

Vector pg_step(const CompositeProblem& problem, double lambda, const Vector& z);

// GIPP certificate of one step: v~ = z_prev - z,
//   eps~ = lambda [g(z) - l_g(z; z_prev) + |z - z_prev|^2 / (2 lambda)],
//   sigma_eff = (|v~|^2 + 2 eps~) / |z_prev - z + v~|^2 (0 when z = z_prev).
// Throws InvalidInput when z is not the step from z_prev.
PgCertificate pg_certificate(const CompositeProblem& problem, double lambda, const Vector& z_prev, const Vector& z);

// Iterates until |v| <= config.tolerance with
//   v = (z_prev - z)/lambda + grad g(z) - grad g(z_prev).
PgResult run_pg(const CompositeProblem& problem, const Vector& z0, const CgConfig& config);

} // namespace proxpen
