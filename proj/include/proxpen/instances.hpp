#pragma once

#include "proxpen/problem.hpp"
#include "proxpen/simplex.hpp"

#include <cstdint>
#include <memory>

namespace proxpen {

// g(z) = -(xi/2)|D B z|^2 + (tau/2)|A z - b|^2 over the unit simplex, with
// (xi, tau) chosen so that the Hessian has extreme eigenvalues M and -m.
struct SimplexQpInstance {
    Matrix a;       // l x n
    Matrix b_mat;   // n x n
    Vector d;       // diagonal of D, integers in [1, 1000]
    Vector b;       // length l
    double xi = 0.0;
    double tau = 0.0;
    Curvature declared; // (m, M)
    std::uint64_t seed = 0;

    Index l() const { return a.rows(); }
    Index n() const { return a.cols(); }

    // tau A^T A - xi (DB)^T (DB)
    Matrix hessian() const;
    std::shared_ptr<const QuadraticOracle> objective() const;
    CompositeProblem problem() const;
    Vector centroid() const { return Vector::Constant(n(), 1.0 / static_cast<double>(n())); }
};

// SimplexQpInstance objective plus equality constraints A_eq z = b_eq,
// consistent by construction with the simplex point z_feas.
struct LinConstrQpInstance {
    SimplexQpInstance objective;
    Matrix a_eq;
    Vector b_eq;
    Vector z_feas;

    ConstrainedProblem problem() const;
};

struct CurvatureScales {
    double xi;
    double tau;
};

// Finds xi, tau > 0 with lambda_max(tau Q2 - xi Q1) = M and
// lambda_min(tau Q2 - xi Q1) = -m (relative 1e-6). Bisects r = tau/xi on the
// eigenvalue ratio, then rescales. Throws InvalidInput when the ratio M/m is
// unattainable for the given pair, NumericalFailure when bisection stalls.
CurvatureScales calibrate_curvature(const Matrix& q1, const Matrix& q2, double target_upper, double target_lower);

// Extreme eigenvalues (min, max) of a symmetric matrix.
std::pair<double, double> extreme_eigenvalues(const Matrix& sym);

// A, B, b ~ U[0,1] entrywise and d_i ~ U{1..1000}, drawn in that order from
// Rng(seed); deterministic in (l, n, M, m, seed).
SimplexQpInstance gen_simplex_qp(Index l, Index n, double upper, double lower, std::uint64_t seed);

// As gen_simplex_qp, then A_eq ~ U[0,1] and z_feas ~ uniform on the simplex
// from a second stream Rng(seed ^ 0xc0ffee5eed); b_eq = A_eq z_feas.
LinConstrQpInstance gen_linconstr_qp(Index l, Index n, Index l_eq, double upper, double lower, std::uint64_t seed);

} // namespace proxpen
