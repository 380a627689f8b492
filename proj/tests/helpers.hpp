#pragma once

#include "proxpen/problem.hpp"
#include "proxpen/random.hpp"

#include <Eigen/QR>

#include <memory>

namespace proxpen::testing {

inline Vector random_normal(Rng& rng, Index n)
{
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = rng.normal();
    return v;
}

inline Matrix random_normal(Rng& rng, Index rows, Index cols)
{
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
    return m;
}

// Symmetric matrix with eigenvalues spread over [lo, hi] (lo, hi included).
inline Matrix spectrum_matrix(Rng& rng, Index n, double lo, double hi)
{
    const Matrix g = random_normal(rng, n, n);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr{Eigen::MatrixXd(g)};
    const Eigen::MatrixXd q = qr.householderQ();
    Vector ev(n);
    for (Index i = 0; i < n; ++i) ev[i] = n == 1 ? hi : lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    Matrix h = q * ev.asDiagonal() * q.transpose();
    return (0.5 * (h + h.transpose())).eval();
}

// 0.5 z^T H z + <c, z> with spectrum in [lo, hi]; curvature declared from it.
inline std::shared_ptr<QuadraticOracle> random_quadratic(Rng& rng, Index n, double lo, double hi)
{
    Matrix h = spectrum_matrix(rng, n, lo, hi);
    Vector c = random_normal(rng, n);
    return std::make_shared<QuadraticOracle>(std::move(h), std::move(c), 0.0, Curvature{std::max(0.0, -lo), hi});
}

// Central finite-difference gradient.
inline Vector fd_gradient(const SmoothOracle& g, const Vector& z, double step = 1e-6)
{
    Vector grad(z.size());
    for (Index i = 0; i < z.size(); ++i) {
        Vector p = z, m = z;
        p[i] += step;
        m[i] -= step;
        grad[i] = (g.value(p) - g.value(m)) / (2.0 * step);
    }
    return grad;
}

} // namespace proxpen::testing

namespace proxpen::testing {

// Exact simplex projection by enumerating supports (KKT: on the support S,
// z_S = x_S - (sum x_S - 1)/|S|). Exponential in n; for n <= 10.
inline Vector project_simplex_enumerate(const Vector& x)
{
    const Index n = x.size();
    Vector best;
    double best_dist = kInfinity;
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        double sum = 0.0;
        int count = 0;
        for (Index i = 0; i < n; ++i) {
            if (mask & (1u << i)) {
                sum += x[i];
                ++count;
            }
        }
        const double shift = (sum - 1.0) / count;
        Vector z = Vector::Zero(n);
        bool feasible = true;
        for (Index i = 0; i < n; ++i) {
            if (mask & (1u << i)) {
                z[i] = x[i] - shift;
                if (z[i] < 0.0) feasible = false;
            }
        }
        if (!feasible) continue;
        const double d = (z - x).squaredNorm();
        if (d < best_dist) {
            best_dist = d;
            best = z;
        }
    }
    return best;
}

} // namespace proxpen::testing
