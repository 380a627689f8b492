#include "proxpen/instances.hpp"

#include "proxpen/kernels.hpp"
#include "proxpen/random.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace proxpen {

namespace {

Matrix uniform_matrix(Rng& rng, Index rows, Index cols)
{
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) m(i, j) = rng.uniform();
    return m;
}

Vector uniform_vector(Rng& rng, Index n)
{
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = rng.uniform();
    return v;
}

Matrix gram(const Matrix& m) { return (m.transpose() * m).eval(); }

} // namespace

Matrix SimplexQpInstance::hessian() const
{
    const Matrix db = d.asDiagonal() * b_mat;
    Matrix h = tau * gram(a) - xi * gram(db);
    // Symmetrize exactly; the two products round differently.
    return (0.5 * (h + h.transpose())).eval();
}

std::shared_ptr<const QuadraticOracle> SimplexQpInstance::objective() const
{
    Vector atb;
    kernels::gemv_t(a, b, atb);
    return std::make_shared<QuadraticOracle>(hessian(), -tau * atb, 0.5 * tau * b.squaredNorm(), declared);
}

CompositeProblem SimplexQpInstance::problem() const
{
    return CompositeProblem(objective(), std::make_shared<SimplexIndicator>());
}

ConstrainedProblem LinConstrQpInstance::problem() const
{
    return ConstrainedProblem(objective.objective(), std::make_shared<SimplexIndicator>(), a_eq, b_eq);
}

std::pair<double, double> extreme_eigenvalues(const Matrix& sym)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(sym), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalFailure("symmetric eigensolve failed");
    const auto& ev = es.eigenvalues();
    return {ev[0], ev[ev.size() - 1]};
}

CurvatureScales calibrate_curvature(const Matrix& q1, const Matrix& q2, double target_upper, double target_lower)
{
    require(target_upper > 0.0 && target_lower > 0.0, "calibrate_curvature: targets must be positive");
    require(q1.rows() == q1.cols() && q2.rows() == q2.cols(), "calibrate_curvature: matrices must be square");
    require_same_size(q1.rows(), q2.rows(), "calibrate_curvature");
    const double target = target_upper / target_lower;

    // ratio(r) = lambda_max / -lambda_min of r Q2 - Q1; nondecreasing in r
    // wherever it is defined (lambda_max > 0 > lambda_min).
    struct Eval {
        double lo, hi;
        bool valid() const { return hi > 0.0 && lo < 0.0; }
        double ratio() const { return hi / -lo; }
    };
    auto eval = [&](double r) {
        const auto [lo, hi] = extreme_eigenvalues(r * q2 - q1);
        return Eval{lo, hi};
    };

    const double n1 = q1.norm();
    const double n2 = q2.norm();
    require(n1 > 0.0 && n2 > 0.0, "calibrate_curvature: Q1 and Q2 must be nonzero");

    // Bracket [r_lo, r_hi] with ratio(r_lo) < target < ratio(r_hi), stepping
    // in log space from the scale-balanced point.
    double r_lo = n1 / n2;
    double r_hi = r_lo;
    auto below = [&](const Eval& e) { return !e.valid() ? e.hi <= 0.0 : e.ratio() < target; };
    auto above = [&](const Eval& e) { return !e.valid() ? e.lo >= 0.0 : e.ratio() > target; };
    Eval e = eval(r_lo);
    int guard = 0;
    while (!below(e)) {
        if (++guard > 200 || (!e.valid() && e.lo >= 0.0 && e.hi <= 0.0)) {
            throw InvalidInput("calibrate_curvature: target ratio M/m unattainable for this (Q1, Q2); re-draw");
        }
        r_lo /= 4.0;
        e = eval(r_lo);
    }
    e = eval(r_hi);
    guard = 0;
    while (!above(e)) {
        if (++guard > 200 || (!e.valid() && e.lo >= 0.0 && e.hi <= 0.0)) {
            throw InvalidInput("calibrate_curvature: target ratio M/m unattainable for this (Q1, Q2); re-draw");
        }
        r_hi *= 4.0;
        e = eval(r_hi);
    }

    double r = std::sqrt(r_lo * r_hi);
    Eval best = eval(r);
    for (int it = 0; it < 200; ++it) {
        if (best.valid() && std::abs(best.ratio() / target - 1.0) <= 1e-12) break;
        if (below(best)) r_lo = r;
        else r_hi = r;
        if (r_hi / r_lo - 1.0 <= 1e-15) break;
        r = std::sqrt(r_lo * r_hi);
        best = eval(r);
    }
    if (!best.valid() || std::abs(best.ratio() / target - 1.0) > 1e-7) {
        throw InvalidInput("calibrate_curvature: target ratio M/m unattainable for this (Q1, Q2); re-draw");
    }

    const double xi = target_lower / -best.lo;
    const double tau = r * xi;
    // Verify on the assembled Hessian.
    const auto [lo, hi] = extreme_eigenvalues(tau * q2 - xi * q1);
    if (std::abs(hi / target_upper - 1.0) > 1e-6 || std::abs(-lo / target_lower - 1.0) > 1e-6) {
        throw NumericalFailure("calibrate_curvature: calibrated Hessian misses the targets");
    }
    return {xi, tau};
}

SimplexQpInstance gen_simplex_qp(Index l, Index n, double upper, double lower, std::uint64_t seed)
{
    require(l >= 1 && n >= 1, "gen_simplex_qp: dimensions must be positive");
    require(lower > 0.0 && upper >= lower, "gen_simplex_qp: need M >= m > 0");
    Rng rng(seed);
    SimplexQpInstance inst;
    inst.seed = seed;
    inst.declared = {lower, upper};
    inst.a = uniform_matrix(rng, l, n);
    inst.b_mat = uniform_matrix(rng, n, n);
    inst.b = uniform_vector(rng, l);
    inst.d.resize(n);
    for (Index i = 0; i < n; ++i) inst.d[i] = static_cast<double>(rng.uniform_int(1, 1000));

    const Matrix db = inst.d.asDiagonal() * inst.b_mat;
    const CurvatureScales s = calibrate_curvature(gram(db), gram(inst.a), upper, lower);
    inst.xi = s.xi;
    inst.tau = s.tau;
    return inst;
}

LinConstrQpInstance gen_linconstr_qp(Index l, Index n, Index l_eq, double upper, double lower, std::uint64_t seed)
{
    require(l_eq >= 1, "gen_linconstr_qp: l_eq must be >= 1");
    LinConstrQpInstance inst;
    inst.objective = gen_simplex_qp(l, n, upper, lower, seed);

    // Continue a stream derived from the same seed for the constraint data.
    Rng rng(seed ^ 0xc0ffee5eedULL);
    inst.a_eq = uniform_matrix(rng, l_eq, n);
    // Uniform point on the simplex: normalized exponentials.
    inst.z_feas.resize(n);
    for (Index i = 0; i < n; ++i) {
        double u;
        do {
            u = rng.uniform();
        } while (u <= 0.0);
        inst.z_feas[i] = -std::log(u);
    }
    inst.z_feas /= inst.z_feas.sum();
    kernels::gemv(inst.a_eq, inst.z_feas, inst.b_eq);
    return inst;
}

} // namespace proxpen
