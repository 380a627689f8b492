#include "proxpen/problem.hpp"

#include "proxpen/kernels.hpp"
#include "proxpen/penalty.hpp"
#include "proxpen/random.hpp"
#include "proxpen/simplex.hpp"

#include <cmath>

namespace proxpen {

double SmoothOracle::value_and_gradient(const Vector& z, Vector& grad) const
{
    gradient(z, grad);
    return value(z);
}

Vector SmoothOracle::gradient(const Vector& z) const
{
    Vector g;
    gradient(z, g);
    return g;
}

Vector ProxableConvex::prox(double t, const Vector& x) const
{
    Vector out;
    prox(t, x, out);
    return out;
}

bool ProxableConvex::in_domain(const Vector& z) const { return std::isfinite(value(z)); }

QuadraticOracle::QuadraticOracle(Matrix hessian, Vector linear, double constant, Curvature curvature)
    : hessian_(std::move(hessian)), linear_(std::move(linear)), constant_(constant), curvature_(curvature)
{
    require(hessian_.rows() == hessian_.cols(), "QuadraticOracle: Hessian must be square");
    require_same_size(hessian_.rows(), linear_.size(), "QuadraticOracle");
}

double QuadraticOracle::value(const Vector& z) const
{
    Vector hz;
    return value_and_gradient(z, hz);
}

void QuadraticOracle::gradient(const Vector& z, Vector& grad) const
{
    require_same_size(z.size(), dimension(), "QuadraticOracle::gradient");
    kernels::gemv(hessian_, z, grad);
    grad += linear_;
}

double QuadraticOracle::value_and_gradient(const Vector& z, Vector& grad) const
{
    require_same_size(z.size(), dimension(), "QuadraticOracle::value");
    kernels::gemv(hessian_, z, grad);
    const double v = 0.5 * z.dot(grad) + linear_.dot(z) + constant_;
    grad += linear_;
    return v;
}

FunctionOracle::FunctionOracle(Index n, ValueFn value, GradFn grad, Curvature curvature)
    : n_(n), value_(std::move(value)), grad_(std::move(grad)), curvature_(curvature)
{
}

double FunctionOracle::value(const Vector& z) const
{
    require_same_size(z.size(), n_, "FunctionOracle::value");
    return value_(z);
}

void FunctionOracle::gradient(const Vector& z, Vector& grad) const
{
    require_same_size(z.size(), n_, "FunctionOracle::gradient");
    grad.resize(n_);
    grad_(z, grad);
}

ShiftedOracle::ShiftedOracle(std::shared_ptr<const SmoothOracle> base, double scale, double kappa, Vector center)
    : base_(std::move(base)), scale_(scale), kappa_(kappa), center_(std::move(center))
{
    require(base_ != nullptr, "ShiftedOracle: null base");
    require(scale_ > 0.0 && kappa_ >= 0.0, "ShiftedOracle: need scale > 0, kappa >= 0");
    require_same_size(center_.size(), base_->dimension(), "ShiftedOracle");
}

Curvature ShiftedOracle::curvature() const
{
    const Curvature c = base_->curvature();
    return {std::max(0.0, scale_ * c.lower - kappa_), scale_ * c.upper + kappa_};
}

double ShiftedOracle::value(const Vector& z) const
{
    return scale_ * base_->value(z) + 0.5 * kappa_ * (z - center_).squaredNorm();
}

void ShiftedOracle::gradient(const Vector& z, Vector& grad) const
{
    base_->gradient(z, grad);
    grad = scale_ * grad + kappa_ * (z - center_);
}

double ShiftedOracle::value_and_gradient(const Vector& z, Vector& grad) const
{
    const double v = base_->value_and_gradient(z, grad);
    grad = scale_ * grad + kappa_ * (z - center_);
    return scale_ * v + 0.5 * kappa_ * (z - center_).squaredNorm();
}

double SimplexIndicator::value(const Vector& z) const { return in_simplex(z) ? 0.0 : kInfinity; }

void SimplexIndicator::prox(double, const Vector& x, Vector& out) const { out = project_simplex(x); }

L1Norm::L1Norm(double weight) : weight_(weight) { require(weight >= 0.0, "L1Norm: weight must be >= 0"); }

double L1Norm::value(const Vector& z) const { return weight_ * z.lpNorm<1>(); }

void L1Norm::prox(double t, const Vector& x, Vector& out) const
{
    const double k = t * weight_;
    out = x.unaryExpr([k](double v) { return v > k ? v - k : (v < -k ? v + k : 0.0); });
}

CompositeProblem::CompositeProblem(std::shared_ptr<const SmoothOracle> smooth_part,
                                   std::shared_ptr<const ProxableConvex> convex_part)
    : smooth(std::move(smooth_part)), convex(std::move(convex_part))
{
    require(smooth != nullptr && convex != nullptr, "CompositeProblem: null component");
}

double CompositeProblem::value(const Vector& z) const
{
    const double hv = convex->value(z);
    if (!std::isfinite(hv)) return kInfinity;
    return smooth->value(z) + hv;
}

ConstrainedProblem::ConstrainedProblem(std::shared_ptr<const SmoothOracle> f_, std::shared_ptr<const ProxableConvex> h_,
                                       Matrix a_, Vector b_, double a_norm_sq_)
    : f(std::move(f_)), h(std::move(h_)), a(std::move(a_)), b(std::move(b_)), a_norm_sq(a_norm_sq_)
{
    require(f != nullptr && h != nullptr, "ConstrainedProblem: null component");
    require_same_size(a.cols(), f->dimension(), "ConstrainedProblem: A columns");
    require_same_size(a.rows(), b.size(), "ConstrainedProblem: A rows vs b");
    require(a.size() > 0 && a.cwiseAbs().maxCoeff() > 0.0, "ConstrainedProblem: A must be nonzero");
    if (a_norm_sq <= 0.0) a_norm_sq = spectral_norm_sq(a);
}

Vector ConstrainedProblem::constraint_residual(const Vector& z) const
{
    Vector r;
    kernels::gemv(a, z, r);
    return r - b;
}

double linearization(const SmoothOracle& oracle, const Vector& z, const Vector& u)
{
    require_same_size(z.size(), oracle.dimension(), "linearization: z");
    require_same_size(u.size(), oracle.dimension(), "linearization: u");
    Vector g;
    const double v = oracle.value_and_gradient(z, g);
    return v + g.dot(u - z);
}

std::vector<Vector> sample_domain(const ProxableConvex& h, Index n, int count, std::uint64_t seed)
{
    Rng rng(seed);
    std::vector<Vector> points;
    points.reserve(count);
    Vector x(n);
    for (int k = 0; k < count; ++k) {
        for (Index i = 0; i < n; ++i) x[i] = rng.normal();
        points.push_back(h.prox(1.0, x));
    }
    return points;
}

CurvatureReport check_curvature(const SmoothOracle& oracle, int sample_count, std::uint64_t seed,
                                const ProxableConvex* domain)
{
    return check_curvature(oracle, oracle.curvature(), sample_count, seed, domain);
}

CurvatureReport check_curvature(const SmoothOracle& oracle, Curvature declared, int sample_count,
                                std::uint64_t seed, const ProxableConvex* domain)
{
    require(sample_count >= 1, "check_curvature: sample_count must be >= 1");
    const ZeroFunction whole_space;
    const ProxableConvex& h = domain ? *domain : whole_space;
    const Index n = oracle.dimension();
    const auto zs = sample_domain(h, n, sample_count, seed);
    const auto us = sample_domain(h, n, sample_count, seed ^ 0x9e3779b97f4a7c15ULL);

    CurvatureReport report;
    report.samples = sample_count;
    Vector grad;
    for (int k = 0; k < sample_count; ++k) {
        const Vector& z = zs[k];
        const Vector& u = us[k];
        const double gz = oracle.value_and_gradient(z, grad);
        const double gu = oracle.value(u);
        const double gap = gu - gz - grad.dot(u - z);
        const double d2 = (u - z).squaredNorm();
        const double lower = -0.5 * declared.lower * d2;
        const double upper = 0.5 * declared.upper * d2;
        const double tol = 1e-8 * (1.0 + std::abs(gu));
        if (!(gap >= lower - tol && gap <= upper + tol)) report.violations.push_back({z, u, gap, lower, upper});
    }
    return report;
}

bool epsilon_subgradient_holds(const std::function<double(const Vector&)>& fn, const Vector& p, const Vector& s,
                               double eps, const std::vector<Vector>& points)
{
    const double fp = fn(p);
    for (const Vector& u : points) {
        const double fu = fn(u);
        if (!std::isfinite(fu)) continue;
        if (fu < fp + s.dot(u - p) - eps - 1e-8 * (1.0 + std::abs(fu))) return false;
    }
    return true;
}

bool subgrad_membership(const ProxableConvex& h, const Vector& p, const Vector& s, double eps, int samples,
                        std::uint64_t seed)
{
    require(eps >= 0.0, "subgrad_membership: eps must be >= 0");
    require_same_size(p.size(), s.size(), "subgrad_membership");
    require(h.in_domain(p), "subgrad_membership: p outside dom h");
    auto points = sample_domain(h, p.size(), samples, seed);
    // Pushing along s finds violations that random draws rarely hit.
    for (double step : {0.1, 1.0, 10.0, 100.0}) points.push_back(h.prox(1.0, p + step * s));
    return epsilon_subgradient_holds([&h](const Vector& u) { return h.value(u); }, p, s, eps, points);
}

} // namespace proxpen
