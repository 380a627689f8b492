#pragma once

#include "proxpen/types.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

namespace proxpen {

// Smooth part g of a composite objective: value, gradient and the curvature
// pair (m, M). Implementations are immutable and safe to share across threads.
class SmoothOracle {
public:
    virtual ~SmoothOracle() = default;

    virtual Index dimension() const = 0;
    virtual Curvature curvature() const = 0;
    virtual double value(const Vector& z) const = 0;
    virtual void gradient(const Vector& z, Vector& grad) const = 0;

    // Overridden where value and gradient share work (e.g. one mat-vec).
    virtual double value_and_gradient(const Vector& z, Vector& grad) const;

    Vector gradient(const Vector& z) const;
};

// Closed convex h with an exact prox. value() returns +inf outside dom h.
class ProxableConvex {
public:
    virtual ~ProxableConvex() = default;

    virtual double value(const Vector& z) const = 0;
    // out = argmin_u { h(u) + |u - x|^2 / (2t) }
    virtual void prox(double t, const Vector& x, Vector& out) const = 0;
    virtual double strong_convexity() const { return 0.0; }

    Vector prox(double t, const Vector& x) const;
    bool in_domain(const Vector& z) const;
};

// g(z) = 0.5 z^T H z + <c, z> + k with a declared curvature pair.
class QuadraticOracle final : public SmoothOracle {
public:
    QuadraticOracle(Matrix hessian, Vector linear, double constant, Curvature curvature);

    Index dimension() const override { return linear_.size(); }
    Curvature curvature() const override { return curvature_; }
    double value(const Vector& z) const override;
    void gradient(const Vector& z, Vector& grad) const override;
    using SmoothOracle::gradient;
    double value_and_gradient(const Vector& z, Vector& grad) const override;

    const Matrix& hessian() const { return hessian_; }
    const Vector& linear() const { return linear_; }
    double constant() const { return constant_; }

private:
    Matrix hessian_;
    Vector linear_;
    double constant_;
    Curvature curvature_;
};

// Oracle assembled from callables; mostly for tests and small examples.
class FunctionOracle final : public SmoothOracle {
public:
    using ValueFn = std::function<double(const Vector&)>;
    using GradFn = std::function<void(const Vector&, Vector&)>;

    FunctionOracle(Index n, ValueFn value, GradFn grad, Curvature curvature);

    Index dimension() const override { return n_; }
    Curvature curvature() const override { return curvature_; }
    double value(const Vector& z) const override;
    void gradient(const Vector& z, Vector& grad) const override;
    using SmoothOracle::gradient;

private:
    Index n_;
    ValueFn value_;
    GradFn grad_;
    Curvature curvature_;
};

// scale * g(z) + (kappa/2) |z - center|^2. This is the smooth half of a
// proximal subproblem; it is convex once kappa >= scale * m.
class ShiftedOracle final : public SmoothOracle {
public:
    ShiftedOracle(std::shared_ptr<const SmoothOracle> base, double scale, double kappa, Vector center);

    Index dimension() const override { return base_->dimension(); }
    Curvature curvature() const override;
    double value(const Vector& z) const override;
    void gradient(const Vector& z, Vector& grad) const override;
    using SmoothOracle::gradient;
    double value_and_gradient(const Vector& z, Vector& grad) const override;

private:
    std::shared_ptr<const SmoothOracle> base_;
    double scale_;
    double kappa_;
    Vector center_;
};

class ZeroFunction final : public ProxableConvex {
public:
    double value(const Vector&) const override { return 0.0; }
    void prox(double, const Vector& x, Vector& out) const override { out = x; }
    using ProxableConvex::prox;
};

// Indicator of the unit simplex; its prox is the Euclidean projection.
class SimplexIndicator final : public ProxableConvex {
public:
    double value(const Vector& z) const override;
    void prox(double t, const Vector& x, Vector& out) const override;
    using ProxableConvex::prox;
};

// weight * |z|_1; prox is soft thresholding.
class L1Norm final : public ProxableConvex {
public:
    explicit L1Norm(double weight);
    double value(const Vector& z) const override;
    void prox(double t, const Vector& x, Vector& out) const override;
    using ProxableConvex::prox;

private:
    double weight_;
};

// phi = g + h.
struct CompositeProblem {
    CompositeProblem(std::shared_ptr<const SmoothOracle> smooth, std::shared_ptr<const ProxableConvex> convex);

    Index dimension() const { return smooth->dimension(); }
    double value(const Vector& z) const;

    std::shared_ptr<const SmoothOracle> smooth;
    std::shared_ptr<const ProxableConvex> convex;
};

// min f(z) + h(z) s.t. Az = b.
struct ConstrainedProblem {
    // a_norm_sq <= 0 means "estimate |A|^2 by power iteration".
    ConstrainedProblem(std::shared_ptr<const SmoothOracle> f, std::shared_ptr<const ProxableConvex> h, Matrix a,
                       Vector b, double a_norm_sq = 0.0);

    Index dimension() const { return f->dimension(); }
    Vector constraint_residual(const Vector& z) const;

    std::shared_ptr<const SmoothOracle> f;
    std::shared_ptr<const ProxableConvex> h;
    Matrix a;
    Vector b;
    double a_norm_sq;
};

// g(z) + <grad g(z), u - z>
double linearization(const SmoothOracle& oracle, const Vector& z, const Vector& u);

struct CurvatureViolation {
    Vector z;
    Vector u;
    double gap;   // g(u) - linearization at z
    double lower; // -(m/2)|u - z|^2
    double upper; // (M/2)|u - z|^2
};

struct CurvatureReport {
    int samples = 0;
    std::vector<CurvatureViolation> violations;
    bool ok() const { return violations.empty(); }
};

// Draws `count` standard normal points and maps them into dom h through
// prox(1, .).
std::vector<Vector> sample_domain(const ProxableConvex& h, Index n, int count, std::uint64_t seed);

// Samples pairs in dom h (or R^n if h is null) and records any violation of
// the declared curvature pair beyond 1e-8 * (1 + |g(u)|).
CurvatureReport check_curvature(const SmoothOracle& oracle, int sample_count, std::uint64_t seed,
                                const ProxableConvex* domain = nullptr);
CurvatureReport check_curvature(const SmoothOracle& oracle, Curvature declared, int sample_count,
                                std::uint64_t seed, const ProxableConvex* domain = nullptr);

// Sampled check of fn(u) >= fn(p) + <s, u - p> - eps over `points`, with
// slack 1e-8 * (1 + |fn(u)|). Points outside dom fn are skipped.
bool epsilon_subgradient_holds(const std::function<double(const Vector&)>& fn, const Vector& p, const Vector& s,
                               double eps, const std::vector<Vector>& points);

// s in the eps-subdifferential of h at p, checked on random domain samples
// plus points pushed along s. Necessary, not sufficient.
bool subgrad_membership(const ProxableConvex& h, const Vector& p, const Vector& s, double eps, int samples,
                        std::uint64_t seed);

} // namespace proxpen
