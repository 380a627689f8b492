#include "proxpen/penalty.hpp"

#include "proxpen/kernels.hpp"
#include "proxpen/random.hpp"

#include <cmath>
#include <memory>

namespace proxpen {

namespace {

class PenaltyOracle final : public SmoothOracle {
public:
    PenaltyOracle(const ConstrainedProblem& cp, double c) : f_(cp.f), a_(&cp.a), b_(&cp.b), c_(c)
    {
        const Curvature cf = cp.f->curvature();
        curvature_ = {cf.lower, cf.upper + c * cp.a_norm_sq};
    }

    Index dimension() const override { return f_->dimension(); }
    Curvature curvature() const override { return curvature_; }

    double value(const Vector& z) const override
    {
        return f_->value(z) + 0.5 * c_ * residual(z).squaredNorm();
    }

    void gradient(const Vector& z, Vector& grad) const override { value_and_gradient(z, grad); }

    double value_and_gradient(const Vector& z, Vector& grad) const override
    {
        const double fv = f_->value_and_gradient(z, grad);
        const Vector r = residual(z);
        if (c_ != 0.0) {
            Vector atr;
            kernels::gemv_t(*a_, r, atr);
            grad += c_ * atr;
        }
        return fv + 0.5 * c_ * r.squaredNorm();
    }

private:
    Vector residual(const Vector& z) const
    {
        Vector r;
        kernels::gemv(*a_, z, r);
        return r - *b_;
    }

    std::shared_ptr<const SmoothOracle> f_;
    const Matrix* a_;
    const Vector* b_;
    double c_;
    Curvature curvature_;
};

} // namespace

void PenaltyConfig::validate() const
{
    require(rho_hat > 0.0 && eta_hat > 0.0, "PenaltyConfig: tolerances must be positive");
    require(c_hat >= 0.0, "PenaltyConfig: c_hat must be >= 0");
    require(sigma > 0.0 && sigma < 1.0, "PenaltyConfig: sigma must lie in (0, 1)");
    require(max_doublings >= 1, "PenaltyConfig: max_doublings must be >= 1");
}

long long PenaltyStats::total_inner() const
{
    long long s = 0;
    for (const auto& l : loops) s += l.inner;
    return s;
}

// The oracle keeps pointers into cp; cp must outlive the returned problem.
CompositeProblem build_penalty(const ConstrainedProblem& cp, double c)
{
    require(c >= 0.0, "build_penalty: c must be >= 0");
    return CompositeProblem(std::make_shared<PenaltyOracle>(cp, c), cp.h);
}

ToleranceMap tolerance_map(double rho_hat, double m, double M)
{
    require(rho_hat > 0.0 && m > 0.0 && M > 0.0, "tolerance_map: inputs must be positive");
    return {rho_hat / 4.0, rho_hat * rho_hat / (32.0 * (M + 2.0 * m))};
}

double spectral_norm_sq(const Matrix& a, double tol, int max_power_iters)
{
    require(a.size() > 0 && a.cwiseAbs().maxCoeff() > 0.0, "spectral_norm_sq: A must be nonzero");
    Rng rng(0x5eedULL);
    Vector v(a.cols());
    for (Index i = 0; i < v.size(); ++i) v[i] = 1.0 + 0.01 * rng.normal();
    v.normalize();

    Vector av;
    Vector w;
    double estimate = 0.0;
    for (int it = 0; it < max_power_iters; ++it) {
        kernels::gemv(a, v, av);
        const double rayleigh = av.squaredNorm();
        kernels::gemv_t(a, av, w);
        const double wn = w.norm();
        if (wn == 0.0) throw NumericalFailure("spectral_norm_sq: start vector in the null space");
        v = w / wn;
        if (it > 0 && std::abs(rayleigh - estimate) <= tol * rayleigh) return 1.01 * rayleigh;
        estimate = rayleigh;
    }
    throw NumericalFailure("spectral_norm_sq: power iteration did not converge");
}

QpAippResult qp_aipp(const ConstrainedProblem& cp, const Vector& z0, const PenaltyConfig& config)
{
    config.validate();
    require_same_size(z0.size(), cp.dimension(), "qp_aipp: z0");
    require(cp.h->in_domain(z0), "qp_aipp: z0 outside dom h");
    const Curvature cf = cp.f->curvature();
    require(cf.lower > 0.0 && cf.upper > 0.0, "qp_aipp: need m_f > 0 and L_f > 0");

    QpAippResult result;
    PenaltyStats& stats = result.stats;
    stats.lambda = 1.0 / (2.0 * cf.lower);
    double c = config.c_hat + cf.upper / cp.a_norm_sq;
    Vector start = z0;

    for (int loop = 0; loop <= config.max_doublings; ++loop) {
        const CompositeProblem penalized = build_penalty(cp, c);
        const Curvature cc = penalized.smooth->curvature();
        const ToleranceMap tol = tolerance_map(config.rho_hat, cc.lower, cc.upper);

        AippConfig ac;
        ac.lambda = stats.lambda;
        ac.sigma = config.sigma;
        ac.rho_bar = tol.rho_bar;
        ac.eps_bar = tol.eps_bar;
        ac.acg_mode = config.acg_mode;
        ac.max_outer = config.max_outer;
        const AippResult inner = aipp(penalized, start, ac);

        const Vector r = cp.constraint_residual(inner.refined.z_g);
        PenaltyLoop rec;
        rec.c = c;
        rec.upper_curvature = cc.upper;
        rec.rho_bar = tol.rho_bar;
        rec.eps_bar = tol.eps_bar;
        rec.outer = inner.stats.outer;
        rec.inner = inner.stats.inner;
        rec.feasibility = r.norm();
        rec.v_norm = inner.refined.v_g.norm();
        rec.penalized_z = penalized.value(inner.solution.z);
        rec.penalized_zg = penalized.value(inner.refined.z_g);
        stats.loops.push_back(rec);

        if (rec.feasibility <= config.eta_hat) {
            stats.final_c = c;
            result.triple = {inner.refined.z_g, inner.refined.v_g, c * r};
            return result;
        }
        if (config.warm_start) start = inner.refined.z_g;
        c *= 2.0;
    }
    throw IterationLimit("qp_aipp: feasibility not reached within " + std::to_string(config.max_doublings) +
                         " doublings");
}

} // namespace proxpen
