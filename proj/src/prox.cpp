#include "dpalm/prox.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dpalm {

Vector prox_box_l1(const Vector& u, double t, double lambda,
                   const Vector& lower, const Vector& upper) {
    if (!(t > 0.0)) throw std::invalid_argument("prox step must be positive");
    if (lambda < 0.0) throw std::invalid_argument("l1 weight must be nonnegative");
    const double shrink = t * lambda;
    Vector z(u.size());
    for (Index i = 0; i < u.size(); ++i) {
        const double soft = std::copysign(std::max(std::abs(u[i]) - shrink, 0.0), u[i]);
        z[i] = std::clamp(soft, lower[i], upper[i]);
    }
    return z;
}

Vector prox_regularizer(const Vector& u, double t, const Regularizer& base) {
    const double lambda = base.kind == RegKind::BoxL1 ? base.lambda : 0.0;
    return prox_box_l1(u, t, lambda, base.lower, base.upper);
}

Vector prox_shifted(const Vector& u, double t, double rho, const Vector& anchor,
                    const Regularizer& base) {
    if (!(t > 0.0)) throw std::invalid_argument("prox step must be positive");
    if (rho < 0.0) throw std::invalid_argument("shift coefficient must be nonnegative");
    if (rho == 0.0) return prox_regularizer(u, t, base);
    const double denom = 1.0 + t * rho;
    return prox_regularizer((u + (t * rho) * anchor) / denom, t / denom, base);
}

std::pair<double, Vector> moreau_l1(const Vector& u, double nu) {
    if (!(nu > 0.0)) throw std::invalid_argument("smoothing parameter must be positive");
    double value = 0.0;
    Vector grad(u.size());
    for (Index i = 0; i < u.size(); ++i) {
        const double a = std::abs(u[i]);
        value += a <= nu ? a * a / (2.0 * nu) : a - 0.5 * nu;
        grad[i] = std::clamp(u[i] / nu, -1.0, 1.0);
    }
    return {value, std::move(grad)};
}

double SmoothedOuter::value(const Vector& u) const { return moreau_l1(u, nu).first; }

Vector SmoothedOuter::gradient(const Vector& u) const {
    // (u - prox_{nu*l}(u))/nu with prox = soft threshold at level nu.
    Vector g(u.size());
    for (Index i = 0; i < u.size(); ++i) {
        const double soft = std::copysign(std::max(std::abs(u[i]) - nu, 0.0), u[i]);
        g[i] = (u[i] - soft) / nu;
    }
    return g;
}

double SmoothedOuter::exact_value(const Vector& u) const { return u.lpNorm<1>(); }

SmoothedOuter make_smoothed_outer(OuterKind kind, double nu) {
    if (!(nu > 0.0 && nu <= 1.0))
        throw std::invalid_argument("smoothing parameter must lie in (0,1]");
    return SmoothedOuter{kind, nu};
}

ProxLinearModel build_prox_linear(const ProblemInstance& inst, const Vector& anchor) {
    const auto* composite = std::get_if<CompositeF>(&inst.objective);
    if (composite == nullptr)
        throw std::invalid_argument("prox-linear model requires a compositional objective");
    ProxLinearModel model;
    model.anchor = anchor;
    model.inner_at_anchor = composite->inner_value(anchor);
    model.jacobian_at_anchor = composite->inner_jacobian(anchor);
    return model;
}

std::pair<double, Vector> smoothed_composite_value_grad(const ProxLinearModel& model,
                                                        const SmoothedOuter& outer,
                                                        const Vector& x) {
    const Vector u = model.linearized(x);
    return {outer.value(u), model.jacobian_at_anchor.transpose() * outer.gradient(u)};
}

double prox_linear_value(const ProxLinearModel& model, const SmoothedOuter& outer,
                         const Vector& x) {
    return outer.exact_value(model.linearized(x));
}

} // namespace dpalm
