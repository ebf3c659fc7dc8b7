#pragma once

#include <utility>

#include "dpalm/problem.hpp"
#include "dpalm/types.hpp"

namespace dpalm {

/// Componentwise clamp(soft_threshold(u, t*lambda), lower, upper).
/// lambda = 0 reduces to box projection.
Vector prox_box_l1(const Vector& u, double t, double lambda,
                   const Vector& lower, const Vector& upper);

/// Prox of the base regularizer evaluated at u with step t.
Vector prox_regularizer(const Vector& u, double t, const Regularizer& base);

/// Prox with step t of h(.) + (rho/2)||. - anchor||^2, solved by rescaling:
/// prox with step t/(1+t*rho) of the base at (u + t*rho*anchor)/(1+t*rho).
/// rho = 0 reduces to the plain base prox.
Vector prox_shifted(const Vector& u, double t, double rho, const Vector& anchor,
                    const Regularizer& base);

/// Moreau envelope of the l1 norm and its gradient.
/// value = sum_i Huber_nu(u_i), gradient_i = clamp(u_i/nu, -1, 1).
std::pair<double, Vector> moreau_l1(const Vector& u, double nu);

/// Moreau-smoothed outer function l^nu with value and gradient oracles.
/// The gradient is derived from the prox identity (u - prox_{nu l}(u))/nu, so
/// value and gradient always agree.
struct SmoothedOuter {
    OuterKind kind = OuterKind::L1;
    double nu = 1.0;

    double value(const Vector& u) const;
    Vector gradient(const Vector& u) const;
    /// Unsmoothed outer value l(u).
    double exact_value(const Vector& u) const;
};

SmoothedOuter make_smoothed_outer(OuterKind kind, double nu);

/// Local model of a composite objective at an anchor point: caches c(anchor)
/// and J_c(anchor) and exposes u(x) = c(anchor) + J_c(anchor) (x - anchor).
struct ProxLinearModel {
    Vector anchor;
    Vector inner_at_anchor;   // c(anchor)
    Matrix jacobian_at_anchor; // J_c(anchor), p x d

    Vector linearized(const Vector& x) const {
        return inner_at_anchor + jacobian_at_anchor * (x - anchor);
    }
};

/// Requires the objective to be CompositeF.
ProxLinearModel build_prox_linear(const ProblemInstance& inst, const Vector& anchor);

/// f^nu(x; anchor) = l^nu(u(x)) and its gradient J_c(anchor)^T grad l^nu(u(x)).
std::pair<double, Vector> smoothed_composite_value_grad(const ProxLinearModel& model,
                                                        const SmoothedOuter& outer,
                                                        const Vector& x);

/// Prox-linear value through the unsmoothed outer, f^0(x; anchor).
double prox_linear_value(const ProxLinearModel& model, const SmoothedOuter& outer,
                         const Vector& x);

} // namespace dpalm
