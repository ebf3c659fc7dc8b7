#pragma once

#include <functional>
#include <optional>
#include <utility>

#include "dpalm/problem.hpp"
#include "dpalm/types.hpp"

namespace dpalm {

/// Multiplier pair for the affine and inequality blocks; z stays >= 0.
struct DualState {
    Vector y; // n
    Vector z; // m
};

DualState zero_dual(const ProblemInstance& inst);

/// Which subproblem machinery applies to the objective.
enum class CaseTag { SmoothObjective, CompositeObjective, GeneralObjective };

/// Proximal-AL subproblem split into a smooth (or subgradient) part and a
/// prox-friendly part h + (prox_shift/2)||x - anchor||^2. The prox part is
/// mu-strongly convex with mu = prox_shift.
struct SubproblemSplit {
    std::function<double(const Vector&)> smooth_value;
    std::function<Vector(const Vector&)> smooth_grad; // a subgradient in the general case
    Regularizer prox_reg;
    Vector prox_anchor;
    double prox_shift = 0.0;
    double mu = 0.0;
    double lipschitz_estimate = 0.0; // not a certified bound; the line search compensates
};

/// Augmented Lagrangian value L_beta(x; y, z). x must lie in the box domain.
double al_value(const ProblemInstance& inst, const Vector& x, const DualState& dual,
                double beta);

/// Gradient of the Case-I smooth part:
/// grad f(x) + A^T(y + beta(Ax-b)) + J_g(x)^T [z + beta g(x)]_+ + rho(x - x_k).
Vector al_grad_smooth_part(const ProblemInstance& inst, const Vector& x,
                           const DualState& dual, double beta, const Vector& x_k,
                           double rho);

/// Builds the per-case subproblem split at the anchor x_k with penalty beta.
/// nu is the Moreau smoothing parameter, used only by the composite case.
SubproblemSplit assemble_subproblem(CaseTag tag, const ProblemInstance& inst,
                                    const DualState& dual, double beta, const Vector& x_k,
                                    double rho, double nu = 0.0);

/// Dual candidates from the current iterate:
/// ybar = y + beta(Ax-b), zbar = [z + beta g(x)]_+.
std::pair<Vector, Vector> dual_candidates(const ProblemInstance& inst, const Vector& x_plus,
                                          const DualState& dual, double beta);

struct KktResidual {
    double pres = 0.0;
    double dres = 0.0;
    double cs = 0.0;
};

/// Residuals of the KKT system at (x, ybar, zbar).
///   pres = sqrt(||Ax-b||^2 + ||[g(x)]_+||^2)
///   cs   = sum_i |zbar_i g_i(x)|
///   dres = ||w - 2 rho dx||, where w is the inner solver's stationarity
///          certificate and dx = x^{k+1} - x^k.
KktResidual kkt_residuals(const ProblemInstance& inst, const Vector& x, const Vector& ybar,
                          const Vector& zbar, const Vector& certificate, const Vector& dx,
                          double rho);

/// Primal feasibility norm sqrt(||Ax-b||^2 + ||[g(x)]_+||^2).
double primal_residual(const ProblemInstance& inst, const Vector& x);

} // namespace dpalm
