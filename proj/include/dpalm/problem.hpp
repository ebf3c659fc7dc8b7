#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "dpalm/types.hpp"

namespace dpalm {

/// Affine constraint block Ax = b. n may be zero (no affine constraints).
struct AffineBlock {
    Matrix A;        // n x d
    Vector b;        // n
    double ata_norm = 0.0; // upper estimate of the spectral norm of A^T A

    Index rows() const { return A.rows(); }
    Vector residual(const Vector& x) const {
        if (rows() == 0) return Vector::Zero(0);
        return A * x - b;
    }
};

/// Smooth convex inequality block g(x) <= 0 with analytic metadata.
struct IneqBlock {
    // Returns (g(x), J_g(x)) with shapes (m, m x d).
    std::function<std::pair<Vector, Matrix>(const Vector&)> oracle;
    Index m = 0;
    double smoothness = 0.0;   // L_g, per-component gradient Lipschitz bound
    double value_grad_bound = 0.0; // B_g, bound on max{|g_i|, ||grad g_i||} over the domain
};

enum class RegKind { BoxIndicator, BoxL1, ZeroOnBox };

/// Prox-friendly regularizer: a box domain, optionally plus lambda*||x||_1.
/// ZeroOnBox keeps h identically zero (bounds may be infinite) and exists for
/// unconstrained inner solves and tests.
struct Regularizer {
    RegKind kind = RegKind::BoxIndicator;
    double lambda = 0.0;
    Vector lower; // per-coordinate lower bounds, may be -inf
    Vector upper; // per-coordinate upper bounds, may be +inf

    bool contains(const Vector& x, double tol = 0.0) const {
        for (Index i = 0; i < x.size(); ++i)
            if (x[i] < lower[i] - tol || x[i] > upper[i] + tol) return false;
        return true;
    }

    // h(x) ignoring the box indicator part; callers check membership first.
    double soft_value(const Vector& x) const {
        return kind == RegKind::BoxL1 ? lambda * x.lpNorm<1>() : 0.0;
    }
};

Regularizer make_box(const Vector& lower, const Vector& upper);
Regularizer make_box(Index d, double lo, double hi);
Regularizer make_box_l1(Index d, double lo, double hi, double lambda);
Regularizer make_free(Index d); // h = 0 on all of R^d

/// Euclidean diameter of the box, sqrt(sum (u_i - l_i)^2).
double box_diameter(const Regularizer& reg);

/// Smooth objective: f with a full gradient oracle (Case I).
struct SmoothF {
    std::function<double(const Vector&)> value;
    std::function<Vector(const Vector&)> gradient;
    double lipschitz = 0.0; // L_f
};

enum class OuterKind { L1, Abs };

/// Compositional objective f = l(c(x)) with convex nonsmooth outer l (Case II).
struct CompositeF {
    OuterKind outer = OuterKind::L1;
    std::function<Vector(const Vector&)> inner_value;    // c : R^d -> R^p
    std::function<Matrix(const Vector&)> inner_jacobian; // J_c : p x d
    Index inner_dim = 0;          // p
    double outer_lipschitz = 0.0; // M_l
    double inner_smoothness = 0.0; // L_c, Lipschitz constant of J_c
};

/// General weakly-convex objective with one-subgradient oracle (Case III).
struct GeneralF {
    std::function<double(const Vector&)> value;
    std::function<Vector(const Vector&)> subgradient;
    double subgradient_bound = 0.0; // \hat B_f
};

using ObjectiveOracle = std::variant<SmoothF, CompositeF, GeneralF>;

struct ProblemInstance {
    Index dim = 0;
    ObjectiveOracle objective;
    AffineBlock affine;
    IneqBlock ineq;
    Regularizer reg;
    double rho = 0.0; // weak-convexity constant of f
    std::optional<Vector> x_feas;
};

/// Value of f at x through the active objective variant (composite uses the
/// unsmoothed outer function).
double objective_value(const ProblemInstance& inst, const Vector& x);

/// Shape-checked evaluation of the inequality block.
std::pair<Vector, Matrix> eval_ineq_block(const ProblemInstance& inst, const Vector& x);

/// Collects every dimensional/invariant violation; empty result means valid.
/// Never throws; oracle failures are reported as violations.
std::vector<std::string> validate_instance(const ProblemInstance& inst);

} // namespace dpalm
