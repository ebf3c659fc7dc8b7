#include "dpalm/al.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "dpalm/prox.hpp"

namespace dpalm {

namespace {

// Multiplier/penalty terms of the AL that are shared by every case.
double constraint_value(const ProblemInstance& inst, const Vector& x, const DualState& dual,
                        double beta) {
    double value = 0.0;
    if (inst.affine.rows() > 0) {
        const Vector r = inst.affine.residual(x);
        value += dual.y.dot(r) + 0.5 * beta * r.squaredNorm();
    }
    if (inst.ineq.m > 0) {
        const Vector g = inst.ineq.oracle(x).first;
        const Vector shifted = (g + dual.z / beta).cwiseMax(0.0);
        value += 0.5 * beta * shifted.squaredNorm() - dual.z.squaredNorm() / (2.0 * beta);
    }
    return value;
}

Vector constraint_grad(const ProblemInstance& inst, const Vector& x, const DualState& dual,
                       double beta) {
    Vector grad = Vector::Zero(inst.dim);
    if (inst.affine.rows() > 0)
        grad += inst.affine.A.transpose() * (dual.y + beta * inst.affine.residual(x));
    if (inst.ineq.m > 0) {
        auto [g, J] = inst.ineq.oracle(x);
        grad += J.transpose() * (dual.z + beta * g).cwiseMax(0.0);
    }
    return grad;
}

double smoothness_tail(const ProblemInstance& inst, const DualState& dual, double beta) {
    const double m = static_cast<double>(inst.ineq.m);
    const double bg = inst.ineq.value_grad_bound;
    const double lg = inst.ineq.smoothness;
    double estimate = beta * (inst.affine.ata_norm + m * bg * (bg + lg));
    if (inst.ineq.m > 0) estimate += std::sqrt(m) * lg * dual.z.norm();
    return estimate;
}

} // namespace

DualState zero_dual(const ProblemInstance& inst) {
    return {Vector::Zero(inst.affine.rows()), Vector::Zero(inst.ineq.m)};
}

double al_value(const ProblemInstance& inst, const Vector& x, const DualState& dual,
                double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("penalty parameter must be positive");
    if (!inst.reg.contains(x)) throw std::domain_error("point outside the box domain");
    const double F = objective_value(inst, x) + inst.reg.soft_value(x);
    return F + constraint_value(inst, x, dual, beta);
}

Vector al_grad_smooth_part(const ProblemInstance& inst, const Vector& x,
                           const DualState& dual, double beta, const Vector& x_k,
                           double rho) {
    const auto* smooth = std::get_if<SmoothF>(&inst.objective);
    if (smooth == nullptr)
        throw std::invalid_argument("al_grad_smooth_part requires a smooth objective");
    Vector grad = smooth->gradient(x) + constraint_grad(inst, x, dual, beta);
    if (rho != 0.0) grad += rho * (x - x_k);
    return grad;
}

SubproblemSplit assemble_subproblem(CaseTag tag, const ProblemInstance& inst,
                                    const DualState& dual, double beta, const Vector& x_k,
                                    double rho, double nu) {
    if (!(beta > 0.0)) throw std::invalid_argument("penalty parameter must be positive");
    if (!(rho > 0.0)) throw std::invalid_argument("proximal weight must be positive");

    SubproblemSplit split;
    split.prox_reg = inst.reg;
    split.prox_anchor = x_k;
    split.prox_shift = rho;
    split.mu = rho;

    switch (tag) {
    case CaseTag::SmoothObjective: {
        const auto* smooth = std::get_if<SmoothF>(&inst.objective);
        if (smooth == nullptr)
            throw std::invalid_argument("case I requires a smooth objective");
        split.smooth_value = [&inst, dual, beta, x_k, rho](const Vector& x) {
            const auto& f = std::get<SmoothF>(inst.objective);
            return f.value(x) + constraint_value(inst, x, dual, beta) +
                   0.5 * rho * (x - x_k).squaredNorm();
        };
        split.smooth_grad = [&inst, dual, beta, x_k, rho](const Vector& x) {
            return al_grad_smooth_part(inst, x, dual, beta, x_k, rho);
        };
        split.lipschitz_estimate = smooth->lipschitz + rho + smoothness_tail(inst, dual, beta);
        break;
    }
    case CaseTag::CompositeObjective: {
        const auto* composite = std::get_if<CompositeF>(&inst.objective);
        if (composite == nullptr)
            throw std::invalid_argument("case II requires a compositional objective");
        if (!(nu > 0.0))
            throw std::invalid_argument("case II requires a positive smoothing parameter");
        auto model = std::make_shared<ProxLinearModel>(build_prox_linear(inst, x_k));
        const SmoothedOuter outer = make_smoothed_outer(composite->outer, nu);
        split.smooth_value = [&inst, dual, beta, model, outer](const Vector& x) {
            const Vector u = model->linearized(x);
            return outer.value(u) + constraint_value(inst, x, dual, beta);
        };
        split.smooth_grad = [&inst, dual, beta, model, outer](const Vector& x) {
            const Vector u = model->linearized(x);
            return Vector(model->jacobian_at_anchor.transpose() * outer.gradient(u) +
                          constraint_grad(inst, x, dual, beta));
        };
        split.lipschitz_estimate =
            model->jacobian_at_anchor.norm() / nu + smoothness_tail(inst, dual, beta);
        break;
    }
    case CaseTag::GeneralObjective: {
        const auto* general = std::get_if<GeneralF>(&inst.objective);
        if (general == nullptr)
            throw std::invalid_argument("case III requires a subgradient oracle");
        split.smooth_value = [&inst, dual, beta, x_k, rho](const Vector& x) {
            const auto& f = std::get<GeneralF>(inst.objective);
            return f.value(x) + constraint_value(inst, x, dual, beta) +
                   0.5 * rho * (x - x_k).squaredNorm();
        };
        split.smooth_grad = [&inst, dual, beta, x_k, rho](const Vector& x) {
            const auto& f = std::get<GeneralF>(inst.objective);
            return Vector(f.subgradient(x) + constraint_grad(inst, x, dual, beta) +
                          rho * (x - x_k));
        };
        split.lipschitz_estimate = std::numeric_limits<double>::infinity();
        break;
    }
    }
    return split;
}

std::pair<Vector, Vector> dual_candidates(const ProblemInstance& inst, const Vector& x_plus,
                                          const DualState& dual, double beta) {
    Vector ybar = dual.y;
    if (inst.affine.rows() > 0) ybar += beta * inst.affine.residual(x_plus);
    Vector zbar(inst.ineq.m);
    if (inst.ineq.m > 0)
        zbar = (dual.z + beta * inst.ineq.oracle(x_plus).first).cwiseMax(0.0);
    return {std::move(ybar), std::move(zbar)};
}

double primal_residual(const ProblemInstance& inst, const Vector& x) {
    double sq = 0.0;
    if (inst.affine.rows() > 0) sq += inst.affine.residual(x).squaredNorm();
    if (inst.ineq.m > 0)
        sq += inst.ineq.oracle(x).first.cwiseMax(0.0).squaredNorm();
    return std::sqrt(sq);
}

KktResidual kkt_residuals(const ProblemInstance& inst, const Vector& x, const Vector& ybar,
                          const Vector& zbar, const Vector& certificate, const Vector& dx,
                          double rho) {
    (void)ybar;
    KktResidual res;
    res.pres = primal_residual(inst, x);
    res.cs = 0.0;
    if (inst.ineq.m > 0) {
        const Vector g = inst.ineq.oracle(x).first;
        res.cs = (zbar.array() * g.array()).abs().sum();
    }
    res.dres = (certificate - 2.0 * rho * dx).norm();
    return res;
}

} // namespace dpalm
