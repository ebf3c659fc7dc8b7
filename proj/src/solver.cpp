#include "dpalm/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dpalm/prox.hpp"

namespace dpalm {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

CaseTag case_from_objective(const ProblemInstance& inst) {
    if (std::holds_alternative<SmoothF>(inst.objective)) return CaseTag::SmoothObjective;
    if (std::holds_alternative<CompositeF>(inst.objective)) return CaseTag::CompositeObjective;
    return CaseTag::GeneralObjective;
}

double split_total_value(const SubproblemSplit& split, const Vector& x) {
    return split.smooth_value(x) + split.prox_reg.soft_value(x) +
           0.5 * split.prox_shift * (x - split.prox_anchor).squaredNorm();
}
} // namespace

double penalty_schedule(long k, double beta0) {
    if (!(beta0 > 0.0)) throw std::invalid_argument("beta0 must be positive");
    return beta0 * std::sqrt(static_cast<double>(k + 1));
}

double damping_schedule(long k, double v0) {
    if (std::isinf(v0)) return kInf;
    if (!(v0 > 0.0)) throw std::invalid_argument("v0 must be positive");
    if (k == 0) return v0;
    const double lg = std::log(static_cast<double>(k + 1));
    return v0 / (std::sqrt(static_cast<double>(k + 1)) * lg * lg);
}

double schedule_beta(const Schedule& schedule, long k) {
    if (schedule.rule == ScheduleRule::SqrtDefault)
        return penalty_schedule(k, schedule.beta0);
    // Alternate rule beta0 (k+1) ln(k+1)^2; clamped below beta0 so the
    // sequence stays nondecreasing through k = 0, 1.
    const double lg = std::log(static_cast<double>(k + 1));
    return schedule.beta0 * std::max(1.0, static_cast<double>(k + 1) * lg * lg);
}

double schedule_v(const Schedule& schedule, long k) {
    if (schedule.rule == ScheduleRule::SqrtDefault) return damping_schedule(k, schedule.v0);
    return schedule.v0;
}

double dual_stepsize(double beta, double v, double pres_plus) {
    if (pres_plus < 0.0) throw std::invalid_argument("primal residual must be nonnegative");
    if (pres_plus == 0.0) return beta; // v/0 = +inf convention
    return std::min(beta, v / pres_plus);
}

DualState dual_update(const DualState& dual, double alpha, double beta, const Vector& x_plus,
                      const ProblemInstance& inst) {
    if (alpha > beta) throw std::invalid_argument("dual stepsize must not exceed beta");
    if (alpha < 0.0) throw std::invalid_argument("dual stepsize must be nonnegative");
    DualState next = dual;
    if (inst.affine.rows() > 0) next.y += alpha * inst.affine.residual(x_plus);
    if (inst.ineq.m > 0) {
        const Vector g = inst.ineq.oracle(x_plus).first;
        next.z += alpha * g.cwiseMax(-dual.z / beta);
    }
    return next;
}

double subproblem_tolerance(CaseTag tag, long k, double eps, double rho, double beta,
                            TolerancePolicy policy, double fixed_tol, double c4_surrogate) {
    const double exactness = std::sqrt(rho / (2.0 * beta));
    if (policy == TolerancePolicy::Fixed) return std::min(fixed_tol, exactness);
    switch (tag) {
    case CaseTag::SmoothObjective:
        return std::min({eps / 8.0, exactness, 1.0});
    case CaseTag::CompositeObjective:
        return std::min({eps / (16.0 * c4_surrogate), exactness, 1.0});
    case CaseTag::GeneralObjective: {
        const double kk = static_cast<double>(k + 2);
        const double lg = std::log(kk);
        return std::min({eps / 4.0, rho * eps / std::sqrt(2.0), 1.0, exactness,
                         1.0 / (beta * kk * lg * lg)});
    }
    }
    return std::min(eps, 1.0);
}

SubproblemOutcome solve_subproblem(CaseTag tag, const ProblemInstance& inst,
                                   const DualState& dual, double beta, const Vector& x_k,
                                   double eps_k, double nu, double rho, const ApgConfig& apg,
                                   double warm_L, long subgrad_cap, bool fixed_smoothness) {
    SubproblemSplit split = assemble_subproblem(tag, inst, dual, beta, x_k, rho, nu);
    SubproblemOutcome out;

    if (tag == CaseTag::GeneralObjective) {
        // Proximal subgradient loop on the rho-strongly convex subproblem.
        Vector x = x_k;
        Vector best = x;
        double best_value = split_total_value(split, x);
        ++out.grad_evals; // value calls count toward the oracle tally
        double G = 0.0;
        long t = 0;
        for (;;) {
            const Vector xi = split.smooth_grad(x);
            ++out.grad_evals;
            G = std::max(G, xi.norm());
            out.gap_bound = 2.0 * G * G / (rho * static_cast<double>(t + 1));
            out.gap_target = eps_k * eps_k / rho;
            if (out.gap_bound <= out.gap_target) break;
            if (t >= subgrad_cap) {
                out.hit_cap = true;
                break;
            }
            const double step = 2.0 / (rho * static_cast<double>(t + 2));
            x = prox_shifted(x - step * xi, step, split.prox_shift, split.prox_anchor,
                             split.prox_reg);
            const double value = split_total_value(split, x);
            ++out.grad_evals;
            if (value < best_value) {
                best_value = value;
                best = x;
            }
            ++t;
        }
        out.x = std::move(best);
        out.iters = t;
        out.final_L = warm_L;
        return out;
    }

    ApgConfig local = apg;
    local.delta = eps_k;
    if (fixed_smoothness) local.L0 = split.lipschitz_estimate;
    else if (warm_L > 0.0) local.L0 = warm_L;
    else if (!(local.L0 > 0.0)) local.L0 = split.lipschitz_estimate;

    ApgResult inner = apg_minimize(split, local, x_k);
    out.x = std::move(inner.x);
    out.certificate = std::move(inner.certificate);
    out.iters = inner.stats.iters;
    out.grad_evals = inner.stats.grad_evals;
    out.final_L = inner.stats.final_L;
    out.hit_cap = !inner.stats.converged;
    return out;
}

const char* to_string(RunStatus status) {
    switch (status) {
    case RunStatus::Converged: return "converged";
    case RunStatus::OuterCap: return "outer-cap";
    case RunStatus::InnerError: return "inner-error";
    }
    return "unknown";
}

Vector default_start(const ProblemInstance& inst) {
    if (inst.x_feas) return *inst.x_feas;
    Vector x = Vector::Zero(inst.dim);
    for (Index i = 0; i < inst.dim; ++i)
        x[i] = std::clamp(x[i], inst.reg.lower[i], inst.reg.upper[i]);
    return x;
}

RunResult dpalm_run(const ProblemInstance& inst, const SolverConfig& cfg,
                    std::optional<Vector> x0, std::optional<DualState> dual0) {
    {
        auto violations = validate_instance(inst);
        if (!violations.empty())
            throw std::invalid_argument("invalid instance: " + violations.front());
    }
    if (!(cfg.eps > 0.0)) throw std::invalid_argument("target accuracy must be positive");

    const double rho = cfg.prox_weight > 0.0 ? cfg.prox_weight : inst.rho;
    const CaseTag tag = cfg.case_tag.value_or(case_from_objective(inst));
    const TolerancePolicy policy = cfg.tol_policy.value_or(
        tag == CaseTag::CompositeObjective ? TolerancePolicy::Fixed : TolerancePolicy::Theory);
    const double fixed_tol = cfg.fixed_tol > 0.0 ? cfg.fixed_tol : cfg.eps / 8.0;
    if (policy == TolerancePolicy::Fixed && fixed_tol > 1.0)
        throw std::invalid_argument("fixed inner tolerance must lie in (0,1]");

    RunResult result;
    result.dres_mode = tag == CaseTag::GeneralObjective ? "gap" : "certificate";
    Vector x = x0 ? std::move(*x0) : default_start(inst);
    if (x.size() != inst.dim) throw std::invalid_argument("start point dimension mismatch");
    if (!inst.reg.contains(x)) throw std::invalid_argument("start point outside the domain");
    DualState dual = dual0 ? std::move(*dual0) : zero_dual(inst);
    if (dual.y.size() != inst.affine.rows() || dual.z.size() != inst.ineq.m)
        throw std::invalid_argument("dual dimension mismatch");
    if (dual.z.size() > 0 && dual.z.minCoeff() < 0.0)
        throw std::invalid_argument("initial z must be nonnegative");

    double warm_L = 0.0;
    long cumulative_grads = 0;
    if (cfg.record_iterates) result.iterates.push_back(x);
    for (long k = 0; k < cfg.max_outer; ++k) {
        const auto tic = std::chrono::steady_clock::now();
        const double beta = schedule_beta(cfg.schedule, k);
        const double v = schedule_v(cfg.schedule, k);
        const double eps_k = subproblem_tolerance(tag, k, cfg.eps, rho, beta, policy,
                                                  fixed_tol, cfg.c4_surrogate);

        SubproblemOutcome sub;
        try {
            sub = solve_subproblem(tag, inst, dual, beta, x, eps_k, cfg.nu, rho, cfg.apg,
                                   warm_L, cfg.subgrad_cap, cfg.fixed_smoothness);
        } catch (const std::exception& e) {
            result.status = RunStatus::InnerError;
            result.message = e.what();
            result.x = std::move(x);
            result.dual = std::move(dual);
            result.k_final = k;
            return result;
        }

        const double pres_plus = primal_residual(inst, sub.x);
        const double alpha = dual_stepsize(beta, v, pres_plus);
        auto [ybar, zbar] = dual_candidates(inst, sub.x, dual, beta);
        const Vector dx = sub.x - x;

        KktResidual kkt;
        if (sub.certificate) {
            kkt = kkt_residuals(inst, sub.x, ybar, zbar, *sub.certificate, dx, rho);
        } else {
            kkt.pres = pres_plus;
            kkt.cs = 0.0;
            if (inst.ineq.m > 0) {
                const Vector g = inst.ineq.oracle(sub.x).first;
                kkt.cs = (zbar.array() * g.array()).abs().sum();
            }
            // Gap-based surrogate: the exact subproblem minimizer x* carries
            // -2 rho (x* - x_k) in the AL subdifferential and lies within
            // sqrt(2 gap / rho) of the iterate.
            kkt.dres = 2.0 * rho * dx.norm() + 2.0 * std::sqrt(2.0 * rho * sub.gap_bound);
        }

        dual = dual_update(dual, alpha, beta, sub.x, inst);
        cumulative_grads += sub.grad_evals;
        if (sub.hit_cap) ++result.inner_cap_hits;
        if (cfg.record_iterates) {
            result.iterates.push_back(sub.x);
            result.duals.push_back(dual);
        }

        const auto toc = std::chrono::steady_clock::now();
        IterationRecord row;
        row.k = k;
        row.beta = beta;
        row.v = v;
        row.alpha = alpha;
        row.pres = kkt.pres;
        row.dres = kkt.dres;
        row.cs = kkt.cs;
        row.inner_iters = sub.iters;
        row.grad_evals = cumulative_grads;
        row.wall_ms = std::chrono::duration<double, std::milli>(toc - tic).count();
        result.trace.push_back(row);

        const double step_norm = dx.norm();
        x = std::move(sub.x);
        warm_L = sub.final_L;
        result.final_residuals = kkt;
        result.k_final = k + 1;

        const bool stop = cfg.metric == StoppingMetric::FullKkt
                              ? std::max({kkt.pres, kkt.dres, kkt.cs}) <= cfg.eps
                              : std::max(kkt.pres, rho * step_norm) <= cfg.eps;
        if (stop) {
            result.status = RunStatus::Converged;
            result.x = std::move(x);
            result.dual = std::move(dual);
            return result;
        }
    }

    result.status = RunStatus::OuterCap;
    result.message = "outer iteration cap reached";
    result.x = std::move(x);
    result.dual = std::move(dual);
    return result;
}

} // namespace dpalm
