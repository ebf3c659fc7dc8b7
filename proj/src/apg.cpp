#include "dpalm/apg.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dpalm/prox.hpp"

namespace dpalm {

namespace {
constexpr double kDivergenceLimit = 1e30;
}

double accel_coefficient(double A_t, double mu, double L) {
    if (!(L > 0.0)) throw std::invalid_argument("smoothness estimate must be positive");
    if (A_t < 0.0 || mu < 0.0) throw std::invalid_argument("negative accumulator or modulus");
    const double gamma = 2.0 * (1.0 + mu * A_t) / L;
    return 0.5 * (gamma + std::sqrt(gamma * (gamma + 4.0 * A_t)));
}

GradientMapResult gradient_map(const SubproblemSplit& split, const Vector& y,
                               const Vector& grad_y, double L) {
    if (!(L > 0.0)) throw std::invalid_argument("smoothness estimate must be positive");
    GradientMapResult out;
    out.point = prox_shifted(y - grad_y / L, 1.0 / L, split.prox_shift, split.prox_anchor,
                             split.prox_reg);
    out.grad_at_point = split.smooth_grad(out.point);
    out.subgrad = L * (y - out.point) + out.grad_at_point - grad_y;
    return out;
}

ApgState make_apg_state(const Vector& x0, double L0) {
    ApgState state;
    state.x = x0;
    state.v = x0;
    state.x0 = x0;
    state.s = Vector::Zero(x0.size());
    state.trial_L = L0;
    return state;
}

LineSearchOutcome line_search_step(const SubproblemSplit& split, ApgState& state, double mu,
                                   double gamma_u, double gamma_d) {
    if (!(gamma_u > 1.0) || !(gamma_d >= gamma_u))
        throw std::invalid_argument("line search requires gamma_d >= gamma_u > 1");
    LineSearchOutcome out;
    double L = state.trial_L;
    for (;;) {
        if (L > kDivergenceLimit)
            throw std::runtime_error(
                "line search diverged: smoothness estimate exceeded 1e30");
        const double a = accel_coefficient(state.A, mu, L);
        const Vector y =
            state.A == 0.0 ? state.v : Vector((state.A * state.x + a * state.v) / (state.A + a));
        const Vector grad_y = split.smooth_grad(y);
        ++state.grad_evals;
        GradientMapResult map = gradient_map(split, y, grad_y, L);
        ++state.grad_evals;
        const Vector diff = y - map.point;
        if (map.subgrad.dot(diff) >= map.subgrad.squaredNorm() / L) {
            out.L = L;
            out.a = a;
            out.y = y;
            out.x_next = std::move(map.point);
            out.grad_y = grad_y;
            out.grad_x_next = std::move(map.grad_at_point);
            out.certificate = std::move(map.subgrad);
            break;
        }
        L *= gamma_u;
        ++out.backtracks;
    }
    state.trial_L = out.L / gamma_d;
    return out;
}

Vector estimate_seq_update(const SubproblemSplit& split, ApgState& state, double a,
                           const Vector& grad_x_next) {
    state.s += a * grad_x_next;
    state.A += a;
    state.v = prox_shifted(state.x0 - state.s, state.A, split.prox_shift, split.prox_anchor,
                           split.prox_reg);
    return state.v;
}

Vector stationarity_certificate(const Vector& x_next, const Vector& y, double L,
                                const Vector& grad_x_next, const Vector& grad_y) {
    return grad_x_next - grad_y - L * (x_next - y);
}

long apg_iteration_cap(double lipschitz, double mu, double diameter, double delta,
                       double gamma_u) {
    if (!(lipschitz > 0.0) || !(mu > 0.0) || !(diameter > 0.0) || !(delta > 0.0) ||
        !(gamma_u > 1.0))
        throw std::invalid_argument("iteration cap requires positive inputs");
    const double arg = 3.0 * (1.0 + gamma_u) * diameter * lipschitz *
                       std::sqrt(2.0 * gamma_u * lipschitz / mu) / (2.0 * delta);
    if (!(arg > 0.0)) throw std::invalid_argument("nonpositive argument to log");
    const double lead = std::max(1.0 / std::log(2.0), 2.0 * std::sqrt(gamma_u * lipschitz / (2.0 * mu)));
    return static_cast<long>(std::ceil(lead * std::log(arg))) + 1;
}

ApgResult apg_minimize(const SubproblemSplit& split, const ApgConfig& cfg, const Vector& x0,
                       const ApgObserver& observer) {
    if (!(split.mu > 0.0))
        throw std::invalid_argument("prox part must be strongly convex");
    if (!(cfg.delta > 0.0)) throw std::invalid_argument("target stationarity must be positive");

    long max_iters = cfg.max_iters;
    if (max_iters <= 0) {
        max_iters = 1000000;
        const double D = box_diameter(split.prox_reg);
        if (std::isfinite(split.lipschitz_estimate) && split.lipschitz_estimate > 0.0 &&
            std::isfinite(D) && D > 0.0) {
            const long cap = apg_iteration_cap(split.lipschitz_estimate, split.mu, D,
                                               cfg.delta, cfg.gamma_u);
            max_iters = std::max<long>(10 * std::max<long>(cap, 1), 1);
        }
    }

    ApgState state = make_apg_state(x0, cfg.L0 > 0.0 ? cfg.L0 : 1.0);
    ApgResult result;
    result.x = x0;

    for (long t = 0; t < max_iters; ++t) {
        LineSearchOutcome step = line_search_step(split, state, split.mu, cfg.gamma_u,
                                                  cfg.gamma_d);
        state.x = step.x_next;
        state.t = t + 1;
        estimate_seq_update(split, state, step.a, step.grad_x_next);
        if (observer) observer(t, state.x, step.L);

        result.stats.iters = t + 1;
        result.stats.final_L = step.L;
        if (step.certificate.norm() <= cfg.delta) {
            result.x = std::move(state.x);
            result.certificate = std::move(step.certificate);
            result.stats.converged = true;
            result.stats.grad_evals = state.grad_evals;
            return result;
        }
        result.x = state.x;
        result.certificate = std::move(step.certificate);
    }
    result.stats.grad_evals = state.grad_evals;
    result.stats.converged = false;
    return result;
}

} // namespace dpalm
