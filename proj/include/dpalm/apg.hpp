#pragma once

#include <functional>

#include "dpalm/al.hpp"
#include "dpalm/types.hpp"

namespace dpalm {

struct ApgConfig {
    double L0 = 100.0;     // initial smoothness guess
    double gamma_u = 3.0;  // backtrack increase factor, > 1
    double gamma_d = 5.0;  // between-iteration decrease factor, >= gamma_u
    double delta = 1e-8;   // target stationarity
    long max_iters = 0;    // <= 0 derives 10x the iteration cap when computable, else 1e6
};

struct ApgStats {
    long iters = 0;
    long grad_evals = 0;
    double final_L = 0.0;
    bool converged = false;
};

struct ApgResult {
    Vector x;
    Vector certificate; // member of the subdifferential at x
    ApgStats stats;
};

/// Root of a^2/(A_t + a) = 2(1 + mu A_t)/L, the positive acceleration weight.
double accel_coefficient(double A_t, double mu, double L);

/// M_L(y) = prox_{h/L}(y - grad(y)/L) together with the subgradient
/// phi'(M_L(y)) = L(y - M_L(y)) + grad(M_L(y)) - grad(y).
struct GradientMapResult {
    Vector point;         // M_L(y)
    Vector subgrad;       // phi'(M_L(y))
    Vector grad_at_point; // grad of the smooth part at M_L(y)
};
GradientMapResult gradient_map(const SubproblemSplit& split, const Vector& y,
                               const Vector& grad_y, double L);

struct ApgState {
    long t = 0;
    double A = 0.0; // accumulated coefficient
    Vector x;       // current iterate
    Vector v;       // estimate-sequence minimizer
    Vector x0;      // anchor
    Vector s;       // accumulated weighted gradients
    double trial_L = 0.0;
    long grad_evals = 0;
};

ApgState make_apg_state(const Vector& x0, double L0);

struct LineSearchOutcome {
    double L = 0.0; // accepted L_{t+1}
    double a = 0.0; // a_{t+1}
    Vector y;
    Vector x_next;
    Vector grad_y;
    Vector grad_x_next;
    Vector certificate;
    int backtracks = 0;
};

/// One backtracking pass: every trial L re-solves a, recomputes y, and forms
/// M_L(y); exits when the accepted L satisfies the non-strict inequality
/// <phi'(M), y - M> >= ||phi'(M)||^2 / L. Sets the next trial to L/gamma_d.
/// Throws on L exceeding 1e30 (divergent or mis-specified oracle).
LineSearchOutcome line_search_step(const SubproblemSplit& split, ApgState& state, double mu,
                                   double gamma_u, double gamma_d);

/// Folds a_{t+1} grad(x^{t+1}) into the running sum and returns the new
/// estimate-sequence minimizer v^{t+1} = prox_{A_{t+1} h}(x0 - s_{t+1}).
Vector estimate_seq_update(const SubproblemSplit& split, ApgState& state, double a,
                           const Vector& grad_x_next);

/// grad(x_next) - grad(y) - L (x_next - y); lies in the subdifferential of the
/// subproblem objective at x_next when x_next = M_L(y).
Vector stationarity_certificate(const Vector& x_next, const Vector& y, double L,
                                const Vector& grad_x_next, const Vector& grad_y);

/// Worst-case iteration bound for reaching stationarity delta, from the
/// smoothness constant, strong-convexity modulus, and domain diameter.
long apg_iteration_cap(double lipschitz, double mu, double diameter, double delta,
                       double gamma_u);

using ApgObserver = std::function<void(long t, const Vector& x, double L)>;

/// Minimizes split.smooth + prox part from x0; stops when the certificate
/// norm is at most cfg.delta or the iteration limit is reached (flagged).
ApgResult apg_minimize(const SubproblemSplit& split, const ApgConfig& cfg, const Vector& x0,
                       const ApgObserver& observer = nullptr);

} // namespace dpalm
