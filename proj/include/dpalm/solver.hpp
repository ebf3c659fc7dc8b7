#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dpalm/al.hpp"
#include "dpalm/apg.hpp"
#include "dpalm/problem.hpp"

namespace dpalm {

enum class ScheduleRule { SqrtDefault, FullDualAlt };

struct Schedule {
    double beta0 = 1.0;
    double v0 = 200.0; // +inf selects the full dual stepsize
    ScheduleRule rule = ScheduleRule::SqrtDefault;
};

/// beta_k = beta0 sqrt(k+1).
double penalty_schedule(long k, double beta0);

/// v_0 at k = 0 (the rule is defined for k >= 1), then
/// v_k = v0 / (sqrt(k+1) ln(k+1)^2); +inf passes through.
double damping_schedule(long k, double v0);

double schedule_beta(const Schedule& schedule, long k);
double schedule_v(const Schedule& schedule, long k);

/// alpha_k = min{beta, v/pres}, with v/0 = +inf so feasible iterates take the
/// full step.
double dual_stepsize(double beta, double v, double pres_plus);

/// y+ = y + alpha (Ax-b), z+ = z + alpha max{-z/beta, g(x)}. Requires
/// 0 <= alpha <= beta, which keeps z+ >= 0.
DualState dual_update(const DualState& dual, double alpha, double beta, const Vector& x_plus,
                      const ProblemInstance& inst);

enum class TolerancePolicy { Theory, Fixed };

/// Per-case inner tolerance. Theory follows the per-case schedules (the
/// composite case divides by the C4 surrogate); Fixed returns
/// min{fixed_tol, sqrt(rho/(2 beta))}.
double subproblem_tolerance(CaseTag tag, long k, double eps, double rho, double beta,
                            TolerancePolicy policy, double fixed_tol, double c4_surrogate);

enum class StoppingMetric { FullKkt, NllsMetric };
enum class RunStatus { Converged, OuterCap, InnerError };

struct SolverConfig {
    double eps = 1e-3;
    double prox_weight = 0.0; // <= 0 uses the instance weak-convexity constant
    Schedule schedule;
    std::optional<CaseTag> case_tag;               // defaults to the objective variant
    std::optional<TolerancePolicy> tol_policy;     // defaults: smooth/general theory, composite fixed
    double fixed_tol = 0.0;                        // epsilon-bar for the fixed policy; <= 0 uses eps/8
    double c4_surrogate = 1.5;                     // lower bound of the analysis constant
    double nu = 1e-3;                              // Moreau smoothing for the composite case
    ApgConfig apg;
    long max_outer = 10000;
    StoppingMetric metric = StoppingMetric::FullKkt;
    bool fixed_smoothness = false; // start every subproblem at the assembled estimate
    long subgrad_cap = 1000000;    // iteration cap of the general-case inner loop
    bool record_iterates = false;  // keep the primal/dual history on the result
};

struct IterationRecord {
    long k = 0;
    double beta = 0.0;
    double v = 0.0;
    double alpha = 0.0;
    double pres = 0.0;
    double dres = 0.0;
    double cs = 0.0;
    long inner_iters = 0;
    long grad_evals = 0; // cumulative over the run
    double wall_ms = 0.0;
};

struct SubproblemOutcome {
    Vector x;
    std::optional<Vector> certificate; // absent for the general case
    long iters = 0;
    long grad_evals = 0;
    double final_L = 0.0;
    bool hit_cap = false;
    double gap_bound = 0.0;  // certified objective gap (general case)
    double gap_target = 0.0; // eps_k^2 / rho (general case)
};

/// Solves the proximal-AL subproblem at (x_k, dual, beta) to tolerance eps_k.
/// Smooth and composite cases run APG with mu = rho and Delta = eps_k; the
/// general case runs a proximal subgradient loop with steps 2/(rho(t+2))
/// until 2 G^2/(rho(T+1)) <= eps_k^2/rho for the running subgradient bound G.
SubproblemOutcome solve_subproblem(CaseTag tag, const ProblemInstance& inst,
                                   const DualState& dual, double beta, const Vector& x_k,
                                   double eps_k, double nu, double rho, const ApgConfig& apg,
                                   double warm_L, long subgrad_cap,
                                   bool fixed_smoothness = false);

struct RunResult {
    Vector x;
    DualState dual;
    std::vector<IterationRecord> trace;
    RunStatus status = RunStatus::OuterCap;
    std::string message;
    KktResidual final_residuals;
    long k_final = 0;
    std::string dres_mode = "certificate"; // "gap" when the general case is active
    long inner_cap_hits = 0;               // subproblems that exhausted their budget
    std::vector<Vector> iterates;          // x^0, x^1, ... when record_iterates is set
    std::vector<DualState> duals;          // dual state after each update
};

const char* to_string(RunStatus status);

/// Default start: the recorded feasible point when available, otherwise the
/// box-clamped origin.
Vector default_start(const ProblemInstance& inst);

/// The DPALM outer loop; duals start at zero unless supplied.
RunResult dpalm_run(const ProblemInstance& inst, const SolverConfig& cfg,
                    std::optional<Vector> x0 = std::nullopt,
                    std::optional<DualState> dual0 = std::nullopt);

} // namespace dpalm
