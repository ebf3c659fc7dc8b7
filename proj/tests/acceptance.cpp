// Acceptance suite: runs each criterion at its stated tolerance and prints
// one pass/fail line per criterion. Exit code is the number of failures.

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "dpalm/instances.hpp"
#include "dpalm/prox.hpp"
#include "dpalm/rng.hpp"
#include "dpalm/solver.hpp"
#include "dpalm/trace.hpp"

using namespace dpalm;

namespace {

struct CriterionResult {
    int id;
    std::string name;
    bool pass = true;
    std::string detail;
};

std::vector<CriterionResult> g_results;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    g_results.push_back({id, name, pass, detail});
    std::printf("[%s] criterion %d: %s%s%s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
}

double wall_seconds(const std::vector<IterationRecord>& trace) {
    double ms = 0.0;
    for (const auto& r : trace) ms += r.wall_ms;
    return ms / 1000.0;
}

Vector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& x,
                   double h = 1e-6) {
    Vector g(x.size());
    for (Index i = 0; i < x.size(); ++i) {
        Vector xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        g[i] = (f(xp) - f(xm)) / (2.0 * h);
    }
    return g;
}

double rel_err(const Vector& got, const Vector& want) {
    return (got - want).norm() / std::max(1.0, want.norm());
}

// ---- shared instances -----------------------------------------------------

ProblemInstance lcqp_2d() {
    ProblemInstance inst;
    inst.dim = 2;
    inst.rho = 1.0;
    inst.reg = make_box(2, -5.0, 5.0);
    SmoothF f;
    f.value = [](const Vector& x) { return 0.5 * x.squaredNorm() - x.sum(); };
    f.gradient = [](const Vector& x) { return Vector(x.array() - 1.0); };
    f.lipschitz = 1.0;
    inst.objective = std::move(f);
    inst.affine.A = Matrix::Ones(1, 2);
    inst.affine.b = Vector::Ones(1);
    inst.affine.ata_norm = 2.0;
    Vector xf(2);
    xf << 0.5, 0.5;
    inst.x_feas = xf;
    return inst;
}

ProblemInstance qcqp_1d() {
    ProblemInstance inst;
    inst.dim = 1;
    inst.rho = 1.0;
    inst.reg = make_box(1, -5.0, 5.0);
    SmoothF f;
    f.value = [](const Vector& x) { return 0.5 * x[0] * x[0] - 2.0 * x[0]; };
    f.gradient = [](const Vector& x) { return Vector(x.array() - 2.0); };
    f.lipschitz = 1.0;
    inst.objective = std::move(f);
    inst.ineq.m = 1;
    inst.ineq.smoothness = 1.0;
    inst.ineq.value_grad_bound = 13.0;
    inst.ineq.oracle = [](const Vector& x) {
        Vector g(1);
        g[0] = 0.5 * x[0] * x[0] - 0.5;
        Matrix J(1, 1);
        J(0, 0) = x[0];
        return std::make_pair(g, J);
    };
    inst.x_feas = Vector::Zero(1);
    return inst;
}

ProblemInstance abs_with_linear_constraint() {
    ProblemInstance inst;
    inst.dim = 1;
    inst.rho = 1.0;
    inst.reg = make_box(1, -5.0, 5.0);
    GeneralF f;
    f.value = [](const Vector& x) { return std::abs(x[0]); };
    f.subgradient = [](const Vector& x) {
        Vector s(1);
        s[0] = x[0] > 0.0 ? 1.0 : (x[0] < 0.0 ? -1.0 : 0.0);
        return s;
    };
    f.subgradient_bound = 1.0;
    inst.objective = std::move(f);
    inst.ineq.m = 1;
    inst.ineq.smoothness = 0.0;
    inst.ineq.value_grad_bound = 5.3;
    inst.ineq.oracle = [](const Vector& x) {
        Vector g(1);
        g[0] = 0.3 - x[0]; // one linear constraint x >= 0.3
        Matrix J(1, 1);
        J(0, 0) = -1.0;
        return std::make_pair(g, J);
    };
    inst.x_feas = Vector::Constant(1, 0.5);
    return inst;
}

// Initial penalties for the desk sweep, tuned from the stated grid by total
// gradient count as in the source experiments.
double lcqp_beta0(double rho) {
    if (rho <= 1.0) return 0.01;
    return 10.0;
}

struct SweepRun {
    double rho = 0.0;
    std::uint64_t seed = 0;
    RunResult run;
};

std::vector<SweepRun> g_sweep;          // criterion 2 runs (kept for criterion 8)
std::vector<RunResult> g_damped_runs;   // criterion 3 runs
std::vector<RunResult> g_qcqp_runs;     // criterion 4 runs
std::vector<RunResult> g_small_runs;    // criterion 1 runs

// ---- criteria -------------------------------------------------------------

void criterion1() {
    std::ostringstream detail;
    bool pass = true;

    // Oracle 1: KKT system of the 2-d LCQP, [Q A^T; A 0][x;y] = [-c; b].
    Eigen::Matrix3d K;
    K << 1, 0, 1, 0, 1, 1, 1, 1, 0;
    const Eigen::Vector3d sol = K.fullPivLu().solve(Eigen::Vector3d(1.0, 1.0, 1.0));

    SolverConfig cfg;
    cfg.eps = 1e-4;
    cfg.schedule.beta0 = 1.0;
    cfg.record_iterates = true;
    const auto t0 = std::chrono::steady_clock::now();
    const auto run = dpalm_run(lcqp_2d(), cfg);
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double err = std::max(std::abs(run.x[0] - sol[0]), std::abs(run.x[1] - sol[1]));
    if (run.status != RunStatus::Converged || err > 1e-3 || sec >= 1.0) pass = false;
    detail << "lcqp |x-x*|=" << err << " t=" << sec << "s";
    g_small_runs.push_back(run);

    // Oracle 2: brute-force scan of the feasible interval of the 1-d QCQP.
    double best_x = -1.0, best_v = 1e100;
    for (int i = 0; i <= 400000; ++i) {
        const double x = -1.0 + 2.0 * i / 400000.0;
        const double v = 0.5 * x * x - 2.0 * x;
        if (v < best_v) {
            best_v = v;
            best_x = x;
        }
    }
    const auto t1 = std::chrono::steady_clock::now();
    const auto run2 = dpalm_run(qcqp_1d(), cfg);
    const double sec2 =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t1).count();
    const double err2 = std::abs(run2.x[0] - best_x);
    if (run2.status != RunStatus::Converged || err2 > 1e-3 || sec2 >= 1.0) pass = false;
    detail << ", qcqp |x-x*|=" << err2 << " t=" << sec2 << "s";
    g_small_runs.push_back(run2);

    report(1, "analytic KKT recovery", pass, detail.str());
}

void criterion2() {
    bool pass = true;
    std::ostringstream detail;
    int converged = 0, total = 0;
    double worst_sec = 0.0;
    for (double rho : {0.1, 1.0, 10.0}) {
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const auto inst = gen_lcqp(10, 100, rho, seed);
            SolverConfig cfg;
            cfg.eps = 1e-3;
            cfg.schedule.beta0 = lcqp_beta0(rho);
            cfg.schedule.v0 = 200.0;
            cfg.record_iterates = true;
            auto run = dpalm_run(inst, cfg);
            ++total;
            const double sec = wall_seconds(run.trace);
            worst_sec = std::max(worst_sec, sec);
            const bool ok = run.status == RunStatus::Converged &&
                            run.final_residuals.pres <= 1e-3 &&
                            run.final_residuals.dres <= 1e-3 &&
                            run.final_residuals.cs <= 1e-3 && sec < 60.0;
            converged += ok;
            if (!ok) pass = false;
            g_sweep.push_back({rho, seed, std::move(run)});
        }
    }
    detail << converged << "/" << total << " runs reached all residuals <= 1e-3, worst time "
           << worst_sec << "s";
    report(2, "LCQP desk sweep", pass, detail.str());
}

bool rows_equal_ignoring_v_and_timing(const std::vector<IterationRecord>& a,
                                      const std::vector<IterationRecord>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].k != b[i].k || a[i].beta != b[i].beta || a[i].alpha != b[i].alpha ||
            a[i].pres != b[i].pres || a[i].dres != b[i].dres || a[i].cs != b[i].cs ||
            a[i].inner_iters != b[i].inner_iters || a[i].grad_evals != b[i].grad_evals)
            return false;
    }
    return true;
}

// Known red: with v_k = v0/(sqrt(k+1) log(k+1)^2), a damped dual step moves
// the multipliers by exactly v_k, and the series sums to about 2.1 v0. For
// v0 <= 1 that budget is below the multiplier norm of the d=100 instances,
// so those runs never leave the damped regime within the outer cap and part
// (b) cannot hold. Larger v0 and the undamped variant behave as required.
void criterion3() {
    bool pass = true;
    std::ostringstream detail;
    const double inf = std::numeric_limits<double>::infinity();
    int tail_fail = 0, alpha_fail = 0, mismatch = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto inst = gen_lcqp(10, 100, 1.0, seed);
        std::vector<IterationRecord> trace_inf, trace_big;
        for (double v0 : {0.1, 1.0, 10.0, inf, 1e8}) {
            SolverConfig cfg;
            cfg.eps = 1e-3;
            cfg.schedule.beta0 = lcqp_beta0(1.0);
            cfg.schedule.v0 = v0;
            cfg.record_iterates = true;
            auto run = dpalm_run(inst, cfg);
            // (a) alpha_k <= beta_k in every recorded row.
            long last_damped = -1;
            for (std::size_t i = 0; i < run.trace.size(); ++i) {
                const auto& r = run.trace[i];
                if (r.alpha > r.beta * (1.0 + 1e-12)) ++alpha_fail;
                if (r.alpha < r.beta * (1.0 - 1e-12)) last_damped = static_cast<long>(i);
            }
            // (b) a nonempty full-stepsize tail before the run ends.
            if (last_damped >= static_cast<long>(run.trace.size()) - 1) ++tail_fail;
            if (std::isinf(v0)) trace_inf = run.trace;
            if (v0 == 1e8) trace_big = run.trace;
            g_damped_runs.push_back(std::move(run));
        }
        // (c) +inf and a large finite v0 coincide (timing and the v column
        // excluded; v records the configured schedule, not run behaviour).
        if (!rows_equal_ignoring_v_and_timing(trace_inf, trace_big)) ++mismatch;
    }
    if (alpha_fail > 0 || tail_fail > 0 || mismatch > 0) pass = false;
    detail << "alpha<=beta violations " << alpha_fail << ", runs without a full-step tail "
           << tail_fail << "/50, inf-vs-1e8 mismatches " << mismatch << "/10";
    report(3, "damped-vs-full stepsize study", pass, detail.str());
}

void criterion4() {
    bool pass = true;
    int ok = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto inst = gen_qcqp(5, 50, 1.0, seed);
        SolverConfig cfg;
        cfg.eps = 1e-3;
        cfg.schedule.beta0 = 0.01;
        cfg.schedule.v0 = 200.0;
        cfg.apg.L0 = 0.0; // use the assembled smoothness estimate
        cfg.record_iterates = true;
        auto run = dpalm_run(inst, cfg);
        const bool good = run.status == RunStatus::Converged &&
                          std::max({run.final_residuals.pres, run.final_residuals.dres,
                                    run.final_residuals.cs}) <= 1e-3;
        ok += good;
        if (!good) pass = false;
        g_qcqp_runs.push_back(std::move(run));
    }
    std::ostringstream detail;
    detail << ok << "/5 seeds reached an eps-KKT point";
    report(4, "QCQP desk run", pass, detail.str());
}

void criterion5() {
    bool pass = true;
    std::ostringstream detail;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto data = gen_rnls_data(5, 5, 50, seed);
        const auto inst = build_instance(data);
        SolverConfig cfg;
        cfg.eps = 1e-2;
        cfg.schedule.beta0 = 1.0;
        cfg.schedule.v0 = 200.0;
        cfg.nu = 1e-3;
        cfg.tol_policy = TolerancePolicy::Fixed;
        cfg.fixed_tol = 1e-3;
        cfg.metric = StoppingMetric::NllsMetric;
        cfg.apg.L0 = 100.0;
        cfg.record_iterates = true;
        const auto run = dpalm_run(inst, cfg);
        if (run.status != RunStatus::Converged) pass = false;

        // Moreau sandwich 0 <= f0 - fnu <= M_l^2 nu / 2 at every iterate.
        const auto& composite = std::get<CompositeF>(inst.objective);
        const SmoothedOuter outer = make_smoothed_outer(composite.outer, cfg.nu);
        const double cap =
            composite.outer_lipschitz * composite.outer_lipschitz * cfg.nu / 2.0;
        for (std::size_t k = 0; k + 1 < run.iterates.size(); ++k) {
            const auto model = build_prox_linear(inst, run.iterates[k]);
            const Vector& next = run.iterates[k + 1];
            const double f0 = prox_linear_value(model, outer, next);
            const double fnu = smoothed_composite_value_grad(model, outer, next).first;
            const double gap = f0 - fnu;
            if (gap < -1e-12 || gap > cap + 1e-12) pass = false;
        }
        detail << "seed " << seed << ": k=" << run.k_final << " pres="
               << run.final_residuals.pres << "; ";
    }
    report(5, "composite (NLLS) desk run with Moreau sandwich", pass, detail.str());
}

void criterion6() {
    SeededRng rng(4242);
    const Index d = 50;
    bool pass = true;
    int runs = 0, exact = 0, under_cap = 0, gap_ok_count = 0;
    while (runs < 100) {
        const Vector q = rng.uniform_vector(d, 1.0, 10.0);
        const Vector c = rng.normal_vector(d) * 2.0;
        const double mu = q.minCoeff();
        const double L = q.maxCoeff() - mu;
        if (L <= 0.0) continue;
        ++runs;

        Vector closed(d);
        for (Index i = 0; i < d; ++i) closed[i] = std::clamp(-c[i] / q[i], -2.0, 2.0);

        SubproblemSplit split;
        const Matrix Q = Vector(q.array() - mu).asDiagonal();
        split.smooth_value = [Q, c](const Vector& x) { return 0.5 * x.dot(Q * x) + c.dot(x); };
        split.smooth_grad = [Q, c](const Vector& x) { return Vector(Q * x + c); };
        split.prox_reg = make_box(d, -2.0, 2.0);
        split.prox_anchor = Vector::Zero(d);
        split.prox_shift = mu;
        split.mu = mu;
        split.lipschitz_estimate = L;

        auto phi = [&](const Vector& x) {
            return 0.5 * x.dot(Vector(q).asDiagonal() * x) + c.dot(x);
        };
        const double phi_star = phi(closed);
        const Vector x0 = Vector::Zero(d);

        ApgConfig cfg;
        cfg.L0 = L;
        cfg.gamma_u = 2.0;
        cfg.gamma_d = 2.0;
        cfg.delta = 1e-8;
        cfg.max_iters = 100000;

        const double rate = 1.0 + std::sqrt(mu / (2.0 * cfg.gamma_u * L));
        const double lead = cfg.gamma_u * L / 4.0 * (closed - x0).squaredNorm();
        bool gap_ok = true;
        const auto result = apg_minimize(split, cfg, x0, [&](long t, const Vector& x, double) {
            const double bound = lead * std::pow(rate, -2.0 * static_cast<double>(t));
            if (phi(x) - phi_star > bound + 1e-9) gap_ok = false;
        });
        const long cap = apg_iteration_cap(L, mu, box_diameter(split.prox_reg), cfg.delta,
                                           cfg.gamma_u);
        const bool landed =
            result.stats.converged && (result.x - closed).cwiseAbs().maxCoeff() < 1e-6;
        exact += landed;
        under_cap += result.stats.iters <= cap;
        gap_ok_count += gap_ok;
        if (!landed || result.stats.iters > cap || !gap_ok) pass = false;
    }
    std::ostringstream detail;
    detail << exact << "/100 within 1e-6 of the closed form, " << under_cap
           << "/100 under the iteration cap, " << gap_ok_count
           << "/100 satisfied the per-iterate gap bound";
    report(6, "APG correctness on diagonal quadratics", pass, detail.str());
}

void criterion7() {
    SeededRng rng(777);
    bool pass = true;
    std::ostringstream detail;

    // (a) Case-I AL smooth-part gradients on a random constrained instance.
    {
        const Index d = 5;
        const Matrix raw = rng.normal_matrix(d, d);
        const Matrix Q = Matrix(raw.transpose() * raw) / d;
        const Vector c0 = rng.normal_vector(d);
        ProblemInstance inst;
        inst.dim = d;
        inst.rho = 1.0;
        inst.reg = make_box(d, -5.0, 5.0);
        SmoothF f;
        f.value = [Q, c0](const Vector& x) { return 0.5 * x.dot(Q * x) + c0.dot(x); };
        f.gradient = [Q, c0](const Vector& x) { return Vector(Q * x + c0); };
        f.lipschitz = 5.0 * d;
        inst.objective = std::move(f);
        inst.affine.A = rng.normal_matrix(2, d);
        inst.affine.b = rng.normal_vector(2);
        inst.affine.ata_norm = inst.affine.A.squaredNorm();
        const Matrix raw1 = rng.normal_matrix(d, d);
        const Matrix Q1 = Matrix(raw1.transpose() * raw1) / d;
        const Vector c1 = rng.normal_vector(d);
        inst.ineq.m = 2;
        inst.ineq.smoothness = 5.0 * d;
        inst.ineq.value_grad_bound = 500.0;
        inst.ineq.oracle = [Q1, c1, d](const Vector& x) {
            Vector g(2);
            g[0] = 0.5 * x.dot(Q1 * x) + c1.dot(x) - 0.5;
            g[1] = x.squaredNorm() - 1.0;
            Matrix J(2, d);
            J.row(0) = (Q1 * x + c1).transpose();
            J.row(1) = (2.0 * x).transpose();
            return std::make_pair(g, J);
        };
        DualState dual{rng.normal_vector(2), rng.uniform_vector(2, 0.0, 2.0)};
        const double beta = 1.9, rho = 1.3;
        const Vector anchor = rng.uniform_vector(d, -1.0, 1.0);
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const Vector x = rng.uniform_vector(d, -2.0, 2.0);
            auto smooth = [&](const Vector& p) {
                return al_value(inst, p, dual, beta) + 0.5 * rho * (p - anchor).squaredNorm();
            };
            worst = std::max(worst, rel_err(al_grad_smooth_part(inst, x, dual, beta, anchor, rho),
                                            fd_gradient(smooth, x)));
        }
        if (worst > 1e-6) pass = false;
        detail << "al=" << worst;
    }

    // (b) Moreau envelope gradients.
    {
        double worst = 0.0;
        for (double nu : {1e-3, 0.1, 1.0}) {
            for (int i = 0; i < 100; ++i) {
                const Vector u = rng.normal_vector(4) * 2.0;
                auto value = [nu](const Vector& p) { return moreau_l1(p, nu).first; };
                worst = std::max(worst,
                                 rel_err(moreau_l1(u, nu).second, fd_gradient(value, u, 1e-7)));
            }
        }
        if (worst > 1e-6) pass = false;
        detail << " moreau=" << worst;
    }

    // (c) Smoothed composite gradients.
    {
        const Index d = 4, p = 3;
        const Matrix J = rng.normal_matrix(p, d);
        const Vector base = rng.normal_vector(p);
        ProblemInstance inst;
        inst.dim = d;
        inst.rho = 1.0;
        inst.reg = make_box(d, -5.0, 5.0);
        CompositeF cf;
        cf.outer = OuterKind::L1;
        cf.inner_dim = p;
        cf.outer_lipschitz = std::sqrt(static_cast<double>(p));
        cf.inner_smoothness = 1e-6;
        cf.inner_value = [J, base](const Vector& x) { return Vector(J * x + base); };
        cf.inner_jacobian = [J](const Vector&) { return J; };
        inst.objective = std::move(cf);
        const auto model = build_prox_linear(inst, Vector::Zero(d));
        const SmoothedOuter outer = make_smoothed_outer(OuterKind::L1, 0.1);
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const Vector x = rng.uniform_vector(d, -2.0, 2.0);
            auto value = [&](const Vector& q) {
                return smoothed_composite_value_grad(model, outer, q).first;
            };
            worst = std::max(worst, rel_err(smoothed_composite_value_grad(model, outer, x).second,
                                            fd_gradient(value, x, 1e-7)));
        }
        if (worst > 1e-6) pass = false;
        detail << " composite=" << worst;
    }

    // (d) Constraint Jacobians on a generated QCQP.
    {
        const auto inst = gen_qcqp(3, 8, 1.0, 99);
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const Vector x = rng.uniform_vector(8, -4.5, 4.5);
            const auto [g, J] = eval_ineq_block(inst, x);
            for (Index row = 0; row < 3; ++row) {
                auto gi = [&, row](const Vector& p) { return inst.ineq.oracle(p).first[row]; };
                worst = std::max(worst,
                                 rel_err(Vector(J.row(row).transpose()), fd_gradient(gi, x)));
            }
        }
        if (worst > 1e-6) pass = false;
        detail << " jacobian=" << worst;
    }

    report(7, "derivative consistency suite (max rel err)", pass, detail.str());
}

void criterion8() {
    bool pass = true;
    std::ostringstream detail;

    // z >= 0 along every recorded run.
    {
        long bad = 0;
        auto scan = [&](const RunResult& run) {
            for (const auto& dual : run.duals)
                if (dual.z.size() > 0 && dual.z.minCoeff() < 0.0) ++bad;
        };
        for (const auto& s : g_sweep) scan(s.run);
        for (const auto& r : g_qcqp_runs) scan(r);
        for (const auto& r : g_damped_runs) scan(r);
        if (bad > 0) pass = false;
        detail << "z>=0 violations " << bad;
    }

    // y stays in Range(A): rank-deficient affine block with consistent b.
    {
        ProblemInstance inst;
        inst.dim = 2;
        inst.rho = 1.0;
        inst.reg = make_box(2, -5.0, 5.0);
        SmoothF f;
        f.value = [](const Vector& x) { return 0.5 * x.squaredNorm() - x[0]; };
        f.gradient = [](const Vector& x) {
            Vector g = x;
            g[0] -= 1.0;
            return g;
        };
        f.lipschitz = 1.0;
        inst.objective = std::move(f);
        Matrix A(2, 2);
        A << 1.0, 1.0, 2.0, 2.0; // rank one
        Vector b(2);
        b << 0.5, 1.0; // consistent with Range(A)
        inst.affine.A = A;
        inst.affine.b = b;
        inst.affine.ata_norm = 10.0;
        SolverConfig cfg;
        cfg.eps = 1e-4;
        cfg.schedule.beta0 = 1.0;
        cfg.record_iterates = true;
        const auto run = dpalm_run(inst, cfg);
        Vector range_dir(2);
        range_dir << 1.0, 2.0;
        range_dir.normalize();
        double worst = 0.0;
        for (const auto& dual : run.duals) {
            const Vector out_of_range = dual.y - range_dir * range_dir.dot(dual.y);
            worst = std::max(worst, out_of_range.norm());
        }
        // Criterion-1 LCQP as well (full row rank, projection is the identity).
        if (worst > 1e-10 || run.status != RunStatus::Converged) pass = false;
        detail << ", max null-space(y) " << worst;
    }

    // Known red: beta_k * pres_k is bounded on every run (its plateau is the
    // theoretical envelope), but once the duals lock in, primal feasibility
    // collapses much faster than 1/beta_k, so the second-half max sits on
    // the plateau while the median sits in the collapsed tail. No initial
    // penalty in the stated grid keeps the ratio under 10 on all seeds.
    {
        long viol = 0, total = 0;
        auto scan = [&](const RunResult& run) {
            if (run.status != RunStatus::Converged || run.trace.size() < 4) return;
            std::vector<double> half;
            for (std::size_t i = run.trace.size() / 2; i < run.trace.size(); ++i)
                half.push_back(run.trace[i].beta * run.trace[i].pres);
            std::vector<double> sorted = half;
            std::sort(sorted.begin(), sorted.end());
            const double median = sorted[sorted.size() / 2];
            const double mx = *std::max_element(half.begin(), half.end());
            ++total;
            if (mx > 10.0 * median) ++viol;
        };
        for (const auto& r : g_small_runs) scan(r);
        for (const auto& s : g_sweep) scan(s.run);
        for (const auto& r : g_damped_runs) scan(r);
        for (const auto& r : g_qcqp_runs) scan(r);
        if (viol > 0) pass = false;
        detail << ", beta*pres ratio violations " << viol << "/" << total;
    }

    // Trace round-trip losslessness on a sweep trace.
    {
        const auto& rows = g_sweep.front().run.trace;
        std::ostringstream buffer;
        write_trace(rows, buffer);
        std::istringstream in(buffer.str());
        const auto parsed = read_trace(in);
        bool same = parsed.size() == rows.size();
        for (std::size_t i = 0; same && i < rows.size(); ++i)
            same = parsed[i].k == rows[i].k && parsed[i].beta == rows[i].beta &&
                   parsed[i].v == rows[i].v && parsed[i].alpha == rows[i].alpha &&
                   parsed[i].pres == rows[i].pres && parsed[i].dres == rows[i].dres &&
                   parsed[i].cs == rows[i].cs && parsed[i].inner_iters == rows[i].inner_iters &&
                   parsed[i].grad_evals == rows[i].grad_evals &&
                   parsed[i].wall_ms == rows[i].wall_ms;
        if (!same) pass = false;
        detail << ", trace round-trip " << (same ? "lossless" : "LOSSY");
    }

    // Fixed-seed end-to-end byte determinism: generator bytes + trace bytes.
    {
        const std::string gen_a = instance_to_json(gen_lcqp_data(10, 100, 1.0, 3)).dump();
        const std::string gen_b = instance_to_json(gen_lcqp_data(10, 100, 1.0, 3)).dump();
        SolverConfig cfg;
        cfg.eps = 1e-3;
        cfg.schedule.beta0 = 0.1;
        const auto inst = gen_lcqp(10, 100, 1.0, 3);
        const auto run_a = dpalm_run(inst, cfg);
        const auto run_b = dpalm_run(inst, cfg);
        std::ostringstream ta, tb;
        write_trace(run_a.trace, ta, false);
        write_trace(run_b.trace, tb, false);
        const bool same = gen_a == gen_b && ta.str() == tb.str();
        if (!same) pass = false;
        detail << ", byte determinism " << (same ? "ok" : "BROKEN");
    }

    report(8, "structural invariants", pass, detail.str());
}

void criterion9() {
    const auto inst = abs_with_linear_constraint();
    SolverConfig cfg;
    cfg.eps = 1e-2;
    cfg.schedule.beta0 = 1.0;
    cfg.schedule.v0 = 200.0;
    cfg.tol_policy = TolerancePolicy::Fixed;
    cfg.fixed_tol = 5e-3;
    cfg.metric = StoppingMetric::NllsMetric;
    const auto run = dpalm_run(inst, cfg);
    const bool pass = run.status == RunStatus::Converged && run.k_final <= 10000 &&
                      run.final_residuals.pres <= 1e-2 && run.final_residuals.cs <= 1e-2 &&
                      run.inner_cap_hits == 0;
    std::ostringstream detail;
    detail << "status=" << to_string(run.status) << " k=" << run.k_final
           << " pres=" << run.final_residuals.pres << " cs=" << run.final_residuals.cs
           << " subproblems missing their certified gap=" << run.inner_cap_hits;
    report(9, "general weakly-convex case sanity", pass, detail.str());
}

} // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();

    int failures = 0;
    for (const auto& r : g_results) failures += r.pass ? 0 : 1;
    std::printf("%d/%zu criteria passed\n", static_cast<int>(g_results.size()) - failures,
                g_results.size());
    return failures;
}
