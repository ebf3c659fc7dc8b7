#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dpalm/dataset.hpp"
#include "dpalm/instances.hpp"
#include "dpalm/solver.hpp"
#include "dpalm/trace.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace dpalm;

namespace {

struct SolveFlags {
    double eps = 1e-3;
    double beta0 = 1.0;
    double v0 = 200.0;
    std::string schedule = "sqrt"; // sqrt | full-dual-alt
    long max_outer = 10000;
    std::string case_tag = "auto"; // auto | 1 | 2 | 3
    double nu = 1e-3;
    std::string tol_policy = "default"; // default | theory | fixed
    double fixed_tol = 0.0;
    std::string metric = "full-kkt"; // full-kkt | nlls
    double gamma_u = 3.0;
    double gamma_d = 5.0;
    double L0 = 100.0;
    double prox_weight = 0.0;
    bool fixed_smoothness = false;
    bool no_timing = false;
    bool emit_x = false;
    bool emit_dual = false;
};

void add_solver_flags(CLI::App* cmd, SolveFlags& f) {
    cmd->add_option("--eps", f.eps, "target KKT accuracy")->check(CLI::PositiveNumber);
    cmd->add_option("--beta0", f.beta0, "initial penalty parameter")->check(CLI::PositiveNumber);
    cmd->add_option("--v0", f.v0, "damping constant; inf selects the full dual step");
    cmd->add_option("--schedule", f.schedule, "sqrt | full-dual-alt");
    cmd->add_option("--max-outer", f.max_outer, "outer iteration cap")->check(CLI::PositiveNumber);
    cmd->add_option("--case", f.case_tag, "subproblem case: auto | 1 | 2 | 3");
    cmd->add_option("--nu", f.nu, "Moreau smoothing (composite case)");
    cmd->add_option("--tol-policy", f.tol_policy, "default | theory | fixed");
    cmd->add_option("--fixed-tol", f.fixed_tol, "epsilon-bar for the fixed policy");
    cmd->add_option("--metric", f.metric, "stopping metric: full-kkt | nlls");
    cmd->add_option("--gamma-u", f.gamma_u, "line search increase factor");
    cmd->add_option("--gamma-d", f.gamma_d, "line search decrease factor");
    cmd->add_option("--L0", f.L0, "initial smoothness guess; <= 0 uses the assembled estimate");
    cmd->add_option("--prox-weight", f.prox_weight, "override of the proximal weight");
    cmd->add_flag("--fixed-smoothness", f.fixed_smoothness,
                  "start each subproblem at the assembled smoothness estimate");
    cmd->add_flag("--no-timing", f.no_timing, "zero the wall_ms column for byte comparisons");
    cmd->add_flag("--emit-x", f.emit_x, "include the final point in the result JSON");
    cmd->add_flag("--emit-dual", f.emit_dual, "include the final duals in the result JSON");
}

SolverConfig to_config(const SolveFlags& f) {
    SolverConfig cfg;
    cfg.eps = f.eps;
    cfg.prox_weight = f.prox_weight;
    cfg.schedule.beta0 = f.beta0;
    cfg.schedule.v0 = f.v0;
    if (f.schedule == "full-dual-alt") cfg.schedule.rule = ScheduleRule::FullDualAlt;
    else if (f.schedule != "sqrt") throw CLI::ValidationError("--schedule", "unknown schedule");
    cfg.max_outer = f.max_outer;
    if (f.case_tag == "1") cfg.case_tag = CaseTag::SmoothObjective;
    else if (f.case_tag == "2") cfg.case_tag = CaseTag::CompositeObjective;
    else if (f.case_tag == "3") cfg.case_tag = CaseTag::GeneralObjective;
    else if (f.case_tag != "auto") throw CLI::ValidationError("--case", "unknown case tag");
    cfg.nu = f.nu;
    if (f.tol_policy == "theory") cfg.tol_policy = TolerancePolicy::Theory;
    else if (f.tol_policy == "fixed") cfg.tol_policy = TolerancePolicy::Fixed;
    else if (f.tol_policy != "default")
        throw CLI::ValidationError("--tol-policy", "unknown policy");
    cfg.fixed_tol = f.fixed_tol;
    if (f.metric == "nlls") cfg.metric = StoppingMetric::NllsMetric;
    else if (f.metric != "full-kkt") throw CLI::ValidationError("--metric", "unknown metric");
    cfg.apg.gamma_u = f.gamma_u;
    cfg.apg.gamma_d = f.gamma_d;
    cfg.apg.L0 = f.L0;
    cfg.fixed_smoothness = f.fixed_smoothness;
    return cfg;
}

InstanceData gen_family(const std::string& family, long n, long d, long m, double rho,
                        std::uint64_t seed) {
    if (family == "lcqp") return gen_lcqp_data(n, d, rho, seed);
    if (family == "qcqp") return gen_qcqp_data(m, d, rho, seed);
    if (family == "rnls") return gen_rnls_data(m, n, d, seed);
    throw CLI::ValidationError("--family", "unknown family: " + family);
}

struct FairnessFlags {
    std::string data;
    std::string format = "csv"; // csv | libsvm
    std::string label_column = "label";
    std::string group_column = "group";
    long group_feature = -1; // libsvm: group from this 0-based feature
    std::uint64_t split_seed = 1;
    double radius = 0.1;
};

ProblemInstance build_fairness_from_flags(const FairnessFlags& f) {
    Dataset ds;
    if (f.format == "libsvm") {
        ds = load_libsvm(f.data);
        if (f.group_feature < 0)
            throw CLI::ValidationError("--group-feature", "required for libsvm input");
        assign_group_by_feature(ds, f.group_feature);
    } else if (f.format == "csv") {
        ds = load_csv(f.data, f.label_column, f.group_column);
    } else {
        throw CLI::ValidationError("--format", "unknown format: " + f.format);
    }
    auto build = build_fairness(ds, f.split_seed, f.radius);
    std::cerr << "fairness build: theta=" << build.theta << " gamma=" << build.gamma_slack
              << " g(x_mat)=" << build.g_at_xmat
              << (build.feasible_at_xmat ? " (strictly feasible)" : " (not strictly feasible)")
              << "\n";
    return std::move(build.inst);
}

json result_json(const RunResult& run, const SolveFlags& flags) {
    json j;
    j["status"] = to_string(run.status);
    j["k_final"] = run.k_final;
    j["residuals"] = {{"pres", run.final_residuals.pres},
                      {"dres", run.final_residuals.dres},
                      {"cs", run.final_residuals.cs}};
    j["dres_mode"] = run.dres_mode;
    if (!run.trace.empty()) j["grad_evals"] = run.trace.back().grad_evals;
    if (!run.message.empty()) j["message"] = run.message;
    if (flags.emit_x) {
        json x = json::array();
        for (Index i = 0; i < run.x.size(); ++i) x.push_back(run.x[i]);
        j["x"] = x;
    }
    if (flags.emit_dual) {
        json y = json::array(), z = json::array();
        for (Index i = 0; i < run.dual.y.size(); ++i) y.push_back(run.dual.y[i]);
        for (Index i = 0; i < run.dual.z.size(); ++i) z.push_back(run.dual.z[i]);
        j["dual"] = {{"y", y}, {"z", z}};
    }
    return j;
}

int solve_and_persist(const ProblemInstance& inst, const SolveFlags& flags,
                      const std::string& out_dir, const std::string& stem,
                      const std::string& family, double rho, std::uint64_t seed,
                      std::optional<Vector> x0 = std::nullopt) {
    const auto violations = validate_instance(inst);
    if (!violations.empty()) {
        for (const auto& v : violations) std::cerr << "invalid instance: " << v << "\n";
        return 1;
    }
    SolverConfig cfg = to_config(flags);
    RunResult run = dpalm_run(inst, cfg, std::move(x0));

    fs::create_directories(out_dir);
    write_trace_file(run.trace, (fs::path(out_dir) / (stem + ".csv")).string(),
                     !flags.no_timing);
    json j = result_json(run, flags);
    j["family"] = family;
    j["rho"] = rho;
    j["seed"] = seed;
    std::ofstream res(fs::path(out_dir) / (stem + ".json"));
    res << j.dump(2) << "\n";

    std::cout << "status=" << to_string(run.status) << " k=" << run.k_final
              << " pres=" << run.final_residuals.pres << " dres=" << run.final_residuals.dres
              << " cs=" << run.final_residuals.cs << "\n";
    return run.status == RunStatus::InnerError ? 1 : 0;
}

int run_solve(const std::string& instance_path, const std::string& family, long n, long d,
              long m, double rho, std::uint64_t seed, const SolveFlags& flags,
              const std::string& out_dir, const std::string& tag) {
    InstanceData data = instance_path.empty() ? gen_family(family, n, d, m, rho, seed)
                                              : load_instance(instance_path);
    ProblemInstance inst = build_instance(data);
    const std::string stem = tag.empty() ? data.family + "_seed" + std::to_string(data.seed)
                                         : tag;
    return solve_and_persist(inst, flags, out_dir, stem, data.family, data.rho, data.seed);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"DPALM: damped proximal augmented Lagrangian solver"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate an instance JSON");
    std::string gen_family_name = "lcqp", gen_out = "instance.json";
    long gen_n = 10, gen_d = 100, gen_m = 5;
    double gen_rho = 1.0;
    std::uint64_t gen_seed = 1;
    gen->add_option("--family", gen_family_name, "lcqp | qcqp | rnls")->required();
    gen->add_option("--n", gen_n, "affine rows");
    gen->add_option("--d", gen_d, "dimension");
    gen->add_option("--m", gen_m, "constraints / residuals");
    gen->add_option("--rho", gen_rho, "weak-convexity constant")->check(CLI::PositiveNumber);
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--out", gen_out, "output path");

    // solve
    auto* solve = app.add_subcommand("solve", "run DPALM on an instance or generator spec");
    std::string solve_instance, solve_family, solve_out = "runs", solve_tag;
    long solve_n = 10, solve_d = 100, solve_m = 5;
    double solve_rho = 1.0;
    std::uint64_t solve_seed = 1;
    SolveFlags solve_flags;
    solve->add_option("--instance", solve_instance, "instance JSON path");
    solve->add_option("--family", solve_family, "lcqp | qcqp | rnls");
    solve->add_option("--n", solve_n, "affine rows");
    solve->add_option("--d", solve_d, "dimension");
    solve->add_option("--m", solve_m, "constraints / residuals");
    solve->add_option("--rho", solve_rho, "weak-convexity constant");
    solve->add_option("--seed", solve_seed, "generator seed");
    solve->add_option("--out", solve_out, "output directory");
    solve->add_option("--tag", solve_tag, "output file stem");
    FairnessFlags fair_flags;
    solve->add_option("--data", fair_flags.data, "dataset path (family fairness)");
    solve->add_option("--format", fair_flags.format, "dataset format: csv | libsvm");
    solve->add_option("--label-col", fair_flags.label_column, "CSV label column");
    solve->add_option("--group-col", fair_flags.group_column, "CSV group column");
    solve->add_option("--group-feature", fair_flags.group_feature,
                      "libsvm 0-based feature defining the protected group");
    solve->add_option("--split-seed", fair_flags.split_seed, "held-out split seed");
    solve->add_option("--radius", fair_flags.radius, "sup-norm ball radius");
    add_solver_flags(solve, solve_flags);

    // bench
    auto* bench = app.add_subcommand("bench", "multi-seed sweep driven by a config file");
    std::string bench_config;
    bench->add_option("--config", bench_config, "bench config JSON")->required();

    // summarize
    auto* summarize = app.add_subcommand("summarize", "fold result/trace files into a summary CSV");
    std::vector<std::string> summarize_inputs;
    std::string summarize_out = "summary.csv";
    summarize->add_option("inputs", summarize_inputs, "result JSON files or directories")
        ->required();
    summarize->add_option("--out", summarize_out, "summary CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n" << app.help() << "\n";
        return 2;
    }

    try {
        if (gen->parsed()) {
            InstanceData data = gen_family(gen_family_name, gen_n, gen_d, gen_m, gen_rho,
                                           gen_seed);
            save_instance(data, gen_out);
            std::cout << "wrote " << gen_out << "\n";
            return 0;
        }

        if (solve->parsed()) {
            if (solve_instance.empty() && solve_family.empty()) {
                std::cerr << "solve requires --instance or --family\n";
                return 2;
            }
            if (solve_family == "fairness") {
                if (fair_flags.data.empty()) {
                    std::cerr << "family fairness requires --data\n";
                    return 2;
                }
                const auto inst = build_fairness_from_flags(fair_flags);
                const std::string stem = solve_tag.empty() ? "fairness" : solve_tag;
                // Start from the all-ones point clamped to the ball; the
                // box-clamped origin is a trivial stationary point of the
                // group-difference objective.
                Vector start = Vector::Ones(inst.dim);
                for (Index i = 0; i < inst.dim; ++i)
                    start[i] = std::clamp(start[i], inst.reg.lower[i], inst.reg.upper[i]);
                return solve_and_persist(inst, solve_flags, solve_out, stem, "fairness",
                                         inst.rho, fair_flags.split_seed, start);
            }
            return run_solve(solve_instance, solve_family, solve_n, solve_d, solve_m,
                             solve_rho, solve_seed, solve_flags, solve_out, solve_tag);
        }

        if (bench->parsed()) {
            std::ifstream in(bench_config);
            if (!in) {
                std::cerr << "cannot open: " << bench_config << "\n";
                return 1;
            }
            json cfg;
            in >> cfg;
            const std::string family = cfg.at("family").get<std::string>();
            const long n = cfg.value("n", 10);
            const long d = cfg.value("d", 100);
            const long m = cfg.value("m", 5);
            const double rho = cfg.value("rho", 1.0);
            const std::string out_dir = cfg.value("out", "runs");
            SolveFlags flags;
            if (cfg.contains("solver")) {
                const json& s = cfg["solver"];
                flags.eps = s.value("eps", flags.eps);
                flags.beta0 = s.value("beta0", flags.beta0);
                flags.v0 = s.value("v0", flags.v0);
                flags.schedule = s.value("schedule", flags.schedule);
                flags.max_outer = s.value("max_outer", flags.max_outer);
                flags.case_tag = s.value("case", flags.case_tag);
                flags.nu = s.value("nu", flags.nu);
                flags.tol_policy = s.value("tol_policy", flags.tol_policy);
                flags.fixed_tol = s.value("fixed_tol", flags.fixed_tol);
                flags.metric = s.value("metric", flags.metric);
                flags.gamma_u = s.value("gamma_u", flags.gamma_u);
                flags.gamma_d = s.value("gamma_d", flags.gamma_d);
                flags.L0 = s.value("L0", flags.L0);
                flags.fixed_smoothness = s.value("fixed_smoothness", flags.fixed_smoothness);
            }
            flags.no_timing = cfg.value("no_timing", false);
            int rc = 0;
            for (const auto& seed_json : cfg.at("seeds")) {
                const std::uint64_t seed = seed_json.get<std::uint64_t>();
                std::ostringstream tag;
                tag << family << "_rho" << rho << "_seed" << seed;
                rc |= run_solve("", family, n, d, m, rho, seed, flags, out_dir, tag.str());
            }
            return rc;
        }

        if (summarize->parsed()) {
            // Group result JSONs by (family, rho) and fold their traces.
            std::vector<std::string> result_files;
            for (const auto& input : summarize_inputs) {
                if (fs::is_directory(input)) {
                    for (const auto& entry : fs::directory_iterator(input))
                        if (entry.path().extension() == ".json")
                            result_files.push_back(entry.path().string());
                } else {
                    result_files.push_back(input);
                }
            }
            std::sort(result_files.begin(), result_files.end());
            std::map<std::pair<std::string, double>, std::vector<std::vector<IterationRecord>>>
                groups;
            for (const auto& file : result_files) {
                std::ifstream in(file);
                if (!in) throw std::runtime_error("cannot open: " + file);
                json j;
                in >> j;
                const std::string family = j.value("family", "unknown");
                const double rho = j.value("rho", 0.0);
                fs::path trace_path = fs::path(file);
                trace_path.replace_extension(".csv");
                groups[{family, rho}].push_back(read_trace_file(trace_path.string()));
            }
            std::vector<SummaryRow> rows;
            for (const auto& [key, traces] : groups)
                rows.push_back(summarize_traces(key.first, key.second, traces));
            std::ofstream out(summarize_out);
            write_summary_csv(rows, out);
            std::cout << "wrote " << summarize_out << " (" << rows.size() << " rows)\n";
            return 0;
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
