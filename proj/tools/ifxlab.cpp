/// @file ifxlab.cpp
/// @brief Batch driver: single trajectories, regularization sweeps, property
///        verification, and a channel-flow shortcut. Outputs land in a fixed
///        layout (ledger.csv, fields/t_<index>.ifx, report.json) so plotting
///        stays scriptable.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ifx/config.hpp"
#include "ifx/continuation.hpp"
#include "ifx/diagnostics.hpp"
#include "ifx/field_io.hpp"
#include "ifx/scenario.hpp"
#include "ifx/solver.hpp"
#include "ifx/verify.hpp"

namespace {

using ordered_json = nlohmann::ordered_json;

// ============================================================================
// Option plumbing
// ============================================================================

struct CliOptions {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<double> a, epsilon, dt, t_end, U;
    std::optional<int> n;
    std::optional<std::string> scheme;
};

void add_common_flags(CLI::App* cmd, CliOptions& opts) {
    cmd->add_option("--config", opts.config_path, "Sectioned key-value config file");
    cmd->add_option("--out", opts.out_dir, "Output directory (default: out)");
    cmd->add_option("--seed", opts.seed, "Scenario seed ([scenario] seed)");
    cmd->add_option("--a", opts.a, "Constitutive exponent ([model] a)");
    cmd->add_option("--epsilon", opts.epsilon, "Regularization ([model] epsilon)");
    cmd->add_option("--n", opts.n, "Grid points per axis ([solver] n)");
    cmd->add_option("--dt", opts.dt, "Time step ([solver] dt)");
    cmd->add_option("--t-end", opts.t_end, "Final time ([solver] t_end)");
    cmd->add_option("--U", opts.U, "Initial gradient bound ([model] U)");
    cmd->add_option("--scheme", opts.scheme, "implicit_euler or explicit_euler");
}

// Load the config file (if any) and fold the command-line overrides in, so
// every downstream consumer sees one merged key-value view.
ifx::Config merged_config(const CliOptions& opts) {
    ifx::Config cfg;
    if (!opts.config_path.empty()) cfg = ifx::Config::parse_file(opts.config_path);
    auto fmt = [](double v) { return ifx::detail::format_g17(v); };
    if (opts.seed) cfg.set("scenario", "seed", std::to_string(*opts.seed));
    if (opts.a) cfg.set("model", "a", fmt(*opts.a));
    if (opts.epsilon) cfg.set("model", "epsilon", fmt(*opts.epsilon));
    if (opts.U) cfg.set("model", "U", fmt(*opts.U));
    if (opts.n) cfg.set("solver", "n", std::to_string(*opts.n));
    if (opts.dt) cfg.set("solver", "dt", fmt(*opts.dt));
    if (opts.t_end) cfg.set("solver", "t_end", fmt(*opts.t_end));
    if (opts.scheme) cfg.set("solver", "scheme", *opts.scheme);
    if (!opts.out_dir.empty()) cfg.set("output", "dir", opts.out_dir);
    return cfg;
}

void check_vocabulary(const ifx::Config& cfg) {
    cfg.check_known_sections({"scenario", "model", "solver", "output", "sweep"});
    cfg.check_known_keys("scenario", {"kind", "seed", "drop", "grad_cap", "omega"});
    cfg.check_known_keys("model", {"a", "epsilon", "d", "L", "U"});
    cfg.check_known_keys("solver", {"n", "dt", "t_end", "scheme", "newton_tol",
                                    "newton_max_iter", "linear_tol", "linear_max_iter",
                                    "record_every"});
    cfg.check_known_keys("output", {"dir", "write_fields"});
    cfg.check_known_keys("sweep", {"epsilons", "b", "probe", "richardson"});
}

ifx::ModelParams read_model(const ifx::Config& cfg) {
    ifx::ModelParams params;
    params.a = cfg.get_double("model", "a", params.a);
    params.epsilon = cfg.get_double("model", "epsilon", params.epsilon);
    params.d = static_cast<int>(cfg.get_int("model", "d", params.d));
    params.L = cfg.get_double("model", "L", params.L);
    params.U = cfg.get_double("model", "U", params.U);
    params.validate();
    return params;
}

ifx::SolverConfig read_solver(const ifx::Config& cfg) {
    ifx::SolverConfig config;
    config.n = static_cast<int>(cfg.get_int("solver", "n", config.n));
    config.dt = cfg.get_double("solver", "dt", config.dt);
    config.t_end = cfg.get_double("solver", "t_end", config.t_end);
    config.scheme = ifx::parse_scheme(cfg.get_string("solver", "scheme", "implicit_euler"));
    config.newton_tol = cfg.get_double("solver", "newton_tol", config.newton_tol);
    config.newton_max_iter =
        static_cast<int>(cfg.get_int("solver", "newton_max_iter", config.newton_max_iter));
    config.linear_tol = cfg.get_double("solver", "linear_tol", config.linear_tol);
    config.linear_max_iter =
        static_cast<int>(cfg.get_int("solver", "linear_max_iter", config.linear_max_iter));
    config.record_every =
        static_cast<int>(cfg.get_int("solver", "record_every", config.record_every));
    config.validate();
    return config;
}

template <int D>
ifx::Scenario<D> read_scenario(const ifx::Config& cfg, const ifx::ModelParams& params,
                               const std::string& default_kind) {
    std::string kind = cfg.get_string("scenario", "kind", default_kind);
    std::uint64_t seed = cfg.get_u64("scenario", "seed", 1);
    if (kind == "zero") return ifx::scenario_zero<D>();
    if (kind == "random_smooth") return ifx::scenario_random_smooth<D>(params, seed, params.U);
    if (kind == "manufactured") {
        double grad_cap = cfg.get_double("scenario", "grad_cap", 0.5);
        double omega = cfg.get_double("scenario", "omega", 2.0 * std::numbers::pi);
        return ifx::scenario_manufactured<D>(params, grad_cap, omega);
    }
    if (kind == "poiseuille") {
        if constexpr (D == 1) {
            double drop = cfg.get_double("scenario", "drop", 1.0);
            return ifx::scenario_poiseuille(drop);
        } else {
            throw ifx::ConfigError("scenario: poiseuille is a d = 1 scenario");
        }
    }
    throw ifx::ConfigError("scenario: unknown kind '" + kind +
                           "' (expected zero, poiseuille, manufactured, random_smooth)");
}

std::string output_dir(const ifx::Config& cfg) { return cfg.get_string("output", "dir", "out"); }

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ifx::ConfigError("cannot open output file '" + path.string() + "'");
    out << text;
}

ordered_json params_json(const ifx::ModelParams& params) {
    return ordered_json{{"a", params.a},
                        {"epsilon", params.epsilon},
                        {"d", params.d},
                        {"L", params.L},
                        {"U", params.U}};
}

ordered_json solver_json(const ifx::SolverConfig& config) {
    return ordered_json{{"n", config.n},
                        {"dt", config.dt},
                        {"t_end", config.t_end},
                        {"scheme", ifx::scheme_name(config.scheme)},
                        {"newton_tol", config.newton_tol},
                        {"newton_max_iter", config.newton_max_iter},
                        {"linear_tol", config.linear_tol},
                        {"linear_max_iter", config.linear_max_iter},
                        {"record_every", config.record_every}};
}

// ============================================================================
// run / poiseuille
// ============================================================================

template <int D>
int do_run(const ifx::Config& cfg, const std::string& default_kind) {
    ifx::ModelParams params = read_model(cfg);
    ifx::SolverConfig config = read_solver(cfg);
    ifx::Scenario<D> scenario = read_scenario<D>(cfg, params, default_kind);
    bool write_fields = cfg.get_bool("output", "write_fields", true);

    std::filesystem::path out(output_dir(cfg));
    std::filesystem::create_directories(out / "fields");

    ifx::Trajectory<D> traj = ifx::run(scenario, params, config);

    write_text(out / "ledger.csv", ifx::ledger_csv(traj.records));

    std::vector<std::string> field_files;
    if (write_fields) {
        for (std::size_t i = 0; i < traj.states.size(); ++i) {
            char name[32];
            std::snprintf(name, sizeof(name), "t_%04zu.ifx", i);
            std::string upath = (out / "fields" / name).string();
            ifx::write_field(upath, traj.states[i].u, traj.states[i].t);
            field_files.push_back(upath);
            std::snprintf(name, sizeof(name), "q_%04zu.ifx", i);
            ifx::write_field((out / "fields" / name).string(), traj.states[i].q,
                             traj.states[i].t);
        }
    }

    ifx::EnergyCheckReport energy = ifx::energy_ledger_check(traj);
    ifx::InitialBoundReport bound = ifx::initial_bound_check(traj.states.front().q, params);
    double residual = 0.0;
    for (const auto& st : traj.states)
        residual = std::max(residual, ifx::constitutive_residual_inf(st, params));

    ordered_json report;
    report["scenario"] = traj.scenario_id;
    report["model"] = params_json(params);
    report["solver"] = solver_json(config);
    report["recorded_states"] = traj.states.size();
    report["final"] = ordered_json{{"t", traj.states.back().t},
                                   {"l2_u", traj.records.back().l2_u},
                                   {"sup_grad_u", traj.records.back().sup_grad_u},
                                   {"max_abs_q", ifx::sup_norm(traj.states.back().q)}};
    report["constitutive_residual_inf"] = residual;
    report["energy_check"] = ordered_json{{"pass", energy.pass},
                                          {"stepwise", energy.stepwise},
                                          {"source_free", energy.source_free}};
    report["initial_bound"] = ordered_json{
        {"pass", bound.pass}, {"max_q", bound.max_q}, {"bound", bound.bound}};
    report["files"] =
        ordered_json{{"ledger", (out / "ledger.csv").string()}, {"fields", field_files}};
    write_text(out / "report.json", report.dump(2) + "\n");

    std::printf("run complete: %s (%zu recorded states) -> %s\n", traj.scenario_id.c_str(),
                traj.states.size(), out.string().c_str());
    return 0;
}

int dispatch_run(const CliOptions& opts, const std::string& default_kind, bool force_kind) {
    ifx::Config cfg = merged_config(opts);
    if (force_kind) cfg.set("scenario", "kind", default_kind);
    check_vocabulary(cfg);
    int d = static_cast<int>(cfg.get_int("model", "d", 1));
    if (d == 1) return do_run<1>(cfg, default_kind);
    if (d == 2) return do_run<2>(cfg, default_kind);
    throw ifx::ConfigError("model: d must be 1 or 2");
}

// ============================================================================
// sweep
// ============================================================================

template <int D>
int do_sweep(const ifx::Config& cfg) {
    ifx::SweepPlan plan;
    plan.base = read_model(cfg);
    plan.config = read_solver(cfg);
    std::vector<double> eps_list = cfg.get_double_list("sweep", "epsilons");
    if (!eps_list.empty()) plan.epsilons = eps_list;
    plan.b_for_1d = cfg.get_double("sweep", "b", plan.b_for_1d);
    bool probe_requested = cfg.get_bool("sweep", "probe", false);
    bool richardson_requested = cfg.get_bool("sweep", "richardson", true);

    // Probe preconditions are configuration errors: surface them before any
    // scenario construction or solve starts.
    ifx::FluxExponent fe = ifx::flux_exponent(plan.base, plan.b_for_1d);
    if (probe_requested && !fe.valid)
        throw ifx::ConfigError(
            "sweep: integrability probe requested but a is outside the admissible range "
            "(need a < 2/(d+1) when d >= 2, a < 1 when d = 1)");

    ifx::Scenario<D> scenario =
        read_scenario<D>(cfg, plan.base, D == 1 ? "poiseuille" : "random_smooth");

    std::filesystem::path out(output_dir(cfg));
    std::filesystem::create_directories(out / "fields");

    ifx::SweepReport<D> report = ifx::eps_sweep(scenario, plan);

    ordered_json doc;
    doc["scenario"] = scenario.id;
    doc["model"] = params_json(plan.base);
    doc["solver"] = solver_json(plan.config);
    doc["b"] = report.b;
    doc["epsilons"] = plan.epsilons;

    ordered_json entries = ordered_json::array();
    for (std::size_t m = 0; m < report.entries.size(); ++m) {
        const auto& e = report.entries[m];
        ordered_json item;
        item["epsilon"] = e.epsilon;
        item["ok"] = e.ok;
        if (!e.ok) {
            item["error"] = e.error;
        } else {
            item["residual_inf"] = e.residual_inf;
            item["predicted_residual"] = e.predicted;
            item["residual_tol"] = e.residual_tol;
            item["max_abs_q"] = e.max_abs_q;
            item["lb_norm"] = e.lb_norm;
            item["final_l2_u"] = e.final_l2_u;
            if (e.final_u.has_value()) {
                char name[40];
                std::snprintf(name, sizeof(name), "eps_%02zu_final.ifx", m);
                std::string path = (out / "fields" / name).string();
                ifx::write_field(path, *e.final_u, plan.config.t_end);
                item["final_field"] = path;
            }
        }
        entries.push_back(std::move(item));
    }
    doc["entries"] = std::move(entries);

    ordered_json cauchy = ordered_json::array();
    for (std::size_t i = 0; i < report.cauchy_l2.size(); ++i)
        cauchy.push_back(ordered_json{{"eps_hi", report.cauchy_pairs[i].first},
                                      {"eps_lo", report.cauchy_pairs[i].second},
                                      {"l2q_diff", report.cauchy_l2[i]}});
    doc["cauchy"] = std::move(cauchy);

    if (probe_requested) {
        ifx::ProbeVerdict verdict;
        verdict.b = report.b;
        std::vector<double> ok_norms;
        for (const auto& e : report.entries)
            if (e.ok) {
                verdict.lb_norms.emplace_back(e.epsilon, e.lb_norm);
                ok_norms.push_back(e.lb_norm);
            }
        ordered_json probe;
        probe["b"] = verdict.b;
        ordered_json norms = ordered_json::array();
        for (const auto& [eps, nb] : verdict.lb_norms)
            norms.push_back(ordered_json{{"epsilon", eps}, {"lb_norm", nb}});
        probe["lb_norms"] = std::move(norms);
        if (ok_norms.size() >= 3) {
            double lo = ok_norms[ok_norms.size() - 3], hi = lo;
            for (std::size_t i = ok_norms.size() - 3; i < ok_norms.size(); ++i) {
                lo = std::min(lo, ok_norms[i]);
                hi = std::max(hi, ok_norms[i]);
            }
            probe["spread_last3"] = lo > 0.0 ? hi / lo : 1.0;
            probe["bounded"] = lo > 0.0 ? (hi / lo < 2.0) : true;
        } else {
            probe["bounded"] = false;
            probe["note"] = "fewer than three successful entries";
        }
        doc["integrability_probe"] = std::move(probe);
    }

    if (richardson_requested) {
        ordered_json rich;
        try {
            ifx::RichardsonResult<D> limit = ifx::richardson_limit(report);
            std::string path = (out / "fields" / "limit.ifx").string();
            ifx::write_field(path, limit.u, plan.config.t_end);
            rich["defect_l2"] = limit.defect_l2;
            rich["degenerate"] = limit.degenerate;
            rich["field"] = path;
        } catch (const ifx::ConfigError& e) {
            rich["error"] = e.what();
        }
        doc["richardson"] = std::move(rich);
    }

    write_text(out / "report.json", doc.dump(2) + "\n");
    std::printf("sweep complete: %zu epsilon values -> %s\n", plan.epsilons.size(),
                out.string().c_str());
    return 0;
}

int dispatch_sweep(const CliOptions& opts) {
    ifx::Config cfg = merged_config(opts);
    check_vocabulary(cfg);
    int d = static_cast<int>(cfg.get_int("model", "d", 1));
    if (d == 1) return do_sweep<1>(cfg);
    if (d == 2) return do_sweep<2>(cfg);
    throw ifx::ConfigError("model: d must be 1 or 2");
}

// ============================================================================
// verify
// ============================================================================

int do_verify() {
    std::vector<ifx::CheckResult> results = ifx::run_verification_suites();
    int failed = 0;
    for (const auto& r : results) {
        if (r.pass) {
            std::printf("[PASS] %s\n", r.name.c_str());
        } else {
            std::printf("[FAIL] %s -- %s\n", r.name.c_str(), r.detail.c_str());
            ++failed;
        }
    }
    std::printf("%d/%zu checks passed\n", static_cast<int>(results.size()) - failed,
                results.size());
    return failed == 0 ? 0 : 1;
}

constexpr const char* kConfigHelp = R"(Config file keys (all optional; flags override):
  [scenario] kind = zero | poiseuille | manufactured | random_smooth
             seed = <u64>      random_smooth stream seed
             drop = <real>     poiseuille pressure drop
             grad_cap = <real> manufactured gradient amplitude
             omega = <real>    manufactured temporal frequency
  [model]    a, epsilon, d, L, U
  [solver]   n, dt, t_end, scheme, newton_tol, newton_max_iter,
             linear_tol, linear_max_iter, record_every
  [output]   dir, write_fields
  [sweep]    epsilons = e1,e2,...  (strictly decreasing; default 0.1 halving to 1e-4)
             b = <real>            flux integrability exponent for d = 1
             probe = true|false    request the integrability probe
             richardson = true|false  extrapolate the limit field (default true)

Exit codes: 0 success, 1 verification failure, 2 configuration error,
            3 solver error.)";

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ifxlab: implicit-flux evolution workbench"};
    app.footer(kConfigHelp);
    app.require_subcommand(1);

    CliOptions run_opts, sweep_opts, poiseuille_opts;
    CLI::App* cmd_run = app.add_subcommand("run", "Integrate one trajectory");
    add_common_flags(cmd_run, run_opts);
    CLI::App* cmd_sweep = app.add_subcommand("sweep", "Run a decreasing-epsilon continuation");
    add_common_flags(cmd_sweep, sweep_opts);
    CLI::App* cmd_verify = app.add_subcommand("verify", "Run all module property suites");
    CLI::App* cmd_poiseuille =
        app.add_subcommand("poiseuille", "Channel-flow shortcut (d = 1)");
    add_common_flags(cmd_poiseuille, poiseuille_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (cmd_run->parsed()) return dispatch_run(run_opts, "random_smooth", false);
        if (cmd_sweep->parsed()) return dispatch_sweep(sweep_opts);
        if (cmd_verify->parsed()) return do_verify();
        if (cmd_poiseuille->parsed()) return dispatch_run(poiseuille_opts, "poiseuille", true);
    } catch (const ifx::ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const ifx::NoConvergence& e) {
        std::fprintf(stderr, "solver error (no convergence): %s\n", e.what());
        return 3;
    } catch (const ifx::StabilityViolation& e) {
        std::fprintf(stderr, "solver error (stability): %s\n", e.what());
        return 3;
    } catch (const ifx::DomainExceeded& e) {
        std::fprintf(stderr, "solver error (domain): %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
