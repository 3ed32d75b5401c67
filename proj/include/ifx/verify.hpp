#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "ifx/config.hpp"
#include "ifx/constitutive.hpp"
#include "ifx/continuation.hpp"
#include "ifx/diagnostics.hpp"
#include "ifx/field_io.hpp"
#include "ifx/grid.hpp"
#include "ifx/rng.hpp"
#include "ifx/scenario.hpp"
#include "ifx/solver.hpp"
#include "ifx/spectral.hpp"

namespace ifx {

// ============================================================================
// Self-contained property suites, one line of verdict per module area.
// Desk-scale sample counts: the whole battery runs in a few seconds.
// ============================================================================

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

namespace verify_detail {

inline double log_uniform(SplitMix64& rng, double lo_exp, double hi_exp) {
    return std::pow(10.0, rng.uniform(lo_exp, hi_exp));
}

inline Vec<2> random_direction(SplitMix64& rng) {
    while (true) {
        Vec<2> v = make_vec(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        double n = norm(v);
        if (n > 1e-3 && n <= 1.0) return v * (1.0 / n);
    }
}

inline void check(bool ok, const char* what, std::string& failure) {
    if (!ok && failure.empty()) failure = what;
}

inline CheckResult run_check(const std::string& name,
                             const std::function<std::string()>& body) {
    CheckResult result;
    result.name = name;
    try {
        std::string failure = body();
        result.pass = failure.empty();
        result.detail = failure.empty() ? "ok" : failure;
    } catch (const std::exception& e) {
        result.pass = false;
        result.detail = std::string("exception: ") + e.what();
    }
    return result;
}

inline std::string check_constitutive_inequalities() {
    SplitMix64 rng(1001);
    const double as[] = {0.3, 0.5, 1.0, 2.0, 5.0};
    std::string failure;
    for (int i = 0; i < 10000 && failure.empty(); ++i) {
        double a = as[i % 5];
        double eps = (i % 3 == 0) ? 0.5 : (i % 3 == 1) ? 0.1 : 0.01;
        Vec<2> q1 = random_direction(rng) * log_uniform(rng, -6.0, std::min(6.0, 10.0 / a));
        Vec<2> q2 = random_direction(rng) * log_uniform(rng, -6.0, std::min(6.0, 10.0 / a));
        Vec<2> dq = q1 - q2;
        double gap = dot(map_f(q1, a) - map_f(q2, a), dq);
        check(gap > -1e-12 * norm(dq) * norm(dq), "strict monotonicity", failure);
        double strong = dot(map_f_eps(q1, a, eps) - map_f_eps(q2, a, eps), dq);
        check(strong >= eps * dot(dq, dq) * (1.0 - 1e-12), "strong monotonicity", failure);
        check(norm(map_f(q1, a)) < 1.0, "unit ball bound", failure);

        Vec<2> v = random_direction(rng) * log_uniform(rng, -3.0, 3.0);
        Vec<2> w = random_direction(rng) * log_uniform(rng, -3.0, 3.0);
        FluxMetric<2> A = jacobian_A(q1, a);
        double vv = dot(v, v);
        double va = dot(v, A.apply(v));
        double lo = detail::shifted_power(norm(q1), a, -(1.0 + a)) * vv;
        double mid = detail::shifted_power(norm(q1), a, -1.0) * vv;
        check(vv >= va * (1.0 - 1e-12), "sandwich upper", failure);
        check(mid >= va * (1.0 - 1e-12), "sandwich weight", failure);
        check(va >= lo * (1.0 - 1e-12), "sandwich lower", failure);
        check(std::abs(dot(v, A.apply(w))) <= 2.0 * norm(v) * norm(w) * (1.0 + 1e-12),
              "weighted product bound", failure);
    }
    return failure;
}

inline std::string check_inversion_roundtrip() {
    SplitMix64 rng(1002);
    const double as[] = {0.3, 0.5, 1.0, 2.0, 5.0};
    std::string failure;
    for (int i = 0; i < 2000 && failure.empty(); ++i) {
        double a = as[i % 5];
        double eps = (i % 3 == 0) ? 0.0 : (i % 3 == 1) ? 0.1 : 1e-3;
        double r = (eps == 0.0) ? rng.uniform(0.0, 0.999) : log_uniform(rng, -6.0, 3.0);
        Vec<2> y = random_direction(rng) * r;
        Vec<2> q = invert_map(y, a, eps);
        Vec<2> back = map_f_eps(q, a, eps);
        check(norm(back - y) <= 1e-10 * (1.0 + norm(y)), "roundtrip tolerance", failure);
    }
    if (failure.empty()) {
        try {
            invert_radial(1.0, 2.0, 0.0);
            failure = "missing domain error at the unit sphere";
        } catch (const DomainExceeded&) {
        }
    }
    return failure;
}

inline std::string check_jacobian_fd() {
    SplitMix64 rng(1003);
    const double as[] = {0.3, 1.0, 2.0, 5.0};
    std::string failure;
    for (int i = 0; i < 300 && failure.empty(); ++i) {
        double a = as[i % 4];
        Vec<2> q = random_direction(rng) * log_uniform(rng, -8.0, 8.0);
        double step = 1e-5 * norm(q);
        FluxMetric<2> A = jacobian_A(q, a);
        double num = 0.0, den = 0.0;
        for (int c = 0; c < 2; ++c) {
            Vec<2> e;
            e[c] = step;
            Vec<2> fd = (map_f(q + e, a) - map_f(q - e, a)) * (1.0 / (2.0 * step));
            for (int r = 0; r < 2; ++r) {
                num += (fd[r] - A(r, c)) * (fd[r] - A(r, c));
                den += A(r, c) * A(r, c);
            }
        }
        check(std::sqrt(num) <= 1e-6 * std::sqrt(den), "finite-difference agreement", failure);
    }
    return failure;
}

inline std::string check_truncation() {
    std::string failure;
    for (double k : {1.0, 5.0, 20.0}) {
        for (double a : {0.5, 1.0, 2.0}) {
            Truncation tr(k, a);
            check(tau_k(k, tr) == 1.0, "flat below threshold", failure);
            check(tau_k(k + 1.0, tr) == 0.0, "zero above threshold", failure);
            for (int i = 0; i <= 100; ++i) {
                double d = tau_k_prime(k + i / 100.0, tr);
                check(d <= 0.0 && d >= -2.0, "slope range", failure);
            }
            double g = G_k(k + 2.0, tr);
            double bound = std::pow(2.0, (a + 1.0) / a) * (1.0 + k);
            check(std::abs(g) <= bound * (1.0 + 1e-12), "antiderivative growth bound", failure);
        }
    }
    check(std::abs(G_k(2.0, Truncation(1.0, 1.0)) + 2.5) <= 1e-9, "closed-form value", failure);
    return failure;
}

inline std::string check_grid_duality() {
    SplitMix64 rng(1004);
    std::string failure;
    for (int n : {32, 64}) {
        PeriodicGrid<2> g = PeriodicGrid<2>::uniform(n, 1.0);
        ScalarField<2> phi(g);
        VectorField<2> F(g);
        for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = rng.uniform(-1.0, 1.0);
        for (int c = 0; c < 2; ++c)
            for (std::size_t i = 0; i < F.size(); ++i) F.comp[c][i] = rng.uniform(-1.0, 1.0);
        double lhs = inner_l2(divergence(F), phi);
        VectorField<2> gp = gradient(phi);
        double rhs = 0.0, fn = 0.0;
        for (std::size_t i = 0; i < phi.size(); ++i) {
            rhs += dot(F.get(i), gp.get(i));
            fn += dot(F.get(i), F.get(i));
        }
        rhs *= g.cell_volume();
        fn = std::sqrt(fn * g.cell_volume());
        check(std::abs(lhs + rhs) <= 1e-13 * std::max(1e-30, fn * norm_l2(phi)),
              "summation-by-parts duality", failure);
    }
    return failure;
}

inline std::string check_spectral() {
    SplitMix64 rng(1005);
    PeriodicGrid<2> g = PeriodicGrid<2>::uniform(16, 1.0);
    ScalarField<2> u(g);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = rng.uniform(-1.0, 1.0);
    std::string failure;
    ScalarField<2> p = spectral_project(u, 9);
    ScalarField<2> pp = spectral_project(p, 9);
    for (std::size_t i = 0; i < u.size(); ++i)
        check(std::abs(pp[i] - p[i]) <= 1e-11, "idempotence", failure);
    check(norm_l2(p) <= norm_l2(u) * (1.0 + 1e-12), "non-expansive", failure);
    ScalarField<2> full = spectral_project(u, static_cast<int>(g.total()));
    for (std::size_t i = 0; i < u.size(); ++i)
        check(std::abs(full[i] - u[i]) <= 1e-11, "full basis identity", failure);
    return failure;
}

inline std::string check_field_io() {
    SplitMix64 rng(1006);
    PeriodicGrid<2> g = PeriodicGrid<2>::uniform(8, 0.5);
    ScalarField<2> u(g);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = rng.uniform(-1.0, 1.0);
    std::string path =
        (std::filesystem::temp_directory_path() / "ifx_verify_roundtrip.ifx").string();
    write_field(path, u, 0.625);
    auto [loaded, t] = read_scalar_field<2>(path);
    std::filesystem::remove(path);
    std::string failure;
    check(t == 0.625, "time roundtrip", failure);
    for (std::size_t i = 0; i < u.size(); ++i)
        check(loaded[i] == u[i], "bit-exact payload", failure);
    return failure;
}

inline std::string check_config_roundtrip() {
    std::string text =
        "# sample\n[model]\na = 0.5\nepsilon = 1e-3\n\n[solver]\nn = 64\ndt = 1e-3  ; step\n";
    Config one = Config::parse(text);
    Config two = Config::parse(one.serialize());
    std::string failure;
    check(one == two, "parse-serialize-parse identity", failure);
    check(one.get_double("model", "a", 0.0) == 0.5, "typed getter", failure);
    try {
        Config::parse("orphan = 1\n");
        failure = "missing error for key outside section";
    } catch (const ConfigError&) {
    }
    return failure;
}

inline std::string check_solver_uniform_exactness() {
    ModelParams params;
    params.d = 1;
    params.epsilon = 1e-2;
    SolverConfig config;
    config.n = 16;
    config.dt = 1e-2;
    config.t_end = 0.1;
    Scenario<1> s;
    s.id = "uniform-forcing";
    s.u0 = [](const PeriodicGrid<1>& g) { return ScalarField<1>(g); };
    s.g = [](double, const PeriodicGrid<1>& g) {
        ScalarField<1> f(g);
        for (auto& x : f.v) x = 0.7;
        return f;
    };
    Trajectory<1> traj = run(s, params, config);
    std::string failure;
    const State<1>& last = traj.states.back();
    for (std::size_t i = 0; i < last.u.size(); ++i)
        check(std::abs(last.u[i] - 0.7 * 0.1) <= 1e-12, "spatially uniform ODE exactness",
              failure);
    check(sup_norm(last.q) <= 1e-12, "zero flux on uniform data", failure);
    return failure;
}

inline std::string check_solver_manufactured() {
    ModelParams params;
    params.d = 1;
    params.a = 1.0;
    params.epsilon = 1e-2;
    SolverConfig config;
    config.n = 32;
    config.dt = 1e-3;
    config.t_end = 0.02;
    Scenario<1> s = scenario_manufactured<1>(params, 0.5);
    Trajectory<1> traj = run(s, params, config);
    std::string failure;
    const State<1>& last = traj.states.back();
    double amp = 0.5 * params.L / (2.0 * std::numbers::pi);
    ScalarField<1> exact = s.exact(last.t, last.u.grid);
    double err = 0.0;
    for (std::size_t i = 0; i < last.u.size(); ++i)
        err = std::max(err, std::abs(last.u[i] - exact[i]));
    check(err <= 0.05 * amp, "manufactured-solution tracking", failure);
    return failure;
}

inline std::string check_explicit_stability_gate() {
    ModelParams params;
    params.d = 1;
    params.epsilon = 1e-2;
    SolverConfig config;
    config.n = 32;
    config.dt = 1e-3;  // far above eps h^2 / 2 ~ 4.9e-6
    config.t_end = 0.01;
    config.scheme = Scheme::explicit_euler;
    Scenario<1> s = scenario_zero<1>();
    try {
        run(s, params, config);
        return "missing StabilityViolation for oversized explicit step";
    } catch (const StabilityViolation&) {
        return "";
    }
}

inline std::string check_energy_ledger() {
    ModelParams params;
    params.d = 1;
    params.a = 1.0;
    params.epsilon = 1e-2;
    params.U = 0.5;
    SolverConfig config;
    config.n = 32;
    config.dt = 1e-3;
    config.t_end = 0.02;
    config.newton_tol = 1e-12;
    Scenario<1> s = scenario_random_smooth<1>(params, 424242, 0.5);
    s.id = "random-smooth-source-free";
    s.g = [](double, const PeriodicGrid<1>& g) { return ScalarField<1>(g); };
    Trajectory<1> traj = run(s, params, config);
    EnergyCheckReport report = energy_ledger_check(traj);
    std::string failure;
    check(report.pass, "per-step energy inequality", failure);
    check(report.source_free, "source-free detection", failure);
    for (std::size_t i = 1; i < traj.records.size(); ++i)
        check(traj.records[i].l2_u <= traj.records[i - 1].l2_u * (1.0 + 1e-10),
              "monotone decay without forcing", failure);
    return failure;
}

inline std::string check_initial_bound() {
    ModelParams params;
    params.d = 1;
    params.a = 2.0;
    params.epsilon = 0.0;
    params.U = 0.9;
    PeriodicGrid<1> g = PeriodicGrid<1>::uniform(64, params.L);
    Scenario<1> s = scenario_random_smooth<1>(params, 7, 0.9);
    ScalarField<1> u0 = s.u0(g);
    VectorField<1> q0 = initial_flux(u0, params);
    InitialBoundReport report = initial_bound_check(q0, params);
    std::string failure;
    check(report.pass, "initial flux bound", failure);
    double expected = 0.9 / std::sqrt(1.0 - 0.81);
    check(std::abs(report.bound - expected) <= 1e-12 * expected, "closed-form bound value",
          failure);
    return failure;
}

inline std::string check_determinism() {
    ModelParams params;
    params.d = 1;
    params.a = 1.0;
    params.epsilon = 1e-2;
    params.U = 0.5;
    SolverConfig config;
    config.n = 32;
    config.dt = 1e-3;
    config.t_end = 0.01;
    Scenario<1> s1 = scenario_random_smooth<1>(params, 99, 0.5);
    Scenario<1> s2 = scenario_random_smooth<1>(params, 99, 0.5);
    Trajectory<1> t1 = run(s1, params, config);
    Trajectory<1> t2 = run(s2, params, config);
    std::string failure;
    check(ledger_csv(t1.records) == ledger_csv(t2.records), "byte-identical ledgers", failure);
    const ScalarField<1>&u1 = t1.states.back().u, &u2 = t2.states.back().u;
    for (std::size_t i = 0; i < u1.size(); ++i)
        check(u1[i] == u2[i], "bit-identical final fields", failure);
    return failure;
}

inline std::string check_richardson_synthetic() {
    PeriodicGrid<1> g = PeriodicGrid<1>::uniform(32, 1.0);
    SplitMix64 rng(1007);
    ScalarField<1> star(g), slope(g);
    for (std::size_t i = 0; i < star.size(); ++i) {
        star[i] = rng.uniform(-1.0, 1.0);
        slope[i] = rng.uniform(-1.0, 1.0);
    }
    SweepReport<1> report;
    for (double eps : {0.02, 0.01, 0.005}) {
        SweepEntry<1> entry;
        entry.epsilon = eps;
        entry.ok = true;
        ScalarField<1> u(g);
        for (std::size_t i = 0; i < u.size(); ++i) u[i] = star[i] + eps * slope[i];
        entry.final_u = u;
        report.entries.push_back(std::move(entry));
    }
    RichardsonResult<1> result = richardson_limit(report);
    std::string failure;
    for (std::size_t i = 0; i < star.size(); ++i)
        check(std::abs(result.u[i] - star[i]) <= 1e-10, "first-order family recovery", failure);
    check(result.defect_l2 <= 1e-10, "vanishing defect on the exact model", failure);
    return failure;
}

inline std::string check_sweep_residual_identity() {
    ModelParams params;
    params.d = 1;
    params.a = 1.0;
    SweepPlan plan;
    plan.base = params;
    plan.epsilons = {0.1, 0.05, 0.025};
    plan.config.n = 32;
    plan.config.dt = 2e-3;
    plan.config.t_end = 0.02;
    Scenario<1> s = scenario_poiseuille(1.0);
    SweepReport<1> report = eps_sweep(s, plan);
    std::string failure;
    for (const auto& entry : report.entries) {
        check(entry.ok, "sweep entry completes", failure);
        if (!entry.ok) break;
        check(std::abs(entry.residual_inf - entry.predicted) <= entry.residual_tol,
              "residual equals epsilon times max flux", failure);
    }
    return failure;
}

}  // namespace verify_detail

inline std::vector<CheckResult> run_verification_suites() {
    using namespace verify_detail;
    std::vector<CheckResult> results;
    results.push_back(run_check("constitutive/inequalities", check_constitutive_inequalities));
    results.push_back(run_check("constitutive/inversion-roundtrip", check_inversion_roundtrip));
    results.push_back(run_check("constitutive/jacobian-fd", check_jacobian_fd));
    results.push_back(run_check("constitutive/truncation", check_truncation));
    results.push_back(run_check("grid/duality", check_grid_duality));
    results.push_back(run_check("grid/spectral-projection", check_spectral));
    results.push_back(run_check("grid/field-io", check_field_io));
    results.push_back(run_check("cli/config-roundtrip", check_config_roundtrip));
    results.push_back(run_check("solver/uniform-exactness", check_solver_uniform_exactness));
    results.push_back(run_check("solver/manufactured-tracking", check_solver_manufactured));
    results.push_back(run_check("solver/explicit-stability-gate", check_explicit_stability_gate));
    results.push_back(run_check("diagnostics/energy-ledger", check_energy_ledger));
    results.push_back(run_check("diagnostics/initial-bound", check_initial_bound));
    results.push_back(run_check("cli/determinism", check_determinism));
    results.push_back(run_check("continuation/richardson-synthetic", check_richardson_synthetic));
    results.push_back(run_check("continuation/residual-identity", check_sweep_residual_identity));
    return results;
}

}  // namespace ifx
