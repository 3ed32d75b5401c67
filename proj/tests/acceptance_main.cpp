/// @file acceptance_main.cpp
/// @brief Release acceptance sweep: thirteen numbered checks covering the
///        constitutive algebra at scale, operator duality, manufactured
///        convergence, contraction, the energy ledger, residual identities,
///        initial flux bounds, truncation machinery, the regularization
///        sweep, the integrability probe, and end-to-end determinism of the
///        command-line tool. Prints one [PASS]/[FAIL] line per criterion and
///        exits with the number of failures.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ifx/constitutive.hpp"
#include "ifx/continuation.hpp"
#include "ifx/diagnostics.hpp"
#include "ifx/grid.hpp"
#include "ifx/rng.hpp"
#include "ifx/scenario.hpp"
#include "ifx/solver.hpp"

using namespace ifx;

namespace {

// ============================================================================
// Harness plumbing
// ============================================================================

struct CriterionResult {
    bool pass = false;
    std::string detail;
};

double log_uniform(SplitMix64& rng, double lo_exp, double hi_exp) {
    return std::pow(10.0, rng.uniform(lo_exp, hi_exp));
}

template <int D>
Vec<D> random_direction(SplitMix64& rng) {
    while (true) {
        Vec<D> v;
        for (int i = 0; i < D; ++i) v[i] = rng.uniform(-1.0, 1.0);
        double n = norm(v);
        if (n > 1e-3) return v * (1.0 / n);
    }
}

std::string g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

// Exponent window on which 1 - |f(q)| is representable in double precision,
// so strict inequalities are meaningful rather than rounding accidents.
double strict_hi_exp(double a) { return std::min(6.0, 10.0 / a); }

constexpr double kAs[] = {0.3, 0.5, 1.0, 2.0, 5.0};

// Running audit for the constitutive residual identity: every trajectory
// produced by the acceptance runs is pushed through here (criterion 8).
struct ResidualAudit {
    long states = 0;
    int runs = 0;
    double worst_ratio = 0.0;
    long violations = 0;

    template <int D>
    void add(const Trajectory<D>& traj, const SolverConfig& config) {
        ++runs;
        for (const auto& st : traj.states) {
            double tol = config.newton_tol * (1.0 + sup_norm(st.q));
            double res = constitutive_residual_inf(st, traj.params);
            if (res > tol) ++violations;
            if (tol > 0.0) worst_ratio = std::max(worst_ratio, res / tol);
            ++states;
        }
    }
};

ResidualAudit g_audit;

// ============================================================================
// 1. Constitutive inequality suite at scale
// ============================================================================

CriterionResult criterion_constitutive() {
    constexpr int kSamples = 100000;
    const double eps_set[] = {1e-1, 1e-2, 1e-3};
    long bad_strict = 0, bad_strong = 0, bad_lipschitz = 0, bad_ball = 0, bad_sandwich = 0,
         bad_cauchy = 0;

    SplitMix64 rng(1001);
    for (int i = 0; i < kSamples; ++i) {  // strict monotonicity of the bare map
        double a = kAs[i % 5];
        double hi = strict_hi_exp(a);
        Vec<2> q1 = random_direction<2>(rng) * log_uniform(rng, -6.0, hi);
        Vec<2> q2 = random_direction<2>(rng) * log_uniform(rng, -6.0, hi);
        Vec<2> dq = q1 - q2;
        Vec<2> df = map_f(q1, a) - map_f(q2, a);
        double lhs = dot(df, dq);
        if (!(lhs > -1e-12 * norm(df) * norm(dq)) || !(lhs > 0.0)) ++bad_strict;
    }
    for (int i = 0; i < kSamples; ++i) {  // strong monotonicity of the regularized map
        double a = kAs[i % 5];
        double eps = eps_set[i % 3];
        Vec<2> q1 = random_direction<2>(rng) * log_uniform(rng, -6.0, 6.0);
        Vec<2> q2 = random_direction<2>(rng) * log_uniform(rng, -6.0, 6.0);
        Vec<2> dq = q1 - q2;
        double lhs = dot(map_f_eps(q1, a, eps) - map_f_eps(q2, a, eps), dq);
        if (!(lhs >= eps * dot(dq, dq) * (1.0 - 1e-12))) ++bad_strong;
    }
    for (int i = 0; i < kSamples; ++i) {  // inverse is (1/eps)-Lipschitz
        double a = kAs[i % 5];
        double eps = eps_set[i % 3];
        Vec<2> y1 = random_direction<2>(rng) * log_uniform(rng, -3.0, 0.5);
        Vec<2> y2 = random_direction<2>(rng) * log_uniform(rng, -3.0, 0.5);
        double lhs = norm(invert_map(y1, a, eps) - invert_map(y2, a, eps));
        if (!(lhs <= norm(y1 - y2) / eps * (1.0 + 1e-12))) ++bad_lipschitz;
    }
    for (int i = 0; i < kSamples; ++i) {  // image strictly inside the unit ball
        double a = kAs[i % 5];
        Vec<2> q = random_direction<2>(rng) * log_uniform(rng, -8.0, strict_hi_exp(a));
        if (!(norm(map_f(q, a)) < 1.0)) ++bad_ball;
    }
    for (int i = 0; i < kSamples; ++i) {  // four-way eigenvalue sandwich of A(q)
        double a = kAs[i % 5];
        Vec<2> q = random_direction<2>(rng) * log_uniform(rng, -6.0, 6.0);
        Vec<2> v = random_direction<2>(rng) * log_uniform(rng, -2.0, 2.0);
        double s = norm(q);
        double lo = detail::shifted_power(s, a, -(1.0 + a)) * dot(v, v);
        double mid = detail::shifted_power(s, a, -1.0) * dot(v, v);
        double vv = weighted_inner(v, v, q, a);
        bool ok = lo <= vv * (1.0 + 1e-12) && vv <= mid * (1.0 + 1e-12) &&
                  mid <= dot(v, v) * (1.0 + 1e-12) && lo <= dot(v, v) * (1.0 + 1e-12);
        if (!ok) ++bad_sandwich;
    }
    for (int i = 0; i < kSamples; ++i) {  // Cauchy-type bound on the weighted product
        double a = kAs[i % 5];
        Vec<2> q = random_direction<2>(rng) * log_uniform(rng, -6.0, 6.0);
        Vec<2> v = random_direction<2>(rng) * log_uniform(rng, -2.0, 2.0);
        Vec<2> w = random_direction<2>(rng) * log_uniform(rng, -2.0, 2.0);
        if (!(weighted_inner(v, w, q, a) <= 2.0 * norm(v) * norm(w) * (1.0 + 1e-12)))
            ++bad_cauchy;
    }

    long total = bad_strict + bad_strong + bad_lipschitz + bad_ball + bad_sandwich + bad_cauchy;
    std::ostringstream d;
    d << "6x" << kSamples << " samples; violations: strict=" << bad_strict
      << " strong=" << bad_strong << " lipschitz=" << bad_lipschitz << " ball=" << bad_ball
      << " sandwich=" << bad_sandwich << " cauchy=" << bad_cauchy;
    return {total == 0, d.str()};
}

// ============================================================================
// 2. Flux Jacobian versus central finite differences
// ============================================================================

CriterionResult criterion_jacobian() {
    constexpr int kSamples = 1000;
    const double a_set[] = {0.3, 1.0, 2.0, 5.0};
    SplitMix64 rng(1002);
    double worst = 0.0;
    int bad = 0;
    for (int i = 0; i < kSamples; ++i) {
        double a = a_set[i % 4];
        Vec<2> q = random_direction<2>(rng) * log_uniform(rng, -8.0, 8.0);
        FluxMetric<2> A = jacobian_A(q, a);
        double step = 1e-5 * norm(q);
        double num = 0.0, den = 0.0;
        for (int j = 0; j < 2; ++j) {
            Vec<2> e = Vec<2>::zero();
            e[j] = step;
            Vec<2> col = (map_f(q + e, a) - map_f(q - e, a)) * (1.0 / (2.0 * step));
            for (int r = 0; r < 2; ++r) {
                double diff = col[r] - A(r, j);
                num += diff * diff;
                den += A(r, j) * A(r, j);
            }
        }
        double rel = std::sqrt(num / den);
        worst = std::max(worst, rel);
        if (!(rel <= 1e-6)) ++bad;
    }
    std::ostringstream d;
    d << kSamples << " samples, |q| in [1e-8, 1e8], worst relative error " << g17(worst);
    return {bad == 0, d.str()};
}

// ============================================================================
// 3. Inversion roundtrip and domain guard
// ============================================================================

CriterionResult criterion_inversion() {
    constexpr int kSamples = 10000;
    SplitMix64 rng(1003);
    int bad_roundtrip = 0;
    double worst = 0.0;
    for (double eps : {0.0, 1e-1, 1e-3}) {
        for (int i = 0; i < kSamples; ++i) {
            double a = kAs[i % 5];
            double r = (eps == 0.0) ? rng.uniform(1e-8, 0.999) : log_uniform(rng, -6.0, 3.0);
            Vec<2> y = random_direction<2>(rng) * r;
            Vec<2> q = invert_map(y, a, eps);
            double err = norm(map_f_eps(q, a, eps) - y);
            worst = std::max(worst, err / (1.0 + norm(y)));
            if (!(err <= 1e-10 * (1.0 + norm(y)))) ++bad_roundtrip;
        }
    }
    int bad_domain = 0;
    for (double mag : {1.0, 1.0 + 1e-12, 1.5, 10.0, 1e8}) {
        for (double a : kAs) {
            for (int i = 0; i < 20; ++i) {
                Vec<2> y = random_direction<2>(rng) * mag;
                // Normalization rounding can pull |y| one ulp inside the unit
                // ball at mag = 1; judge against the realized norm.
                bool reachable = norm(y) < 1.0;
                bool threw = false;
                try {
                    invert_map(y, a, 0.0);
                } catch (const DomainExceeded&) {
                    threw = true;
                }
                if (threw == reachable) ++bad_domain;
            }
        }
    }
    std::ostringstream d;
    d << "3x" << kSamples << " roundtrips, worst scaled error " << g17(worst)
      << "; unreachable targets raising: " << (bad_domain == 0 ? "all" : "NOT all");
    return {bad_roundtrip == 0 && bad_domain == 0, d.str()};
}

// ============================================================================
// 4. Discrete duality of gradient and divergence
// ============================================================================

template <int D>
double duality_defect(int n, SplitMix64& rng) {
    PeriodicGrid<D> g = PeriodicGrid<D>::uniform(n, 1.0);
    ScalarField<D> phi(g);
    VectorField<D> F(g);
    for (auto& x : phi.v) x = rng.uniform(-1.0, 1.0);
    for (int c = 0; c < D; ++c)
        for (std::size_t i = 0; i < F.size(); ++i) F.comp[c][i] = rng.uniform(-1.0, 1.0);
    ScalarField<D> divF = divergence(F);
    VectorField<D> gphi = gradient(phi);
    const double vol = g.cell_volume();
    double pair_div = 0.0, pair_grad = 0.0, norm_F = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        pair_div += divF[i] * phi[i];
        pair_grad += dot(F.get(i), gphi.get(i));
        norm_F += dot(F.get(i), F.get(i));
    }
    double defect = std::abs(pair_div + pair_grad) * vol;
    double scale = std::sqrt(norm_F * vol) * norm_l2(phi);
    return defect / scale;
}

CriterionResult criterion_duality() {
    SplitMix64 rng(1004);
    double worst = 0.0;
    for (int n : {32, 64, 128}) {
        for (int trial = 0; trial < 5; ++trial) {
            worst = std::max(worst, duality_defect<1>(n, rng));
            worst = std::max(worst, duality_defect<2>(n, rng));
        }
    }
    std::ostringstream d;
    d << "n in {32,64,128}, d in {1,2}, worst relative defect " << g17(worst);
    return {worst <= 1e-13, d.str()};
}

// ============================================================================
// 5. Manufactured-solution convergence orders
// ============================================================================

CriterionResult criterion_manufactured() {
    ModelParams params;
    params.d = 1;
    params.a = 1.0;
    params.epsilon = 1e-2;
    Scenario<1> s = scenario_manufactured<1>(params, 0.7);

    std::vector<double> spatial_errs;
    for (int n : {32, 64, 128}) {
        SolverConfig config;
        config.n = n;
        config.dt = 1e-5;
        config.t_end = 1e-3;
        config.newton_tol = 1e-12;
        config.record_every = 100;
        Trajectory<1> traj = run(s, params, config);
        g_audit.add(traj, config);
        const State<1>& last = traj.states.back();
        spatial_errs.push_back(sup_abs(difference(last.u, s.exact(last.t, last.u.grid))));
    }
    std::vector<double> spatial_orders;
    for (std::size_t i = 0; i + 1 < spatial_errs.size(); ++i)
        spatial_orders.push_back(std::log2(spatial_errs[i] / spatial_errs[i + 1]));

    std::vector<ScalarField<1>> finals;
    for (double dt : {4e-3, 2e-3, 1e-3, 5e-4}) {
        SolverConfig config;
        config.n = 128;
        config.dt = dt;
        config.t_end = 0.04;
        config.newton_tol = 1e-12;
        config.record_every = 100;
        Trajectory<1> traj = run(s, params, config);
        g_audit.add(traj, config);
        finals.push_back(traj.states.back().u);
    }
    std::vector<double> temporal_orders;
    for (std::size_t i = 0; i + 2 < finals.size(); ++i) {
        double d1 = sup_abs(difference(finals[i], finals[i + 1]));
        double d2 = sup_abs(difference(finals[i + 1], finals[i + 2]));
        temporal_orders.push_back(std::log2(d1 / d2));
    }

    bool ok = true;
    std::ostringstream d;
    d << "spatial orders:";
    for (double o : spatial_orders) {
        d << " " << o;
        ok = ok && o >= 1.7 && o <= 2.3;
    }
    d << "; temporal orders:";
    for (double o : temporal_orders) {
        d << " " << o;
        ok = ok && o >= 0.8 && o <= 1.2;
    }
    return {ok, d.str()};
}

// ============================================================================
// 6. L2 contraction of implicit trajectories
// ============================================================================

CriterionResult criterion_contraction() {
    ModelParams params;
    params.d = 1;
    params.a = 1.0;
    params.epsilon = 1e-2;
    params.U = 0.95;
    SolverConfig config;
    config.n = 64;
    config.dt = 1e-3;
    config.t_end = 0.1;
    config.newton_tol = 1e-12;
    Scenario<1> s1 = scenario_random_smooth<1>(params, 5, 0.6);
    Scenario<1> s2 = s1;
    s2.u0 = [base = s1.u0](const PeriodicGrid<1>& g) {
        ScalarField<1> u = base(g);
        for (std::size_t i = 0; i < u.size(); ++i)
            u[i] += 0.05 * std::cos(2.0 * std::numbers::pi * g.position(i)[0]);
        return u;
    };
    Trajectory<1> t1 = run(s1, params, config);
    Trajectory<1> t2 = run(s2, params, config);
    g_audit.add(t1, config);
    g_audit.add(t2, config);

    double prev = norm_l2(difference(t1.states[0].u, t2.states[0].u));
    double worst_growth = 0.0;
    bool ok = true;
    for (std::size_t i = 1; i < t1.states.size(); ++i) {
        double cur = norm_l2(difference(t1.states[i].u, t2.states[i].u));
        worst_growth = std::max(worst_growth, (cur - prev) / prev);
        if (!(cur <= prev * (1.0 + 1e-10))) ok = false;
        prev = cur;
    }
    std::ostringstream d;
    d << t1.states.size() - 1 << " steps, worst relative growth " << g17(worst_growth);
    return {ok, d.str()};
}

// ============================================================================
// 7. Energy ledger on source-free decay
// ============================================================================

CriterionResult criterion_energy() {
    bool ok = true;
    std::ostringstream d;
    int runs = 0;
    for (double a : {0.5, 1.0}) {
        ModelParams params;
        params.d = 1;
        params.a = a;
        params.epsilon = 1e-2;
        params.U = 0.8;
        SolverConfig config;
        config.n = 64;
        config.dt = 1e-3;
        config.t_end = 0.05;
        config.newton_tol = 1e-12;
        Scenario<1> s = scenario_random_smooth<1>(params, 6, 0.8);
        s.g = [](double, const PeriodicGrid<1>& g) { return ScalarField<1>(g); };
        s.id = "decay";
        Trajectory<1> traj = run(s, params, config);
        g_audit.add(traj, config);
        EnergyCheckReport rep = energy_ledger_check(traj);
        bool monotone = true;
        for (std::size_t i = 1; i < traj.records.size(); ++i)
            monotone = monotone && traj.records[i].l2_u <= traj.records[i - 1].l2_u;
        ok = ok && rep.pass && rep.stepwise && rep.source_free && monotone;
        ++runs;
    }
    d << runs << " source-free runs: per-step inequality and monotone |u|^2";
    return {ok, d.str()};
}

// ============================================================================
// 8. Constitutive residual identity across all audited runs
// ============================================================================

CriterionResult criterion_residual_identity() {
    // Two dedicated runs exercising corners not visited above: an explicit
    // integrator and a 2D implicit run with a steep exponent.
    {
        ModelParams params;
        params.d = 1;
        params.a = 0.3;
        params.epsilon = 0.1;
        params.U = 0.5;
        SolverConfig config;
        config.n = 32;
        config.scheme = Scheme::explicit_euler;
        config.dt = 4e-5;  // below the 0.1 * h^2 / 2 gate
        config.t_end = 8e-3;
        config.record_every = 10;
        Scenario<1> s = scenario_random_smooth<1>(params, 7, 0.5);
        Trajectory<1> traj = run(s, params, config);
        g_audit.add(traj, config);
    }
    {
        ModelParams params;
        params.d = 2;
        params.a = 5.0;
        params.epsilon = 0.05;
        params.U = 0.7;
        SolverConfig config;
        config.n = 16;
        config.dt = 1e-3;
        config.t_end = 0.01;
        config.newton_tol = 1e-12;
        Scenario<2> s = scenario_random_smooth<2>(params, 8, 0.7);
        Trajectory<2> traj = run(s, params, config);
        g_audit.add(traj, config);
    }
    std::ostringstream d;
    d << g_audit.states << " recorded states over " << g_audit.runs
      << " runs, worst residual/tolerance " << g17(g_audit.worst_ratio);
    return {g_audit.violations == 0, d.str()};
}

// ============================================================================
// 9. Initial flux bound from the declared gradient cap
// ============================================================================

CriterionResult criterion_initial_bound() {
    bool ok = true;
    double pinned = 0.0;
    int cases = 0;
    for (double U : {0.5, 0.9, 0.99}) {
        for (double a : {0.5, 1.0, 2.0}) {
            ModelParams params;
            params.a = a;
            params.epsilon = 0.0;
            params.U = U;
            for (std::uint64_t seed : {3ull, 4ull}) {
                params.d = 1;
                PeriodicGrid<1> g1 = PeriodicGrid<1>::uniform(256, params.L);
                Scenario<1> s1 = scenario_random_smooth<1>(params, seed, U);
                InitialBoundReport r1 = initial_bound_check(initial_flux(s1.u0(g1), params), params);
                params.d = 2;
                PeriodicGrid<2> g2 = PeriodicGrid<2>::uniform(32, params.L);
                Scenario<2> s2 = scenario_random_smooth<2>(params, seed, U);
                InitialBoundReport r2 = initial_bound_check(initial_flux(s2.u0(g2), params), params);
                ok = ok && r1.pass && r2.pass;
                if (U == 0.9 && a == 2.0) pinned = r1.bound;
                cases += 2;
            }
        }
    }
    ok = ok && std::abs(pinned - 2.06474) <= 1e-4;  // U = 0.9, a = 2 closed form
    std::ostringstream d;
    d << cases << " (U, a, d, seed) cases within U (1 - U^a)^(-1/a); bound(0.9, 2) = "
      << g17(pinned);
    return {ok, d.str()};
}

// ============================================================================
// 10. Truncation machinery and renormalized residual
// ============================================================================

CriterionResult criterion_truncation() {
    bool ok = true;
    std::ostringstream notes;
    SplitMix64 rng(1010);
    for (double k : {1.0, 5.0, 20.0}) {
        for (double a : {0.5, 1.0, 2.0}) {
            Truncation tr(k, a);
            const double cap = std::pow(2.0, (a + 1.0) / a) * (1.0 + k);
            double prev_s = 0.0, prev_tau = 1.0;
            for (int i = 0; i < 4000; ++i) {
                double s = rng.uniform(0.0, k + 3.0);
                double tau = tau_k(s, tr);
                double slope = tau_k_prime(s, tr);
                ok = ok && tau >= 0.0 && tau <= 1.0;
                if (s <= k) ok = ok && tau == 1.0;
                if (s >= k + 1.0) ok = ok && tau == 0.0 && slope == 0.0;
                ok = ok && slope <= 0.0 && slope >= -2.0;
                // finite-difference consistency of the slope
                double h = 1e-6;
                if (s > h) {
                    double fd = (tau_k(s + h, tr) - tau_k(s - h, tr)) / (2.0 * h);
                    ok = ok && std::abs(fd - slope) <= 1e-8;
                }
                // monotone nonincreasing against the previous sample
                if (s >= prev_s) {
                    ok = ok && tau <= prev_tau + 1e-15;
                } else {
                    ok = ok && tau >= prev_tau - 1e-15;
                }
                prev_s = s;
                prev_tau = tau;

                double t = rng.uniform(0.0, k + 4.0);
                double G = G_k(t, tr);
                ok = ok && G <= 0.0 && std::abs(G) <= cap * (1.0 + 1e-12);
                if (t <= k) ok = ok && G == 0.0;
            }
            // plateau beyond the cutoff band
            double plateau = G_k(k + 1.0, tr);
            ok = ok && G_k(k + 2.0, tr) == plateau && G_k(1000.0, tr) == plateau;

            // midpoint-rule oracle for the antiderivative at three targets
            for (double t : {k + 0.3, k + 0.8, k + 1.0}) {
                constexpr int N = 1000000;
                double lo = k, hi = t, sum = 0.0;
                double w = (hi - lo) / N;
                for (int j = 0; j < N; ++j) {
                    double s = lo + (j + 0.5) * w;
                    sum += tau_k_prime(s, tr) * detail::growth_weight(s, a);
                }
                sum *= w;
                double G = G_k(t, tr);
                if (!(std::abs(G - sum) <= 1e-8 * (1.0 + std::abs(G)))) {
                    ok = false;
                    notes << " oracle miss at k=" << k << " a=" << a << " t=" << t;
                }
            }
        }
    }

    // Inactive truncation reproduces the plain weak-form defect on a real run.
    ModelParams params;
    params.d = 1;
    params.a = 1.0;
    params.epsilon = 1e-2;
    SolverConfig config;
    config.n = 64;
    config.dt = 1e-3;
    config.t_end = 0.1;
    config.newton_tol = 1e-12;
    config.record_every = 1;
    Trajectory<1> traj = run(scenario_poiseuille(16.0), params, config);
    g_audit.add(traj, config);
    ScalarField<1> psi = sample(traj.grid, [](Vec<1> x) {
        return std::cos(2.0 * std::numbers::pi * x[0]);
    });
    double plain = weak_form_residual(traj, psi, params);
    double max_q = 0.0;
    for (const auto& st : traj.states) max_q = std::max(max_q, sup_norm(st.q));
    RenormReport rep = renormalization_residual(traj, 2.0 * max_q + 1.0, psi, params);
    bool inactive_ok = rep.tail_l1 == 0.0 && rep.residual <= 10.0 * std::max(plain, 1e-14);
    ok = ok && inactive_ok;

    std::ostringstream d;
    d << "k in {1,5,20}, a in {0.5,1,2}; inactive-cutoff residual " << g17(rep.residual)
      << " vs plain defect " << g17(plain) << notes.str();
    return {ok, d.str()};
}

// ============================================================================
// 11. Regularization sweep on the channel scenario
// ============================================================================

CriterionResult criterion_sweep() {
    SweepPlan plan;
    plan.base.d = 1;
    plan.base.a = 0.5;
    plan.config.n = 256;
    plan.config.dt = 1e-3;
    plan.config.t_end = 0.25;
    plan.config.newton_tol = 1e-12;
    plan.config.record_every = 5;
    SweepReport<1> rep = eps_sweep(scenario_poiseuille(1.0), plan);

    bool ok = rep.entries.size() == default_epsilons().size();
    double worst_gap = 0.0;
    for (const auto& e : rep.entries) {
        if (!e.ok) {
            ok = false;
            continue;
        }
        double gap = std::abs(e.residual_inf - e.predicted);
        worst_gap = std::max(worst_gap, gap);
        if (!(gap <= e.residual_tol)) ok = false;
    }
    int increases = 0;
    std::string where;
    for (std::size_t i = 0; i + 1 < rep.cauchy_l2.size(); ++i) {
        if (rep.cauchy_l2[i + 1] > rep.cauchy_l2[i]) {
            ++increases;
            where = " (non-monotone pair at eps = " + g17(rep.cauchy_pairs[i + 1].first) + ")";
        }
    }
    if (increases > 1) ok = false;  // a single documented exception is tolerated

    std::ostringstream d;
    d << rep.entries.size() << " epsilons at n = 256, worst |residual - eps max|q|| = "
      << g17(worst_gap) << ", Cauchy increases = " << increases << where;
    return {ok, d.str()};
}

// ============================================================================
// 12. Higher-integrability probe and exponent boundary
// ============================================================================

CriterionResult criterion_probe() {
    SweepPlan plan;
    plan.base.d = 2;
    plan.base.a = 0.5;
    plan.base.U = 0.99;
    plan.epsilons = {1e-2, 1e-3, 1e-4};
    plan.config.n = 32;
    plan.config.dt = 1e-3;
    plan.config.t_end = 0.05;
    plan.config.newton_tol = 1e-11;
    plan.config.record_every = 1;
    Scenario<2> sc = scenario_random_smooth<2>(plan.base, 101, 0.99);
    ProbeVerdict v = integrability_probe(sc, plan);

    ModelParams boundary;
    boundary.d = 2;
    boundary.a = 2.0 / 3.0;
    bool flag_ok = !flux_exponent(boundary).valid;
    boundary.a = 2.0 / 3.0 - 1e-9;
    flag_ok = flag_ok && flux_exponent(boundary).valid;
    boundary.a = 2.0 / 3.0 + 1e-9;
    flag_ok = flag_ok && !flux_exponent(boundary).valid;

    std::ostringstream d;
    d << "b = " << v.b << ", L^b spread " << g17(v.spread)
      << " across eps {1e-2,1e-3,1e-4}; validity flips at a = 2/(d+1): "
      << (flag_ok ? "yes" : "NO");
    return {v.b == 1.5 && v.bounded && flag_ok, d.str()};
}

// ============================================================================
// 13. Determinism of the command-line tool
// ============================================================================

CriterionResult criterion_determinism() {
#ifndef IFXLAB_PATH
    return {false, "CLI binary path not configured at build time"};
#else
    namespace fs = std::filesystem;
    fs::path base = fs::temp_directory_path() / "ifx_acceptance_determinism";
    fs::remove_all(base);
    fs::create_directories(base);
    fs::path cfg = base / "run.ini";
    {
        std::ofstream out(cfg);
        out << "[scenario]\nkind = random_smooth\nseed = 99\n"
            << "[model]\nd = 1\na = 0.7\nepsilon = 0.01\nU = 0.5\n"
            << "[solver]\nn = 64\ndt = 0.001\nt_end = 0.02\nnewton_tol = 1e-12\n"
            << "[output]\nwrite_fields = true\n";
    }
    auto invoke = [&](const std::string& out_dir) {
        std::string cmd = std::string(IFXLAB_PATH) + " run --config " + cfg.string() +
                          " --out " + out_dir + " > /dev/null 2>&1";
        return std::system(cmd.c_str());
    };
    fs::path dir_a = base / "a", dir_b = base / "b";
    int rc_a = invoke(dir_a.string());
    int rc_b = invoke(dir_b.string());
    if (rc_a != 0 || rc_b != 0)
        return {false, "CLI invocation failed (exit " + std::to_string(rc_a) + ", " +
                           std::to_string(rc_b) + ")"};
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    std::string ledger_a = slurp(dir_a / "ledger.csv");
    std::string ledger_b = slurp(dir_b / "ledger.csv");
    bool ok = !ledger_a.empty() && ledger_a == ledger_b;
    std::ostringstream d;
    d << "two CLI invocations, ledgers " << (ok ? "byte-identical" : "DIFFER") << " ("
      << ledger_a.size() << " bytes)";
    return {ok, d.str()};
#endif
}

}  // namespace

// ============================================================================
// Driver
// ============================================================================

int main() {
    struct Entry {
        int id;
        const char* label;
        CriterionResult (*fn)();
    };
    // Criterion 8 summarizes the residual audit, so it runs after everything
    // that feeds trajectories into the audit; results are printed in order.
    const Entry entries[] = {
        {1, "constitutive inequality suite", criterion_constitutive},
        {2, "flux Jacobian vs finite differences", criterion_jacobian},
        {3, "inversion roundtrip and domain guard", criterion_inversion},
        {4, "gradient/divergence duality", criterion_duality},
        {5, "manufactured convergence orders", criterion_manufactured},
        {6, "implicit-step L2 contraction", criterion_contraction},
        {7, "source-free energy ledger", criterion_energy},
        {9, "initial flux bound", criterion_initial_bound},
        {10, "truncation machinery", criterion_truncation},
        {11, "epsilon sweep residual tracking", criterion_sweep},
        {12, "higher-integrability probe", criterion_probe},
        {13, "CLI determinism", criterion_determinism},
        {8, "constitutive residual identity", criterion_residual_identity},
    };

    CriterionResult results[14];
    for (const Entry& e : entries) {
        try {
            results[e.id] = e.fn();
        } catch (const std::exception& ex) {
            results[e.id] = {false, std::string("unexpected exception: ") + ex.what()};
        }
    }

    const char* labels[14] = {};
    for (const Entry& e : entries) labels[e.id] = e.label;
    int failures = 0;
    for (int id = 1; id <= 13; ++id) {
        const CriterionResult& r = results[id];
        std::printf("[%s] %02d %s -- %s\n", r.pass ? "PASS" : "FAIL", id, labels[id],
                    r.detail.c_str());
        if (!r.pass) ++failures;
    }
    std::printf("========================================\n");
    std::printf("%d of 13 criteria passed\n", 13 - failures);
    return failures;
}
