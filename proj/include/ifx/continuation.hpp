#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ifx/common.hpp"
#include "ifx/diagnostics.hpp"
#include "ifx/field_io.hpp"
#include "ifx/grid.hpp"
#include "ifx/scenario.hpp"
#include "ifx/solver.hpp"
#include "ifx/state.hpp"

namespace ifx {

// ============================================================================
// Regularization sweeps: drive epsilon -> 0 and measure how solutions settle
// ============================================================================

// Geometric sequence halving from 0.1 until it crosses 1e-4 (11 values; the
// last is 0.1 * 2^-10 ~ 9.77e-5).
inline std::vector<double> default_epsilons() {
    std::vector<double> eps;
    double e = 0.1;
    while (true) {
        eps.push_back(e);
        if (e < 1e-4) break;
        e *= 0.5;
    }
    return eps;
}

struct SweepPlan {
    ModelParams base;                  // epsilon field is overridden per entry
    std::vector<double> epsilons = default_epsilons();
    SolverConfig config;
    double b_for_1d = 4.0;             // flux integrability exponent used when d = 1

    void validate() const {
        base.validate();
        config.validate();
        if (epsilons.empty()) throw ConfigError("sweep: epsilons must be nonempty");
        for (std::size_t i = 0; i < epsilons.size(); ++i) {
            if (!(epsilons[i] > 0.0)) throw ConfigError("sweep: epsilons must be positive");
            if (i > 0 && !(epsilons[i] < epsilons[i - 1]))
                throw ConfigError("sweep: epsilons must be strictly decreasing");
        }
    }
};

template <int D>
struct SweepEntry {
    double epsilon = 0.0;
    bool ok = false;
    std::string error;                  // populated when ok is false

    // Max over recorded states of |grad u - f(q)|_inf; algebraically this is
    // eps * q, so it should match `predicted` to solver tolerance.
    double residual_inf = 0.0;
    double predicted = 0.0;             // epsilon * max |q|
    double max_abs_q = 0.0;
    double residual_tol = 0.0;          // newton_tol * (1 + max|q|)
    double lb_norm = 0.0;               // space-time L^b norm of q
    double final_l2_u = 0.0;
    std::optional<ScalarField<D>> final_u;
};

template <int D>
struct SweepReport {
    SweepPlan plan;
    double b = 0.0;                     // exponent used for lb_norm
    std::vector<SweepEntry<D>> entries;
    // Pairwise L^2-in-space, trapezoid-in-recorded-time differences between
    // consecutive successful entries: |u^{eps_m} - u^{eps_{m+1}}|_{L^2(Q)}.
    std::vector<double> cauchy_l2;
    std::vector<std::pair<double, double>> cauchy_pairs;  // (eps_m, eps_{m+1})
};

namespace detail {

// Trapezoid-in-time accumulation of a per-state spatial integral.
inline double time_trapezoid(const std::vector<double>& times,
                             const std::vector<double>& values) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < times.size(); ++i)
        total += 0.5 * (times[i + 1] - times[i]) * (values[i] + values[i + 1]);
    return total;
}

// Right-endpoint accumulation matching the backward update: the state
// produced over (t_m, t_{m+1}] carries that interval's weight. The t = 0
// snapshot gets none — its flux is the initial inversion of the data, whose
// magnitude depends on the regularization, not a product of the evolution.
inline double time_right_endpoint(const std::vector<double>& times,
                                  const std::vector<double>& values) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < times.size(); ++i)
        total += (times[i + 1] - times[i]) * values[i + 1];
    return total;
}

template <int D>
double space_lb_integral(const VectorField<D>& q, double b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) sum += std::pow(norm(q.get(i)), b);
    return sum * q.grid.cell_volume();
}

}  // namespace detail

// Runs the scenario once per epsilon on a shared grid/dt and collects the
// settling measurements. A failing entry records its error and is skipped by
// the pairwise differences; it does not abort the sweep.
template <int D>
SweepReport<D> eps_sweep(const Scenario<D>& scenario, const SweepPlan& plan) {
    plan.validate();
    SweepReport<D> report;
    report.plan = plan;
    FluxExponent fe = flux_exponent(plan.base, plan.b_for_1d);
    report.b = fe.b > 0.0 ? fe.b : 1.0;

    std::vector<Trajectory<D>> kept(plan.epsilons.size());
    for (std::size_t m = 0; m < plan.epsilons.size(); ++m) {
        SweepEntry<D> entry;
        entry.epsilon = plan.epsilons[m];
        ModelParams params = plan.base;
        params.epsilon = plan.epsilons[m];
        try {
            Trajectory<D> traj = run(scenario, params, plan.config);
            std::vector<double> times, lb_values;
            for (const State<D>& st : traj.states) {
                entry.residual_inf = std::max(entry.residual_inf, residual_vs_f_inf(st, params));
                entry.max_abs_q = std::max(entry.max_abs_q, sup_norm(st.q));
                times.push_back(st.t);
                lb_values.push_back(detail::space_lb_integral(st.q, report.b));
            }
            entry.predicted = params.epsilon * entry.max_abs_q;
            entry.residual_tol = plan.config.newton_tol * (1.0 + entry.max_abs_q);
            double raw = detail::time_right_endpoint(times, lb_values);
            entry.lb_norm = std::pow(std::max(raw, 0.0), 1.0 / report.b);
            entry.final_l2_u = norm_l2(traj.states.back().u);
            entry.final_u = traj.states.back().u;
            entry.ok = true;
            kept[m] = std::move(traj);
        } catch (const std::exception& e) {
            entry.ok = false;
            entry.error =
                std::string("epsilon = ") + detail::format_g17(entry.epsilon) + ": " + e.what();
        }
        report.entries.push_back(std::move(entry));
    }

    for (std::size_t m = 0; m + 1 < plan.epsilons.size(); ++m) {
        if (!report.entries[m].ok || !report.entries[m + 1].ok) continue;
        const Trajectory<D>& a = kept[m];
        const Trajectory<D>& b = kept[m + 1];
        std::size_t count = std::min(a.states.size(), b.states.size());
        std::vector<double> times, sq;
        for (std::size_t i = 0; i < count; ++i) {
            times.push_back(a.states[i].t);
            ScalarField<D> diff = difference(a.states[i].u, b.states[i].u);
            sq.push_back(norm_l2_sq(diff));
        }
        report.cauchy_l2.push_back(std::sqrt(std::max(detail::time_trapezoid(times, sq), 0.0)));
        report.cauchy_pairs.emplace_back(plan.epsilons[m], plan.epsilons[m + 1]);
    }
    return report;
}

// ============================================================================
// Higher-integrability probe
// ============================================================================

struct ProbeVerdict {
    double b = 0.0;
    std::vector<std::pair<double, double>> lb_norms;  // (epsilon, L^b norm)
    bool bounded = false;
    double spread = 0.0;  // max/min over the last three successful entries
};

// Tracks the space-time L^b norm of the flux across the sweep; the verdict is
// "bounded" when the last three successful entries vary by less than a factor
// of two. Requires the exponent to be admissible for (a, d).
template <int D>
ProbeVerdict integrability_probe(const Scenario<D>& scenario, const SweepPlan& plan) {
    FluxExponent fe = flux_exponent(plan.base, plan.b_for_1d);
    if (!fe.valid)
        throw ConfigError(
            "integrability_probe: exponent a is outside the admissible range for this "
            "dimension (need a < 2/(d+1) when d >= 2, a < 1 when d = 1)");
    SweepReport<D> report = eps_sweep(scenario, plan);
    ProbeVerdict verdict;
    verdict.b = report.b;
    std::vector<double> ok_norms;
    for (const auto& entry : report.entries) {
        if (!entry.ok) continue;
        verdict.lb_norms.emplace_back(entry.epsilon, entry.lb_norm);
        ok_norms.push_back(entry.lb_norm);
    }
    if (ok_norms.size() >= 3) {
        double lo = ok_norms[ok_norms.size() - 3], hi = lo;
        for (std::size_t i = ok_norms.size() - 3; i < ok_norms.size(); ++i) {
            lo = std::min(lo, ok_norms[i]);
            hi = std::max(hi, ok_norms[i]);
        }
        verdict.spread = lo > 0.0 ? hi / lo : (hi == 0.0 ? 1.0 : std::numeric_limits<double>::infinity());
        verdict.bounded = verdict.spread < 2.0;
    }
    return verdict;
}

// ============================================================================
// Richardson extrapolation of the epsilon -> 0 limit
// ============================================================================

template <int D>
struct RichardsonResult {
    ScalarField<D> u;
    double defect_l2 = 0.0;   // disagreement between the two available extrapolants
    bool degenerate = false;  // successive differences vanished; u is the last field
};

// Assumes first-order dependence u_eps = u* + c eps and eliminates c from the
// last two entries; the defect compares against the extrapolant built from the
// previous pair, so it measures how well the first-order model fits.
template <int D>
RichardsonResult<D> richardson_limit(const SweepReport<D>& report) {
    std::vector<const SweepEntry<D>*> ok;
    for (const auto& entry : report.entries)
        if (entry.ok && entry.final_u.has_value()) ok.push_back(&entry);
    if (ok.size() < 3)
        throw ConfigError("richardson_limit: need at least three successful sweep entries");
    const SweepEntry<D>& e1 = *ok[ok.size() - 3];
    const SweepEntry<D>& e2 = *ok[ok.size() - 2];
    const SweepEntry<D>& e3 = *ok[ok.size() - 1];

    const ScalarField<D>& u1 = *e1.final_u;
    const ScalarField<D>& u2 = *e2.final_u;
    const ScalarField<D>& u3 = *e3.final_u;

    RichardsonResult<D> result{ScalarField<D>(u3.grid), 0.0, false};
    double d23 = 0.0;
    for (std::size_t i = 0; i < u3.size(); ++i) d23 = std::max(d23, std::abs(u2[i] - u3[i]));
    if (d23 == 0.0) {
        result.u = u3;
        result.degenerate = true;
        return result;
    }

    auto extrapolate = [](double ea, const ScalarField<D>& ua, double eb,
                          const ScalarField<D>& ub) {
        ScalarField<D> out(ua.grid);
        double denom = ea - eb;
        for (std::size_t i = 0; i < ua.size(); ++i)
            out[i] = (ea * ub[i] - eb * ua[i]) / denom;
        return out;
    };
    ScalarField<D> last_pair = extrapolate(e2.epsilon, u2, e3.epsilon, u3);
    ScalarField<D> prev_pair = extrapolate(e1.epsilon, u1, e2.epsilon, u2);
    result.u = last_pair;
    result.defect_l2 = norm_l2(difference(last_pair, prev_pair));
    return result;
}

}  // namespace ifx
