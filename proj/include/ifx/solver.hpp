#pragma once

// Time integration of  dt u - div q = g,  grad u = f(q) + eps q  on the
// periodic box. The flux is eliminated pointwise through the scalar
// inversion, so the implicit step solves
//
//   F(u) = u - dt div( (f + eps I)^(-1)(grad u) ) - u_old - dt g = 0
//
// by damped Newton. The linearization I - dt div( (A(q) + eps I)^(-1) grad )
// is symmetric positive definite thanks to the exact discrete duality of
// gradient and divergence, so each inner solve is plain conjugate gradients.

#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ifx/common.hpp"
#include "ifx/constitutive.hpp"
#include "ifx/diagnostics.hpp"
#include "ifx/grid.hpp"
#include "ifx/scenario.hpp"
#include "ifx/state.hpp"

namespace ifx {

// ============================================================================
// Initial flux
// ============================================================================

// q(0) = (f + eps I)^(-1)(grad u0) pointwise. With eps = 0 the gradient must
// stay inside the open unit ball or the inversion raises DomainExceeded.
template <int D>
inline VectorField<D> initial_flux(const ScalarField<D>& u0, const ModelParams& params) {
    VectorField<D> grad_u = gradient(u0);
    VectorField<D> q(u0.grid);
    for (std::size_t i = 0; i < q.size(); ++i)
        q.set(i, invert_map(grad_u.get(i), params.a, params.epsilon));
    return q;
}

// ============================================================================
// Linearized operator and conjugate gradients
// ============================================================================

namespace detail {

// v -> v - dt div( (A(q) + eps I)^(-1) grad v ), frozen at one flux field.
template <int D>
struct LinearizedOp {
    double dt;
    double eps;
    std::vector<RadialJacobian<D>> jac;
    mutable VectorField<D> work;
    mutable ScalarField<D> div_work;

    LinearizedOp(const VectorField<D>& q_lin, double a, double dt_, double eps_)
        : dt(dt_), eps(eps_), work(q_lin.grid), div_work(q_lin.grid) {
        jac.reserve(q_lin.size());
        for (std::size_t i = 0; i < q_lin.size(); ++i)
            jac.push_back(radial_jacobian(q_lin.get(i), a));
    }

    void apply(const ScalarField<D>& v, ScalarField<D>& out) const {
        gradient_into(v, work);
        for (std::size_t i = 0; i < v.size(); ++i)
            work.set(i, shifted_jacobian_solve(jac[i], eps, work.get(i)));
        divergence_into(work, div_work);
        for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] - dt * div_work[i];
    }
};

// Plain conjugate gradients; returns the iteration count.
template <int D, typename Op>
inline int cg_solve(const Op& op, const ScalarField<D>& b, ScalarField<D>& x, double rel_tol,
                    int max_iter, const char* who) {
    ScalarField<D> r = b;          // x starts at zero
    for (double& xi : x.v) xi = 0.0;
    double rs = inner_l2(r, r);
    double target = rel_tol * std::sqrt(rs);
    if (rs == 0.0) return 0;
    ScalarField<D> p = r;
    ScalarField<D> ap(b.grid);
    for (int it = 1; it <= max_iter; ++it) {
        op.apply(p, ap);
        double alpha = rs / inner_l2(p, ap);
        add_scaled(x, alpha, p);
        add_scaled(r, -alpha, ap);
        double rs_new = inner_l2(r, r);
        if (std::sqrt(rs_new) <= target) return it;
        double beta = rs_new / rs;
        rs = rs_new;
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = r[i] + beta * p[i];
    }
    throw NoConvergence(std::string(who) + ": conjugate gradients exhausted " +
                        std::to_string(max_iter) + " iterations");
}

}  // namespace detail

// One symmetric positive definite inner solve of the implicit linearization,
// frozen at the supplied flux field: (I - dt div((A(q)+eps I)^(-1) grad)) x = rhs.
template <int D>
inline ScalarField<D> newton_inner_solve(const VectorField<D>& q_lin, const ScalarField<D>& rhs,
                                         double dt, const ModelParams& params,
                                         const SolverConfig& config, int* iterations = nullptr) {
    detail::LinearizedOp<D> op(q_lin, params.a, dt, params.epsilon);
    ScalarField<D> x(rhs.grid);
    int it = detail::cg_solve<D>(op, rhs, x, config.linear_tol,
                                 config.effective_linear_cap(rhs.size()), "newton_inner_solve");
    if (iterations) *iterations = it;
    return x;
}

// ============================================================================
// Time steps
// ============================================================================

struct NewtonReport {
    std::vector<double> residual_history;
    int newton_iterations = 0;
    long linear_iterations = 0;
    bool converged = false;
};

template <int D>
inline State<D> step_implicit(const State<D>& state, const ScalarField<D>& g_next,
                              const ModelParams& params, const SolverConfig& config,
                              NewtonReport* report = nullptr) {
    const auto& grid = state.u.grid;
    if (!(g_next.grid == grid)) throw ConfigError("step_implicit: source grid mismatch");
    const double dt = config.dt;
    const double a = params.a;
    const double eps = params.epsilon;

    ScalarField<D> rhs = state.u;
    add_scaled(rhs, dt, g_next);
    const double tol = config.newton_tol * std::max(norm_l2(state.u), norm_l2(rhs));

    ScalarField<D> u = state.u;
    VectorField<D> grad_u(grid), q(grid);
    ScalarField<D> div_q(grid), residual(grid), delta(grid);

    auto evaluate = [&](const ScalarField<D>& cand, VectorField<D>& q_out,
                        ScalarField<D>& res_out) {
        gradient_into(cand, grad_u);
        for (std::size_t i = 0; i < cand.size(); ++i)
            q_out.set(i, invert_map(grad_u.get(i), a, eps));
        divergence_into(q_out, div_q);
        for (std::size_t i = 0; i < cand.size(); ++i)
            res_out[i] = cand[i] - dt * div_q[i] - rhs[i];
    };

    evaluate(u, q, residual);
    double rn = norm_l2(residual);
    if (report) {
        *report = NewtonReport{};
        report->residual_history.push_back(rn);
    }

    ScalarField<D> u_try(grid), res_try(grid);
    VectorField<D> q_try(grid);
    for (int iter = 0; iter < config.newton_max_iter; ++iter) {
        if (rn <= tol) {
            if (report) report->converged = true;
            State<D> next;
            next.t = state.t + dt;
            next.u = std::move(u);
            next.q = std::move(q);
            return next;
        }

        detail::LinearizedOp<D> op(q, a, dt, eps);
        int lin_it = detail::cg_solve<D>(op, residual, delta, config.linear_tol,
                                         config.effective_linear_cap(u.size()), "step_implicit");
        if (report) report->linear_iterations += lin_it;

        // Half-step backtracking on residual increase.
        double lambda = 1.0;
        double rn_try = 0.0;
        for (int bt = 0; bt < 30; ++bt) {
            for (std::size_t i = 0; i < u.size(); ++i) u_try[i] = u[i] - lambda * delta[i];
            evaluate(u_try, q_try, res_try);
            rn_try = norm_l2(res_try);
            if (rn_try <= rn || rn_try <= tol) break;
            lambda *= 0.5;
        }
        std::swap(u, u_try);
        std::swap(q, q_try);
        std::swap(residual, res_try);
        rn = rn_try;
        if (report) {
            ++report->newton_iterations;
            report->residual_history.push_back(rn);
        }
    }
    if (rn <= tol) {
        if (report) report->converged = true;
        State<D> next;
        next.t = state.t + dt;
        next.u = std::move(u);
        next.q = std::move(q);
        return next;
    }
    throw NoConvergence("step_implicit: Newton stalled at residual " + std::to_string(rn) +
                        " (tolerance " + std::to_string(tol) + ")");
}

// Forward step u+ = u + dt (div q + g). Requires dt <= eps h^2 / (2 d); the
// limit degenerates to zero with eps, mirroring the unbounded stiffness of
// the unregularized constitutive inverse.
template <int D>
inline State<D> step_explicit(const State<D>& state, const ScalarField<D>& g_now,
                              const ModelParams& params, const SolverConfig& config) {
    const auto& grid = state.u.grid;
    if (!(g_now.grid == grid)) throw ConfigError("step_explicit: source grid mismatch");
    const double h = grid.min_spacing();
    const double limit = params.epsilon * h * h / (2.0 * D);
    if (config.dt > limit * (1.0 + 1e-12))
        throw StabilityViolation("step_explicit: dt = " + std::to_string(config.dt) +
                                 " exceeds the stability limit eps h^2 / (2 d) = " +
                                 std::to_string(limit));

    State<D> next;
    next.t = state.t + config.dt;
    next.u = state.u;
    ScalarField<D> div_q = divergence(state.q);
    for (std::size_t i = 0; i < next.u.size(); ++i)
        next.u[i] += config.dt * (div_q[i] + g_now[i]);
    next.q = initial_flux(next.u, params);
    return next;
}

// ============================================================================
// Driver
// ============================================================================

template <int D>
inline Trajectory<D> run(const Scenario<D>& scenario, const ModelParams& params,
                         const SolverConfig& config) {
    params.validate();
    config.validate();
    if (params.d != D) throw ConfigError("run: params.d does not match the field dimension");

    PeriodicGrid<D> grid = PeriodicGrid<D>::uniform(config.n, params.L);
    const long steps = std::lround(config.t_end / config.dt);
    if (std::abs(steps * config.dt - config.t_end) > 1e-9 * std::max(config.dt, config.t_end))
        throw ConfigError("run: t_end must be a whole number of steps");

    Trajectory<D> traj;
    traj.grid = grid;
    traj.params = params;
    traj.config = config;
    traj.scenario_id = scenario.id;

    State<D> state;
    state.t = 0.0;
    state.u = scenario.u0(grid);
    if (!(state.u.grid == grid)) throw ConfigError("run: scenario produced a mismatched grid");
    state.q = initial_flux(state.u, params);

    traj.states.push_back(state);
    traj.records.push_back(record(state, static_cast<const State<D>*>(nullptr), params));
    traj.g_l2sq.push_back(0.0);
    traj.g_fields.push_back(scenario.g(0.0, grid));

    std::size_t last_recorded = 0;
    for (long n = 1; n <= steps; ++n) {
        const double t_next = static_cast<double>(n) * config.dt;
        ScalarField<D> g_field;
        try {
            if (config.scheme == Scheme::implicit_euler) {
                g_field = scenario.g(t_next, grid);
                state = step_implicit(state, g_field, params, config);
            } else {
                g_field = scenario.g(state.t, grid);
                state = step_explicit(state, g_field, params, config);
            }
        } catch (const NoConvergence& e) {
            throw NoConvergence("t = " + std::to_string(t_next) + ": " + e.what());
        } catch (const DomainExceeded& e) {
            throw DomainExceeded("t = " + std::to_string(t_next) + ": " + e.what());
        }
        state.t = t_next;  // pin recorded times to exact multiples of dt

        if (n % config.record_every == 0 || n == steps) {
            traj.records.push_back(record(state, &traj.states[last_recorded], params));
            traj.states.push_back(state);
            last_recorded = traj.states.size() - 1;
            traj.g_l2sq.push_back(norm_l2_sq(g_field));
            traj.g_fields.push_back(scenario.g(state.t, grid));
        }
    }
    return traj;
}

// ============================================================================
// Constitutive residual probes
// ============================================================================

// sup |grad u - f(q) - eps q|: how well the stored pair satisfies the full
// constitutive identity. Bounded by the inversion tolerance for states the
// stepper produced.
template <int D>
inline double constitutive_residual_inf(const State<D>& state, const ModelParams& params) {
    VectorField<D> grad_u = gradient(state.u);
    double m = 0.0;
    for (std::size_t i = 0; i < grad_u.size(); ++i) {
        Vec<D> q = state.q.get(i);
        m = std::max(m, norm(grad_u.get(i) - map_f_eps(q, params.a, params.epsilon)));
    }
    return m;
}

// sup |grad u - f(q)|: the defect against the unregularized law; identically
// eps |q| pointwise, so its sup equals eps max |q| up to inversion tolerance.
template <int D>
inline double residual_vs_f_inf(const State<D>& state, const ModelParams& params) {
    VectorField<D> grad_u = gradient(state.u);
    double m = 0.0;
    for (std::size_t i = 0; i < grad_u.size(); ++i) {
        Vec<D> q = state.q.get(i);
        m = std::max(m, norm(grad_u.get(i) - map_f(q, params.a)));
    }
    return m;
}

}  // namespace ifx
