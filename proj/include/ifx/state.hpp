#pragma once

// Shared state carried between the time stepper and the diagnostics layer.

#include <optional>
#include <string>
#include <vector>

#include "ifx/common.hpp"
#include "ifx/constitutive.hpp"
#include "ifx/grid.hpp"

namespace ifx {

enum class Scheme { implicit_euler, explicit_euler };

inline Scheme parse_scheme(const std::string& s) {
    if (s == "implicit" || s == "implicit_euler") return Scheme::implicit_euler;
    if (s == "explicit" || s == "explicit_euler") return Scheme::explicit_euler;
    throw ConfigError("scheme must be 'implicit' or 'explicit', got '" + s + "'");
}

inline std::string scheme_name(Scheme s) {
    return s == Scheme::implicit_euler ? "implicit" : "explicit";
}

struct SolverConfig {
    int n = 64;                 // points per axis
    double dt = 1e-3;
    double t_end = 0.1;
    Scheme scheme = Scheme::implicit_euler;
    double newton_tol = 1e-10;
    int newton_max_iter = 50;
    double linear_tol = 1e-12;
    int linear_max_iter = 0;    // 0: derived from the unknown count
    int record_every = 1;

    void validate() const {
        if (n < 2) throw ConfigError("solver: n must be at least 2");
        if (!(dt > 0.0)) throw ConfigError("solver: dt must be positive");
        if (!(t_end >= 0.0)) throw ConfigError("solver: t_end must be nonnegative");
        if (!(newton_tol > 0.0)) throw ConfigError("solver: newton_tol must be positive");
        if (newton_max_iter < 1) throw ConfigError("solver: newton_max_iter must be positive");
        if (!(linear_tol > 0.0)) throw ConfigError("solver: linear_tol must be positive");
        if (linear_max_iter < 0) throw ConfigError("solver: linear_max_iter must be nonnegative");
        if (record_every < 1) throw ConfigError("solver: record_every must be positive");
    }

    int effective_linear_cap(std::size_t unknowns) const {
        if (linear_max_iter > 0) return linear_max_iter;
        return static_cast<int>(4 * unknowns + 200);
    }
};

// Velocity u and flux q at one time; the pair always satisfies the discrete
// constitutive identity gradient(u) = f(q) + eps q up to inversion tolerance.
template <int D>
struct State {
    double t = 0.0;
    ScalarField<D> u;
    VectorField<D> q;
};

// One diagnostics row; field meanings:
//   l2_u           ||u||_2^2
//   energy_flux    int |q|^2 (1+|q|^a)^(-1/a)
//   eps_flux       eps int |q|^2
//   l1_q           int |q|
//   sup_grad_u     max_x |grad u|
//   weighted_grad_q  int sum_axes (D_s q, D_s q)_{A(q)}
//   eps_grad_q     eps int |grad q|^2
//   hess_u         int sum_{j,k} (D-_k D+_j u)^2
//   weighted_dt_q  int (dq/dt, dq/dt)_{A(q)} over the trailing record gap;
//                  absent on the first record
//   lb_q           int |q|^b with the integrability exponent b (falls back to
//                  b = 1 when no positive exponent applies)
struct DiagnosticsRecord {
    double t = 0.0;
    double l2_u = 0.0;
    double energy_flux = 0.0;
    double eps_flux = 0.0;
    double l1_q = 0.0;
    double sup_grad_u = 0.0;
    double weighted_grad_q = 0.0;
    double eps_grad_q = 0.0;
    double hess_u = 0.0;
    std::optional<double> weighted_dt_q;
    double lb_q = 0.0;
};

// Recorded history of one run. States, diagnostics rows, the squared L2 norm
// of the source used by the step that produced each state, and the source
// field sampled at each recorded time (index 0 belongs to the initial state,
// where no step was taken).
template <int D>
struct Trajectory {
    PeriodicGrid<D> grid;
    ModelParams params;
    SolverConfig config;
    std::string scenario_id;
    std::vector<State<D>> states;
    std::vector<DiagnosticsRecord> records;
    std::vector<double> g_l2sq;
    std::vector<ScalarField<D>> g_fields;
};

}  // namespace ifx
