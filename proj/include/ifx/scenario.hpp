#pragma once

// Initial data and source terms for the evolution runs. Every scenario is a
// pair of builders (initial velocity, source field at a given time) so the
// same scenario can be realized on any grid; randomized scenarios restart
// their deterministic stream from the stored seed on every call, making the
// construction reproducible bit for bit.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <string>

#include "ifx/common.hpp"
#include "ifx/constitutive.hpp"
#include "ifx/grid.hpp"
#include "ifx/rng.hpp"

namespace ifx {

template <int D>
struct Scenario {
    std::string id;
    std::function<ScalarField<D>(const PeriodicGrid<D>&)> u0;
    std::function<ScalarField<D>(double, const PeriodicGrid<D>&)> g;
    // Closed-form solution when one exists (manufactured runs); null otherwise.
    std::function<ScalarField<D>(double, const PeriodicGrid<D>&)> exact;
    double declared_U = std::numeric_limits<double>::quiet_NaN();
};

// ============================================================================
// Quiescent scenario
// ============================================================================

template <int D>
inline Scenario<D> scenario_zero() {
    Scenario<D> sc;
    sc.id = "zero";
    sc.u0 = [](const PeriodicGrid<D>& g) { return ScalarField<D>(g); };
    sc.g = [](double, const PeriodicGrid<D>& g) { return ScalarField<D>(g); };
    sc.declared_U = 0.0;
    return sc;
}

// ============================================================================
// Channel flow (1D shear reduction)
// ============================================================================

// Wall-driven channel flow realized on the periodic box by mirror symmetry:
// the box (0, L) carries two copies of a channel of width L/2 with opposite
// pressure drops, g(t, x) = +drop(t) on [0, L/2) and -drop(t) on [L/2, L).
// Odd symmetry pins u = 0 at x = 0 and x = L/2, which is exactly the no-slip
// wall pair of the physical channel; a spatially constant drop on the
// periodic box would instead force a spatially uniform solution with no
// profile at all. At a constant drop gamma the steady stress is the sawtooth
//   sigma(x) = gamma (L/4 - x)        on [0, L/2)
//   sigma(x) = gamma (x - 3L/4)       on [L/2, L),
// so the interior stress gradient balances the drop.
inline Scenario<1> scenario_poiseuille(std::function<double(double)> pressure_drop,
                                       const std::string& label = "poiseuille") {
    Scenario<1> sc;
    sc.id = label;
    sc.u0 = [](const PeriodicGrid<1>& g) { return ScalarField<1>(g); };
    sc.g = [pressure_drop](double t, const PeriodicGrid<1>& g) {
        double gamma = pressure_drop(t);
        return sample(g, [&](const Vec<1>& x) {
            return x[0] < 0.5 * g.L ? gamma : -gamma;
        });
    };
    sc.declared_U = 0.0;
    return sc;
}

inline Scenario<1> scenario_poiseuille(double constant_drop) {
    return scenario_poiseuille([constant_drop](double) { return constant_drop; },
                               "poiseuille(drop=" + std::to_string(constant_drop) + ")");
}

// Steady stress profile of the channel scenario at constant drop.
inline double poiseuille_steady_stress(double x, double gamma, double L) {
    return x < 0.5 * L ? gamma * (0.25 * L - x) : gamma * (x - 0.75 * L);
}

// ============================================================================
// Manufactured solution
// ============================================================================

// u*(t, x) = amp cos(omega t) prod_j sin(2 pi x_j / L) with amp chosen so the
// initial gradient sup equals grad_cap. The source is assembled pointwise
// from the exact maps: with w = grad u* and q* the exact inversion of w,
//   g = dt u* - trace( (A(q*) + eps I)^(-1) H(u*) ),
// every factor evaluated in closed form at the sample point.
template <int D>
inline Scenario<D> scenario_manufactured(const ModelParams& params, double grad_cap,
                                         double omega = 2.0 * std::numbers::pi) {
    if (!(grad_cap > 0.0)) throw ConfigError("manufactured scenario: gradient cap must be positive");
    if (params.epsilon == 0.0 && grad_cap >= 1.0)
        throw ConfigError("manufactured scenario: gradient cap must stay below 1 when epsilon = 0");

    const double a = params.a;
    const double eps = params.epsilon;
    const double L = params.L;
    const double kf = 2.0 * std::numbers::pi / L;
    // sup |grad u*| = amp * kf in 1D and amp * kf (max over the diagonal
    // profile) in 2D; the product form peaks where one sine is 1 and the
    // other's cosine is 1, giving the same amp * kf cap.
    const double amp = grad_cap / kf;

    auto u_star = [=](double t, const Vec<D>& x) {
        double v = amp * std::cos(omega * t);
        for (int j = 0; j < D; ++j) v *= std::sin(kf * x[j]);
        return v;
    };
    auto grad_star = [=](double t, const Vec<D>& x) {
        Vec<D> w;
        for (int j = 0; j < D; ++j) {
            double v = amp * std::cos(omega * t) * kf;
            for (int m = 0; m < D; ++m)
                v *= (m == j) ? std::cos(kf * x[m]) : std::sin(kf * x[m]);
            w[j] = v;
        }
        return w;
    };
    auto hess_star = [=](double t, const Vec<D>& x, int j, int k) {
        double v = amp * std::cos(omega * t) * kf * kf;
        if (j == k) {
            for (int m = 0; m < D; ++m) v *= std::sin(kf * x[m]);
            return -v;
        }
        for (int m = 0; m < D; ++m) v *= (m == j || m == k) ? std::cos(kf * x[m]) : std::sin(kf * x[m]);
        return v;
    };

    Scenario<D> sc;
    sc.id = "manufactured(grad_cap=" + std::to_string(grad_cap) + ")";
    sc.declared_U = grad_cap;
    sc.u0 = [=](const PeriodicGrid<D>& g) {
        return sample(g, [&](const Vec<D>& x) { return u_star(0.0, x); });
    };
    sc.exact = [=](double t, const PeriodicGrid<D>& g) {
        return sample(g, [&](const Vec<D>& x) { return u_star(t, x); });
    };
    sc.g = [=](double t, const PeriodicGrid<D>& g) {
        return sample(g, [&](const Vec<D>& x) {
            double ut = -amp * omega * std::sin(omega * t);
            for (int j = 0; j < D; ++j) ut *= std::sin(kf * x[j]);

            Vec<D> w = grad_star(t, x);
            Vec<D> q = invert_map(w, a, eps);
            RadialJacobian<D> jac = radial_jacobian(q, a);
            double div_q = 0.0;
            for (int k = 0; k < D; ++k) {
                Vec<D> col;
                for (int j = 0; j < D; ++j) col[j] = hess_star(t, x, j, k);
                div_q += shifted_jacobian_solve(jac, eps, col)[k];
            }
            return ut - div_q;
        });
    };
    return sc;
}

// ============================================================================
// Seeded smooth scenario
// ============================================================================

// Low-frequency trigonometric initial data with coefficients drawn from a
// SplitMix64 stream, rescaled so the discrete gradient sup equals U exactly;
// the source reuses an independent child stream and stays bounded by 1.
template <int D>
inline Scenario<D> scenario_random_smooth(const ModelParams& params, std::uint64_t seed,
                                          double U) {
    if (!(U >= 0.0)) throw ConfigError("random smooth scenario: U must be nonnegative");
    const double L = params.L;
    const double kf = 2.0 * std::numbers::pi / L;
    constexpr int max_mode = 3;

    // Fixed enumeration of half-space frequency vectors, lexicographic.
    struct Mode {
        std::array<int, D> k;
    };
    std::vector<Mode> modes;
    if constexpr (D == 1) {
        for (int k = 1; k <= max_mode; ++k) modes.push_back({{k}});
    } else {
        for (int k1 = 0; k1 <= max_mode; ++k1)
            for (int k2 = -max_mode; k2 <= max_mode; ++k2) {
                if (k1 == 0 && k2 <= 0) continue;
                modes.push_back({{k1, k2}});
            }
    }

    Scenario<D> sc;
    sc.id = "random_smooth(seed=" + std::to_string(seed) + ",U=" + std::to_string(U) + ")";
    sc.declared_U = U;

    sc.u0 = [=](const PeriodicGrid<D>& g) {
        SplitMix64 rng(seed);
        std::vector<double> coef, phase;
        for (std::size_t m = 0; m < modes.size(); ++m) {
            coef.push_back(rng.uniform(-1.0, 1.0));
            phase.push_back(rng.uniform(0.0, 2.0 * std::numbers::pi));
        }
        ScalarField<D> raw = sample(g, [&](const Vec<D>& x) {
            double v = 0.0;
            for (std::size_t m = 0; m < modes.size(); ++m) {
                double arg = phase[m];
                for (int j = 0; j < D; ++j) arg += kf * modes[m].k[j] * x[j];
                v += coef[m] * std::cos(arg);
            }
            return v;
        });
        double sup = sup_norm(gradient(raw));
        double scale_factor = (sup > 0.0) ? U / sup : 0.0;
        scale(raw, scale_factor);
        return raw;
    };

    sc.g = [=](double t, const PeriodicGrid<D>& g) {
        SplitMix64 parent(seed);
        SplitMix64 rng = parent.split();  // independent of the u0 draws
        std::vector<double> coef, phase, tphase;
        for (std::size_t m = 0; m < modes.size(); ++m) {
            coef.push_back(rng.uniform(-1.0, 1.0) / static_cast<double>(modes.size()));
            phase.push_back(rng.uniform(0.0, 2.0 * std::numbers::pi));
            tphase.push_back(rng.uniform(0.0, 2.0 * std::numbers::pi));
        }
        return sample(g, [&](const Vec<D>& x) {
            double v = 0.0;
            for (std::size_t m = 0; m < modes.size(); ++m) {
                double arg = phase[m];
                for (int j = 0; j < D; ++j) arg += kf * modes[m].k[j] * x[j];
                v += coef[m] * std::cos(arg) * std::cos(2.0 * std::numbers::pi * t + tphase[m]);
            }
            return v;
        });
    };
    return sc;
}

}  // namespace ifx
