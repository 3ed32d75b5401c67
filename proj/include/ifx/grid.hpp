#pragma once

// Uniform periodic grids on the box (0, L)^d, d in {1, 2}, with the discrete
// duality pair used throughout the solver:
//
//   gradient   : forward difference per axis, (D+ u)_i = (u_{i+e} - u_i)/h
//   divergence : backward difference per axis, (D- F)_i = (F_i - F_{i-e})/h
//
// On a periodic grid D- = -(D+)^T exactly, so summation by parts
//   sum_i div(F)_i phi_i h^d = -sum_i F_i . grad(phi)_i h^d
// holds to rounding; the implicit solver's symmetry rests on this identity.
// Scalar fields are stored row-major (last axis contiguous).

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "ifx/common.hpp"
#include "ifx/vec.hpp"

namespace ifx {

// ============================================================================
// Grid
// ============================================================================

template <int D>
struct PeriodicGrid {
    std::array<int, D> n{};
    double L = 1.0;

    PeriodicGrid() = default;

    PeriodicGrid(std::array<int, D> counts, double period) : n(counts), L(period) {
        for (int i = 0; i < D; ++i)
            if (n[i] < 2) throw ConfigError("grid: at least two points per axis");
        if (!(L > 0.0)) throw ConfigError("grid: period must be positive");
    }

    static PeriodicGrid uniform(int points, double period) {
        std::array<int, D> counts;
        counts.fill(points);
        return PeriodicGrid(counts, period);
    }

    double spacing(int axis) const { return L / n[axis]; }

    double min_spacing() const {
        double h = spacing(0);
        for (int i = 1; i < D; ++i) h = std::min(h, spacing(i));
        return h;
    }

    double cell_volume() const {
        double v = 1.0;
        for (int i = 0; i < D; ++i) v *= spacing(i);
        return v;
    }

    std::size_t total() const {
        std::size_t t = 1;
        for (int i = 0; i < D; ++i) t *= static_cast<std::size_t>(n[i]);
        return t;
    }

    std::array<int, D> coords(std::size_t idx) const {
        std::array<int, D> c{};
        for (int axis = D - 1; axis >= 0; --axis) {
            c[axis] = static_cast<int>(idx % static_cast<std::size_t>(n[axis]));
            idx /= static_cast<std::size_t>(n[axis]);
        }
        return c;
    }

    std::size_t index(const std::array<int, D>& c) const {
        std::size_t idx = 0;
        for (int axis = 0; axis < D; ++axis)
            idx = idx * static_cast<std::size_t>(n[axis]) + static_cast<std::size_t>(c[axis]);
        return idx;
    }

    Vec<D> position(std::size_t idx) const {
        auto c = coords(idx);
        Vec<D> x;
        for (int axis = 0; axis < D; ++axis) x[axis] = c[axis] * spacing(axis);
        return x;
    }

    bool operator==(const PeriodicGrid& o) const { return n == o.n && L == o.L; }
};

// ============================================================================
// Fields
// ============================================================================

template <int D>
struct ScalarField {
    PeriodicGrid<D> grid;
    std::vector<double> v;

    ScalarField() = default;
    explicit ScalarField(const PeriodicGrid<D>& g) : grid(g), v(g.total(), 0.0) {}

    double& operator[](std::size_t i) { return v[i]; }
    double operator[](std::size_t i) const { return v[i]; }
    std::size_t size() const { return v.size(); }
};

template <int D>
struct VectorField {
    PeriodicGrid<D> grid;
    std::array<std::vector<double>, D> comp;

    VectorField() = default;
    explicit VectorField(const PeriodicGrid<D>& g) : grid(g) {
        for (int c = 0; c < D; ++c) comp[c].assign(g.total(), 0.0);
    }

    Vec<D> get(std::size_t i) const {
        Vec<D> q;
        for (int c = 0; c < D; ++c) q[c] = comp[c][i];
        return q;
    }

    void set(std::size_t i, const Vec<D>& q) {
        for (int c = 0; c < D; ++c) comp[c][i] = q[c];
    }

    std::size_t size() const { return comp[0].size(); }
};

template <int D, typename F>
inline ScalarField<D> sample(const PeriodicGrid<D>& g, F fn) {
    ScalarField<D> u(g);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = fn(g.position(i));
    return u;
}

// ============================================================================
// Difference operators
// ============================================================================

template <int D>
inline void gradient_into(const ScalarField<D>& u, VectorField<D>& out) {
    const auto& g = u.grid;
    if constexpr (D == 1) {
        const int n = g.n[0];
        const double inv_h = 1.0 / g.spacing(0);
        for (int i = 0; i + 1 < n; ++i) out.comp[0][i] = (u.v[i + 1] - u.v[i]) * inv_h;
        out.comp[0][n - 1] = (u.v[0] - u.v[n - 1]) * inv_h;
    } else {
        const int n0 = g.n[0], n1 = g.n[1];
        const double inv_h0 = 1.0 / g.spacing(0), inv_h1 = 1.0 / g.spacing(1);
        for (int r = 0; r < n0; ++r) {
            const std::size_t row = static_cast<std::size_t>(r) * n1;
            const std::size_t next_row = static_cast<std::size_t>(r + 1 < n0 ? r + 1 : 0) * n1;
            for (int c = 0; c < n1; ++c) {
                out.comp[0][row + c] = (u.v[next_row + c] - u.v[row + c]) * inv_h0;
                const int cn = (c + 1 < n1) ? c + 1 : 0;
                out.comp[1][row + c] = (u.v[row + cn] - u.v[row + c]) * inv_h1;
            }
        }
    }
}

template <int D>
inline VectorField<D> gradient(const ScalarField<D>& u) {
    VectorField<D> out(u.grid);
    gradient_into(u, out);
    return out;
}

template <int D>
inline void divergence_into(const VectorField<D>& F, ScalarField<D>& out) {
    const auto& g = F.grid;
    if constexpr (D == 1) {
        const int n = g.n[0];
        const double inv_h = 1.0 / g.spacing(0);
        out.v[0] = (F.comp[0][0] - F.comp[0][n - 1]) * inv_h;
        for (int i = 1; i < n; ++i) out.v[i] = (F.comp[0][i] - F.comp[0][i - 1]) * inv_h;
    } else {
        const int n0 = g.n[0], n1 = g.n[1];
        const double inv_h0 = 1.0 / g.spacing(0), inv_h1 = 1.0 / g.spacing(1);
        for (int r = 0; r < n0; ++r) {
            const std::size_t row = static_cast<std::size_t>(r) * n1;
            const std::size_t prev_row = static_cast<std::size_t>(r > 0 ? r - 1 : n0 - 1) * n1;
            for (int c = 0; c < n1; ++c) {
                const int cp = (c > 0) ? c - 1 : n1 - 1;
                out.v[row + c] = (F.comp[0][row + c] - F.comp[0][prev_row + c]) * inv_h0 +
                                 (F.comp[1][row + c] - F.comp[1][row + cp]) * inv_h1;
            }
        }
    }
}

template <int D>
inline ScalarField<D> divergence(const VectorField<D>& F) {
    ScalarField<D> out(F.grid);
    divergence_into(F, out);
    return out;
}

// ============================================================================
// Reductions
// ============================================================================

template <int D>
inline double integrate(const ScalarField<D>& u) {
    double s = 0.0;
    for (double x : u.v) s += x;
    return s * u.grid.cell_volume();
}

// Volume-weighted inner product; the norm behind every ||.||_2 below.
template <int D>
inline double inner_l2(const ScalarField<D>& u, const ScalarField<D>& w) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u.v[i] * w.v[i];
    return s * u.grid.cell_volume();
}

template <int D>
inline double norm_l2_sq(const ScalarField<D>& u) {
    return inner_l2(u, u);
}

template <int D>
inline double norm_l2(const ScalarField<D>& u) {
    return std::sqrt(norm_l2_sq(u));
}

template <int D>
inline double sup_abs(const ScalarField<D>& u) {
    double m = 0.0;
    for (double x : u.v) m = std::max(m, std::abs(x));
    return m;
}

template <int D>
inline double sup_norm(const VectorField<D>& F) {
    double m = 0.0;
    for (std::size_t i = 0; i < F.size(); ++i) m = std::max(m, norm(F.get(i)));
    return m;
}

// ============================================================================
// Pointwise helpers
// ============================================================================

// y += alpha * x
template <int D>
inline void add_scaled(ScalarField<D>& y, double alpha, const ScalarField<D>& x) {
    for (std::size_t i = 0; i < y.size(); ++i) y.v[i] += alpha * x.v[i];
}

template <int D>
inline void scale(ScalarField<D>& y, double alpha) {
    for (double& x : y.v) x *= alpha;
}

template <int D>
inline ScalarField<D> difference(const ScalarField<D>& a, const ScalarField<D>& b) {
    ScalarField<D> r(a.grid);
    for (std::size_t i = 0; i < r.size(); ++i) r.v[i] = a.v[i] - b.v[i];
    return r;
}

}  // namespace ifx
