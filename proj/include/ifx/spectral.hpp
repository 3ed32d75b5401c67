#pragma once

// Projection onto the lowest modes of the periodic Laplacian. On the discrete
// torus the eigenfunctions are the real trigonometric vectors
//   1, cos(2 pi j x / L), sin(2 pi j x / L)   (tensorized per axis),
// with eigenvalue (2 pi / L)^2 |j|^2; they are exactly orthogonal under the
// plain grid sum, so the projection below is idempotent and norm-nonincreasing
// to rounding. For even axis counts the top frequency keeps only its cosine
// (the sine vanishes identically on the grid), which makes the full basis span
// the whole space: keeping every mode reproduces the field exactly.
//
// Modes are ranked by eigenvalue; ties are broken by lexicographic frequency
// vector, cosine before sine per axis, so a partial projection is a fixed,
// reproducible choice.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "ifx/grid.hpp"

namespace ifx {

namespace detail {

// One axis worth of trigonometric vectors: table[m] has n entries,
// freq[m] the integer frequency, kind[m] 0 for cosine (and the constant),
// 1 for sine. norm_sq[m] is the plain-sum squared norm.
struct AxisBasis {
    int n = 0;
    std::vector<std::vector<double>> table;
    std::vector<int> freq;
    std::vector<int> kind;
    std::vector<double> norm_sq;
};

inline AxisBasis build_axis_basis(int n) {
    AxisBasis b;
    b.n = n;
    auto push = [&](int j, int kind) {
        std::vector<double> row(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            double phase = 2.0 * std::numbers::pi * j * i / n;
            row[static_cast<std::size_t>(i)] = (kind == 0) ? std::cos(phase) : std::sin(phase);
        }
        double ns = 0.0;
        for (double x : row) ns += x * x;
        b.table.push_back(std::move(row));
        b.freq.push_back(j);
        b.kind.push_back(kind);
        b.norm_sq.push_back(ns);
    };
    push(0, 0);
    for (int j = 1; 2 * j < n; ++j) {
        push(j, 0);
        push(j, 1);
    }
    if (n % 2 == 0) push(n / 2, 0);  // sine at the top frequency is identically zero
    return b;
}

}  // namespace detail

// Keeps the n_modes lowest-eigenvalue modes of the discrete periodic
// Laplacian; n_modes must lie in [1, total point count]. With n_modes equal
// to the total the projection is the identity to rounding.
template <int D>
inline ScalarField<D> spectral_project(const ScalarField<D>& u, int n_modes) {
    const auto& g = u.grid;
    const std::size_t total = g.total();
    if (n_modes < 1 || static_cast<std::size_t>(n_modes) > total)
        throw std::domain_error("spectral_project: mode count outside [1, total]");

    if constexpr (D == 1) {
        detail::AxisBasis b = detail::build_axis_basis(g.n[0]);
        const std::size_t m_count = b.table.size();

        std::vector<double> coeff(m_count, 0.0);
        for (std::size_t m = 0; m < m_count; ++m) {
            double s = 0.0;
            for (std::size_t i = 0; i < total; ++i) s += b.table[m][i] * u.v[i];
            coeff[m] = s / b.norm_sq[m];
        }

        std::vector<std::size_t> order(m_count);
        for (std::size_t m = 0; m < m_count; ++m) order[m] = m;
        std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
            long lx = static_cast<long>(b.freq[x]) * b.freq[x];
            long ly = static_cast<long>(b.freq[y]) * b.freq[y];
            if (lx != ly) return lx < ly;
            if (b.freq[x] != b.freq[y]) return b.freq[x] < b.freq[y];
            return b.kind[x] < b.kind[y];
        });

        ScalarField<D> out(g);
        for (int r = 0; r < n_modes; ++r) {
            std::size_t m = order[static_cast<std::size_t>(r)];
            for (std::size_t i = 0; i < total; ++i) out.v[i] += coeff[m] * b.table[m][i];
        }
        return out;
    } else {
        detail::AxisBasis b0 = detail::build_axis_basis(g.n[0]);
        detail::AxisBasis b1 = detail::build_axis_basis(g.n[1]);
        const std::size_t m0 = b0.table.size();
        const std::size_t m1 = b1.table.size();
        const int n0 = g.n[0], n1 = g.n[1];

        // Forward: contract axis 0, then axis 1.
        std::vector<double> partial(m0 * static_cast<std::size_t>(n1), 0.0);
        for (std::size_t a = 0; a < m0; ++a)
            for (int r = 0; r < n0; ++r) {
                double w = b0.table[a][static_cast<std::size_t>(r)];
                const std::size_t row = static_cast<std::size_t>(r) * n1;
                for (int c = 0; c < n1; ++c)
                    partial[a * n1 + static_cast<std::size_t>(c)] += w * u.v[row + c];
            }
        std::vector<double> coeff(m0 * m1, 0.0);
        for (std::size_t a = 0; a < m0; ++a)
            for (std::size_t bm = 0; bm < m1; ++bm) {
                double s = 0.0;
                for (int c = 0; c < n1; ++c)
                    s += partial[a * n1 + static_cast<std::size_t>(c)] * b1.table[bm][static_cast<std::size_t>(c)];
                coeff[a * m1 + bm] = s / (b0.norm_sq[a] * b1.norm_sq[bm]);
            }

        struct ModeRef {
            std::size_t a, b;
        };
        std::vector<ModeRef> order;
        order.reserve(m0 * m1);
        for (std::size_t a = 0; a < m0; ++a)
            for (std::size_t bm = 0; bm < m1; ++bm) order.push_back({a, bm});
        std::sort(order.begin(), order.end(), [&](const ModeRef& x, const ModeRef& y) {
            long lx = static_cast<long>(b0.freq[x.a]) * b0.freq[x.a] +
                      static_cast<long>(b1.freq[x.b]) * b1.freq[x.b];
            long ly = static_cast<long>(b0.freq[y.a]) * b0.freq[y.a] +
                      static_cast<long>(b1.freq[y.b]) * b1.freq[y.b];
            if (lx != ly) return lx < ly;
            if (b0.freq[x.a] != b0.freq[y.a]) return b0.freq[x.a] < b0.freq[y.a];
            if (b1.freq[x.b] != b1.freq[y.b]) return b1.freq[x.b] < b1.freq[y.b];
            if (b0.kind[x.a] != b0.kind[y.a]) return b0.kind[x.a] < b0.kind[y.a];
            return b1.kind[x.b] < b1.kind[y.b];
        });

        // Inverse with only the kept coefficients, contracted axis by axis.
        std::vector<double> kept(m0 * m1, 0.0);
        for (int r = 0; r < n_modes; ++r) {
            const ModeRef& mr = order[static_cast<std::size_t>(r)];
            kept[mr.a * m1 + mr.b] = coeff[mr.a * m1 + mr.b];
        }
        std::vector<double> back(m0 * static_cast<std::size_t>(n1), 0.0);
        for (std::size_t a = 0; a < m0; ++a)
            for (std::size_t bm = 0; bm < m1; ++bm) {
                double w = kept[a * m1 + bm];
                if (w == 0.0) continue;
                for (int c = 0; c < n1; ++c)
                    back[a * n1 + static_cast<std::size_t>(c)] += w * b1.table[bm][static_cast<std::size_t>(c)];
            }
        ScalarField<D> out(g);
        for (std::size_t a = 0; a < m0; ++a)
            for (int r = 0; r < n0; ++r) {
                double w = b0.table[a][static_cast<std::size_t>(r)];
                if (w == 0.0) continue;
                const std::size_t row = static_cast<std::size_t>(r) * n1;
                for (int c = 0; c < n1; ++c)
                    out.v[row + c] += w * back[a * n1 + static_cast<std::size_t>(c)];
            }
        return out;
    }
}

}  // namespace ifx
