#pragma once

// Constitutive maps between flux and gradient for a diffusion law whose
// unregularized branch confines the gradient to the open unit ball:
//
//   f(q)      = q / (1 + |q|^a)^(1/a)          gradient produced by flux q
//   f_eps(q)  = f(q) + eps q                   regularized, onto all of R^d
//   A(q)      = D f(q)                         symmetric positive definite
//
// All maps are radial: f(q) = f(|q|) q/|q|, which the scalar helpers exploit.
// Powers of (1 + s^a) are evaluated through log1p so that both s -> 0 and
// s -> inf stay accurate; the identity (1+s^a)^e = s^(a e) (1+s^-a)^e is
// applied implicitly for s > 1.

#include <cmath>
#include <string>

#include "ifx/common.hpp"
#include "ifx/vec.hpp"

namespace ifx {

// ============================================================================
// Parameters
// ============================================================================

// d is the spatial dimension of flux/gradient values; L the period of the
// box (0,L)^d; U the sup-norm cap on initial gradients (U < 1 whenever the
// initial flux must be recovered with epsilon = 0).
struct ModelParams {
    double a = 1.0;
    double epsilon = 1e-2;
    int d = 1;
    double L = 1.0;
    double U = 0.5;

    void validate() const {
        if (!(a > 0.0)) throw ConfigError("model: a must be positive");
        if (!(epsilon >= 0.0)) throw ConfigError("model: epsilon must be nonnegative");
        if (d != 1 && d != 2) throw ConfigError("model: d must be 1 or 2");
        if (!(L > 0.0)) throw ConfigError("model: L must be positive");
        if (!(U >= 0.0)) throw ConfigError("model: U must be nonnegative");
    }
};

// ============================================================================
// Scalar radial profiles
// ============================================================================

namespace detail {

// (1 + s^a)^(num/a) for s >= 0, with the exponent supplied as its numerator.
// For s > 1 the dominant factor is split off analytically as pow(s, num), so
// the exp argument stays below log(2)*|num|/a and no rounding error gets
// amplified by log(s); passing num (rather than num/a) keeps that split exact.
inline double shifted_power(double s, double a, double num) {
    if (s <= 1.0) return std::exp(num / a * std::log1p(std::pow(s, a)));
    return std::pow(s, num) * std::exp(num / a * std::log1p(std::pow(s, -a)));
}

// s^a / (1 + s^a) in [0, 1).
inline double radial_mix(double s, double a) {
    if (s <= 1.0) {
        double p = std::pow(s, a);
        return p / (1.0 + p);
    }
    return 1.0 / (1.0 + std::pow(s, -a));
}

inline void check_radial_args(double s, double a, const char* who) {
    if (!(a > 0.0)) throw std::domain_error(std::string(who) + ": a must be positive");
    if (!(s >= 0.0)) throw std::domain_error(std::string(who) + ": radius must be nonnegative");
}

}  // namespace detail

// (1 + s^a)^(-1/a); equals radial_f(s)/s for s > 0 and 1 at s = 0.
inline double radial_weight(double s, double a) {
    detail::check_radial_args(s, a, "radial_weight");
    return detail::shifted_power(s, a, -1.0);
}

// f(s) = s (1 + s^a)^(-1/a), strictly increasing from 0 onto [0, 1).
// The s > 1 branch cancels the leading factor analytically, f = (1+s^-a)^(-1/a),
// so the result approaches 1 from below to the last ulp instead of accumulating
// log(s)-scaled rounding error; the value can then never exceed the exact
// supremum 1, which the clamp enforces against libm slop.
inline double radial_f(double s, double a) {
    detail::check_radial_args(s, a, "radial_f");
    if (s <= 1.0) return s * detail::shifted_power(s, a, -1.0);
    return std::min(1.0, std::exp(-1.0 / a * std::log1p(std::pow(s, -a))));
}

// f'(s) = (1 + s^a)^(-(1+a)/a), strictly positive and decreasing.
inline double radial_f_prime(double s, double a) {
    detail::check_radial_args(s, a, "radial_f_prime");
    return detail::shifted_power(s, a, -(1.0 + a));
}

// f_eps(s) = f(s) + eps s, strictly increasing onto [0, inf) for eps > 0.
inline double radial_f_eps(double s, double a, double epsilon) {
    detail::check_radial_args(s, a, "radial_f_eps");
    if (!(epsilon >= 0.0)) throw std::domain_error("radial_f_eps: epsilon must be nonnegative");
    return radial_f(s, a) + epsilon * s;
}

inline double radial_f_eps_prime(double s, double a, double epsilon) {
    return radial_f_prime(s, a) + epsilon;
}

// ============================================================================
// Scalar inversion
// ============================================================================

// Solves radial_f_eps(s) = y for s >= 0.
//
// epsilon = 0 admits the closed form s = y (1 - y^a)^(-1/a) on [0, 1); it is
// used as the Newton seed and polished against the residual so that the
// roundtrip holds to 1e-12 * max(1, y). epsilon > 0 runs a safeguarded Newton
// on the bracket [0, y/epsilon] (valid because f >= 0), tightened by the
// epsilon = 0 closed form when y < 1 since f_eps >= f.
inline double invert_radial(double y, double a, double epsilon) {
    detail::check_radial_args(y, a, "invert_radial");
    if (!(epsilon >= 0.0)) throw std::domain_error("invert_radial: epsilon must be nonnegative");
    if (y == 0.0) return 0.0;

    const double tol = 1e-12 * std::max(1.0, y);
    const int max_iter = 100;

    if (epsilon == 0.0) {
        if (y >= 1.0)
            throw DomainExceeded("invert_radial: target " + std::to_string(y) +
                                 " outside the unit range of the unregularized map");
        // 1 - y^a = -expm1(a log y), accurate as y -> 1.
        double s = y * std::pow(-std::expm1(a * std::log(y)), -1.0 / a);
        for (int it = 0; it < max_iter; ++it) {
            double r = radial_f(s, a) - y;
            if (std::abs(r) <= tol) return s;
            double step = r / radial_f_prime(s, a);
            if (std::abs(step) > 0.5 * s) step = (step > 0 ? 0.5 : -0.5) * s;
            s -= step;
        }
        throw NoConvergence("invert_radial: no convergence at epsilon = 0, y = " +
                            std::to_string(y));
    }

    double hi = y / epsilon;
    if (y < 1.0) hi = std::min(hi, y * std::pow(-std::expm1(a * std::log(y)), -1.0 / a));
    double lo = 0.0;
    double s = std::min(y / (1.0 + epsilon), hi);
    for (int it = 0; it < max_iter; ++it) {
        double r = radial_f_eps(s, a, epsilon) - y;
        if (std::abs(r) <= tol) return s;
        if (r > 0.0)
            hi = s;
        else
            lo = s;
        double step = r / radial_f_eps_prime(s, a, epsilon);
        double next = s - step;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        s = next;
    }
    throw NoConvergence("invert_radial: no convergence at epsilon = " +
                        std::to_string(epsilon) + ", y = " + std::to_string(y));
}

// ============================================================================
// Vector maps
// ============================================================================

template <int D>
inline Vec<D> map_f(const Vec<D>& q, double a) {
    double s = norm(q);
    detail::check_radial_args(s, a, "map_f");
    if (s == 0.0) return Vec<D>::zero();
    return q * radial_weight(s, a);
}

template <int D>
inline Vec<D> map_f_eps(const Vec<D>& q, double a, double epsilon) {
    return map_f(q, a) + q * epsilon;
}

template <int D>
inline Vec<D> invert_map(const Vec<D>& y, double a, double epsilon) {
    double r = norm(y);
    if (r == 0.0) return Vec<D>::zero();
    double s = invert_radial(r, a, epsilon);
    return y * (s / r);
}

// ============================================================================
// Jacobian and weighted products
// ============================================================================

// Radial decomposition of A(q) = w (I - rho e e^T), with w = (1+s^a)^(-1/a),
// rho = s^a/(1+s^a), e = q/|q|. Eigenvalues: w(1-rho) = (1+s^a)^(-(1+a)/a)
// along e, w on the orthogonal complement; hence 0 < A <= I.
template <int D>
struct RadialJacobian {
    double s = 0.0;
    double w = 1.0;
    double rho = 0.0;
    Vec<D> ehat{};
};

template <int D>
inline RadialJacobian<D> radial_jacobian(const Vec<D>& q, double a) {
    RadialJacobian<D> j;
    j.s = norm(q);
    detail::check_radial_args(j.s, a, "radial_jacobian");
    if (j.s == 0.0) return j;
    j.w = radial_weight(j.s, a);
    j.rho = detail::radial_mix(j.s, a);
    j.ehat = q * (1.0 / j.s);
    return j;
}

// Dense d x d flux-to-gradient Jacobian.
template <int D>
struct FluxMetric {
    std::array<std::array<double, D>, D> m{};

    double operator()(int i, int j) const { return m[i][j]; }

    Vec<D> apply(const Vec<D>& v) const {
        Vec<D> r;
        for (int i = 0; i < D; ++i) {
            double s = 0.0;
            for (int j = 0; j < D; ++j) s += m[i][j] * v[j];
            r[i] = s;
        }
        return r;
    }
};

template <int D>
inline FluxMetric<D> jacobian_A(const Vec<D>& q, double a) {
    RadialJacobian<D> j = radial_jacobian(q, a);
    FluxMetric<D> A;
    for (int r = 0; r < D; ++r)
        for (int c = 0; c < D; ++c) {
            double entry = (r == c ? 1.0 : 0.0);
            if (j.s > 0.0) entry -= j.rho * j.ehat[r] * j.ehat[c];
            A.m[r][c] = j.w * entry;
        }
    return A;
}

// (v, w)_{A(q)} = v . A(q) w, evaluated through the radial decomposition so
// no matrix is formed. Satisfies |v|^2 (1+|q|^a)^(-(1+a)/a) <= (v, v)_A
// <= |v|^2 (1+|q|^a)^(-1/a) <= |v|^2 and (v, w)_A <= 2 |v| |w|.
template <int D>
inline double weighted_inner(const Vec<D>& v, const Vec<D>& w, const Vec<D>& q, double a) {
    RadialJacobian<D> j = radial_jacobian(q, a);
    if (j.s == 0.0) return dot(v, w);
    return j.w * (dot(v, w) - j.rho * dot(j.ehat, v) * dot(j.ehat, w));
}

// (A(q) + eps I)^(-1) v: along ehat the eigenvalue is w(1-rho) + eps, on the
// orthogonal complement w + eps. This is the inner linearization solved per
// point by the implicit scheme.
template <int D>
inline Vec<D> shifted_jacobian_solve(const RadialJacobian<D>& j, double eps, const Vec<D>& v) {
    if (j.s == 0.0) return v * (1.0 / (j.w + eps));
    double along = dot(j.ehat, v);
    double lam_par = j.w * (1.0 - j.rho) + eps;
    double lam_perp = j.w + eps;
    Vec<D> r = (v - j.ehat * along) * (1.0 / lam_perp);
    return r + j.ehat * (along / lam_par);
}

// ============================================================================
// General power-law pair
// ============================================================================

// f_general(q) = (delta + |q|^a)^((p'-2)/a) q and its partner
// g_general(z) = (delta + |z|^a)^((p-2)/a) z. With delta = 0 and conjugate
// exponents 1/p + 1/p' = 1 the two maps are mutual inverses; with delta = 1,
// p' = 1 the first reduces exactly to map_f.
namespace detail {

template <int D>
inline Vec<D> power_weighted(const Vec<D>& q, double a, double exponent_num, double delta,
                             const char* who) {
    double s = norm(q);
    check_radial_args(s, a, who);
    if (delta == 0.0) {
        double e = exponent_num;  // (p-2), applied to |q| directly
        if (s == 0.0) {
            if (e < 0.0)
                throw std::domain_error(std::string(who) +
                                        ": q = 0 with delta = 0 and exponent below 2");
            if (e == 0.0) return q;
            return Vec<D>::zero();
        }
        return q * std::pow(s, e);
    }
    if (delta != 1.0)
        throw std::domain_error(std::string(who) + ": delta must be 0 or 1");
    return q * shifted_power(s, a, exponent_num);
}

}  // namespace detail

template <int D>
inline Vec<D> map_f_general(const Vec<D>& q, double a, double p_prime, double delta) {
    return detail::power_weighted(q, a, p_prime - 2.0, delta, "map_f_general");
}

template <int D>
inline Vec<D> map_g_general(const Vec<D>& z, double a, double p, double delta) {
    return detail::power_weighted(z, a, p - 2.0, delta, "map_g_general");
}

// ============================================================================
// Truncation profile and its weighted antiderivative
// ============================================================================

// C^1 cutoff: 1 on [0, k], 0 on [k+1, inf), cubic 1 - 3x^2 + 2x^3 in between
// (x = s - k). Slope stays in [-1.5, 0], inside the admissible [-2, 0].
struct Truncation {
    double k;
    double a;

    Truncation(double k_, double a_) : k(k_), a(a_) {
        if (!(k >= 1.0)) throw std::domain_error("Truncation: k must be at least 1");
        if (!(a > 0.0)) throw std::domain_error("Truncation: a must be positive");
    }
};

inline double tau_k(double s, const Truncation& tr) {
    if (!(s >= 0.0)) throw std::domain_error("tau_k: argument must be nonnegative");
    if (s <= tr.k) return 1.0;
    if (s >= tr.k + 1.0) return 0.0;
    double x = s - tr.k;
    return 1.0 - x * x * (3.0 - 2.0 * x);
}

inline double tau_k_prime(double s, const Truncation& tr) {
    if (!(s >= 0.0)) throw std::domain_error("tau_k_prime: argument must be nonnegative");
    if (s <= tr.k || s >= tr.k + 1.0) return 0.0;
    double x = s - tr.k;
    return -6.0 * x * (1.0 - x);
}

namespace detail {

// (1 + s^a)^(1/a), the integrand weight of G_k.
inline double growth_weight(double s, double a) { return shifted_power(s, a, 1.0); }

template <typename F>
inline double adaptive_simpson(F f, double lo, double hi, double flo, double fmid, double fhi,
                               double whole, double tol, int depth) {
    double mid = 0.5 * (lo + hi);
    double lmid = 0.5 * (lo + mid);
    double rmid = 0.5 * (mid + hi);
    double flmid = f(lmid);
    double frmid = f(rmid);
    double left = (mid - lo) / 6.0 * (flo + 4.0 * flmid + fmid);
    double right = (hi - mid) / 6.0 * (fmid + 4.0 * frmid + fhi);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson(f, lo, mid, flo, flmid, fmid, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, mid, hi, fmid, frmid, fhi, right, 0.5 * tol, depth - 1);
}

template <typename F>
inline double integrate_adaptive(F f, double lo, double hi, double tol) {
    if (!(hi > lo)) return 0.0;
    double flo = f(lo);
    double fhi = f(hi);
    double fmid = f(0.5 * (lo + hi));
    double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
    return adaptive_simpson(f, lo, hi, flo, fmid, fhi, whole, tol, 48);
}

}  // namespace detail

// G_k(t) = int_0^t tau_k'(s) (1 + s^a)^(1/a) ds. Vanishes for t <= k, is
// constant for t >= k+1, and obeys |G_k(t)| <= 2^((a+1)/a) (1 + k).
inline double G_k(double t, const Truncation& tr) {
    if (!(t >= 0.0)) throw std::domain_error("G_k: argument must be nonnegative");
    if (t <= tr.k) return 0.0;
    double hi = std::min(t, tr.k + 1.0);
    double a = tr.a;
    auto integrand = [&](double s) { return tau_k_prime(s, tr) * detail::growth_weight(s, a); };
    return detail::integrate_adaptive(integrand, tr.k, hi, 1e-10);
}

}  // namespace ifx
