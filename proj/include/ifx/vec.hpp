#pragma once

#include <array>
#include <cmath>

namespace ifx {

// Small fixed-dimension point value, D in {1, 2}.
template <int D>
struct Vec {
    std::array<double, D> c{};

    Vec() = default;

    static Vec zero() { return Vec{}; }

    double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

    Vec operator+(const Vec& o) const {
        Vec r;
        for (int i = 0; i < D; ++i) r.c[i] = c[i] + o.c[i];
        return r;
    }
    Vec operator-(const Vec& o) const {
        Vec r;
        for (int i = 0; i < D; ++i) r.c[i] = c[i] - o.c[i];
        return r;
    }
    Vec operator*(double s) const {
        Vec r;
        for (int i = 0; i < D; ++i) r.c[i] = c[i] * s;
        return r;
    }
    Vec& operator+=(const Vec& o) {
        for (int i = 0; i < D; ++i) c[i] += o.c[i];
        return *this;
    }
};

template <int D>
inline Vec<D> operator*(double s, const Vec<D>& v) {
    return v * s;
}

template <int D>
inline double dot(const Vec<D>& a, const Vec<D>& b) {
    double s = 0.0;
    for (int i = 0; i < D; ++i) s += a[i] * b[i];
    return s;
}

template <int D>
inline double norm(const Vec<D>& v) {
    if constexpr (D == 1) return std::abs(v[0]);
    return std::hypot(v[0], v[1]);
}

inline Vec<1> make_vec(double x) {
    Vec<1> v;
    v[0] = x;
    return v;
}

inline Vec<2> make_vec(double x, double y) {
    Vec<2> v;
    v[0] = x;
    v[1] = y;
    return v;
}

}  // namespace ifx
