#pragma once

// Field snapshot format, one field per file:
//
//   IFX1 d=<d> n=<n1[,n2]> L=<L> t=<time>\n
//
// followed by the raw payload: little-endian IEEE float64, row-major (last
// axis contiguous), vector components concatenated plane by plane. The header
// is a single ASCII line; L and t are printed with 17 significant digits so a
// write/read cycle is bit-exact.

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ifx/common.hpp"
#include "ifx/grid.hpp"

static_assert(std::endian::native == std::endian::little,
              "field files are little-endian; this platform is not");

namespace ifx {

namespace detail {

inline std::string format_g17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

template <int D>
inline std::string field_header(const PeriodicGrid<D>& g, double t) {
    std::string h = "IFX1 d=" + std::to_string(D) + " n=";
    for (int i = 0; i < D; ++i) {
        if (i) h += ",";
        h += std::to_string(g.n[i]);
    }
    h += " L=" + format_g17(g.L) + " t=" + format_g17(t) + "\n";
    return h;
}

struct ParsedHeader {
    int d = 0;
    std::vector<int> n;
    double L = 0.0;
    double t = 0.0;
};

inline ParsedHeader parse_field_header(const std::string& line, const std::string& path) {
    std::istringstream in(line);
    std::string magic;
    in >> magic;
    if (magic != "IFX1") throw ConfigError("field file " + path + ": bad magic '" + magic + "'");
    ParsedHeader h;
    std::string tok;
    while (in >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos)
            throw ConfigError("field file " + path + ": malformed token '" + tok + "'");
        std::string key = tok.substr(0, eq);
        std::string val = tok.substr(eq + 1);
        try {
            if (key == "d") {
                h.d = std::stoi(val);
            } else if (key == "n") {
                std::istringstream ns(val);
                std::string piece;
                while (std::getline(ns, piece, ',')) h.n.push_back(std::stoi(piece));
            } else if (key == "L") {
                h.L = std::stod(val);
            } else if (key == "t") {
                h.t = std::stod(val);
            } else {
                throw ConfigError("field file " + path + ": unknown key '" + key + "'");
            }
        } catch (const std::invalid_argument&) {
            throw ConfigError("field file " + path + ": bad value for '" + key + "'");
        }
    }
    if (h.d < 1 || h.d > 2 || static_cast<int>(h.n.size()) != h.d || h.L <= 0.0)
        throw ConfigError("field file " + path + ": inconsistent header");
    return h;
}

inline void write_payload(std::ofstream& out, const std::vector<double>& v) {
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
}

template <int D>
inline std::pair<ParsedHeader, std::vector<double>> read_field_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("field file " + path + ": cannot open");
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("field file " + path + ": empty");
    ParsedHeader h = parse_field_header(line, path);
    if (h.d != D) throw ConfigError("field file " + path + ": dimension mismatch");
    std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (raw.size() % sizeof(double) != 0)
        throw ConfigError("field file " + path + ": payload is not a float64 array");
    std::vector<double> payload(raw.size() / sizeof(double));
    std::memcpy(payload.data(), raw.data(), raw.size());
    return {h, std::move(payload)};
}

}  // namespace detail

template <int D>
inline void write_field(const std::string& path, const ScalarField<D>& u, double t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("field file " + path + ": cannot open for writing");
    out << detail::field_header(u.grid, t);
    detail::write_payload(out, u.v);
    if (!out) throw ConfigError("field file " + path + ": write failed");
}

template <int D>
inline void write_field(const std::string& path, const VectorField<D>& F, double t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("field file " + path + ": cannot open for writing");
    out << detail::field_header(F.grid, t);
    for (int c = 0; c < D; ++c) detail::write_payload(out, F.comp[c]);
    if (!out) throw ConfigError("field file " + path + ": write failed");
}

template <int D>
inline std::pair<ScalarField<D>, double> read_scalar_field(const std::string& path) {
    auto [h, payload] = detail::read_field_file<D>(path);
    std::array<int, D> counts;
    for (int i = 0; i < D; ++i) counts[i] = h.n[static_cast<std::size_t>(i)];
    PeriodicGrid<D> g(counts, h.L);
    if (payload.size() != g.total())
        throw ConfigError("field file " + path + ": payload size does not match a scalar field");
    ScalarField<D> u(g);
    u.v = std::move(payload);
    return {std::move(u), h.t};
}

template <int D>
inline std::pair<VectorField<D>, double> read_vector_field(const std::string& path) {
    auto [h, payload] = detail::read_field_file<D>(path);
    std::array<int, D> counts;
    for (int i = 0; i < D; ++i) counts[i] = h.n[static_cast<std::size_t>(i)];
    PeriodicGrid<D> g(counts, h.L);
    if (payload.size() != g.total() * static_cast<std::size_t>(D))
        throw ConfigError("field file " + path + ": payload size does not match a vector field");
    VectorField<D> F(g);
    for (int c = 0; c < D; ++c)
        std::copy(payload.begin() + static_cast<std::ptrdiff_t>(c * g.total()),
                  payload.begin() + static_cast<std::ptrdiff_t>((c + 1) * g.total()),
                  F.comp[c].begin());
    return {std::move(F), h.t};
}

}  // namespace ifx
