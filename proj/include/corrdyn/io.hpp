#pragma once
// File formats: atom and feature CSVs, periodic and superstable reports, and
// the bivariate polynomial text form. Every CSV starts with the effective
// configuration echoed as `# key=value` comment lines, so each artifact
// records how it was produced.

#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "corrdyn/atoms.hpp"
#include "corrdyn/measure.hpp"
#include "corrdyn/periodic.hpp"
#include "corrdyn/polyalg.hpp"
#include "corrdyn/sphere.hpp"

namespace corrdyn {

// Shortest decimal that round-trips a double.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Ordered key=value pairs echoed at the top of output files.
using ConfigEcho = std::vector<std::pair<std::string, std::string>>;

namespace detail {

struct FileCloser {
    std::FILE* f = nullptr;
    ~FileCloser() {
        if (f) std::fclose(f);
    }
};

inline std::FILE* open_or_throw(const std::string& path, const char* mode) {
    std::FILE* f = std::fopen(path.c_str(), mode);
    if (!f)
        throw std::runtime_error(std::string("cannot open ") + path +
                                 " for " + (mode[0] == 'r' ? "reading" : "writing"));
    return f;
}

inline void write_echo(std::FILE* f, const ConfigEcho& echo) {
    for (const auto& [k, v] : echo)
        std::fprintf(f, "# %s=%s\n", k.c_str(), v.c_str());
}

inline bool next_data_line(std::FILE* f, std::string& line) {
    char buf[512];
    while (std::fgets(buf, sizeof buf, f)) {
        const char* s = buf;
        while (*s == ' ' || *s == '\t') ++s;
        if (*s == '\0' || *s == '\n' || *s == '#') continue;
        line = s;
        return true;
    }
    return false;
}

} // namespace detail

inline void write_atoms_csv(const std::string& path, const AtomicMeasure& mu,
                            const ConfigEcho& echo = {}) {
    detail::FileCloser fc{detail::open_or_throw(path, "wb")};
    detail::write_echo(fc.f, echo);
    std::fprintf(fc.f, "re,im,at_infinity,weight\n");
    for (const auto& [p, w] : mu.atoms) {
        if (p.at_infinity)
            std::fprintf(fc.f, "0,0,1,%.17g\n", w);
        else
            std::fprintf(fc.f, "%.17g,%.17g,0,%.17g\n", p.value.real() + 0.0,
                         p.value.imag() + 0.0, w);
    }
}

inline AtomicMeasure read_atoms_csv(const std::string& path) {
    detail::FileCloser fc{detail::open_or_throw(path, "rb")};
    AtomicMeasure mu;
    std::string line;
    bool header_seen = false;
    while (detail::next_data_line(fc.f, line)) {
        if (!header_seen) {
            if (line.rfind("re,im,at_infinity,weight", 0) != 0)
                throw std::runtime_error(path + ": expected atom CSV header");
            header_seen = true;
            continue;
        }
        double re = 0.0, im = 0.0, w = 0.0;
        int inf = 0;
        if (std::sscanf(line.c_str(), "%lf,%lf,%d,%lf", &re, &im, &inf, &w) != 4)
            throw std::runtime_error(path + ": malformed atom row: " + line);
        mu.atoms.emplace_back(
            inf ? SpherePoint::infinity() : SpherePoint::from_unchecked({re, im}),
            w);
    }
    if (!header_seen) throw std::runtime_error(path + ": empty atom CSV");
    return mu;
}

inline void write_features_csv(const std::string& path, const FeatureVector& f,
                               const ConfigEcho& echo = {}) {
    detail::FileCloser fc{detail::open_or_throw(path, "wb")};
    detail::write_echo(fc.f, echo);
    std::fprintf(fc.f, "# descriptor=%s\n", f.descriptor.c_str());
    std::fprintf(fc.f, "center_index,value\n");
    for (std::size_t j = 0; j < f.values.size(); ++j)
        std::fprintf(fc.f, "%zu,%.17g\n", j, f.values[j]);
}

inline void write_periodic_csv(const std::string& path, const PeriodicReport& rep,
                               const ConfigEcho& echo = {}) {
    detail::FileCloser fc{detail::open_or_throw(path, "wb")};
    detail::write_echo(fc.f, echo);
    std::fprintf(fc.f, "re,im,at_infinity,multiplicity,side,verified\n");
    for (const auto& p : rep.points) {
        if (p.point.at_infinity)
            std::fprintf(fc.f, "0,0,1,%d,%s,%d\n", p.multiplicity,
                         to_string(p.side), p.verified ? 1 : 0);
        else
            std::fprintf(fc.f, "%.17g,%.17g,0,%d,%s,%d\n",
                         p.point.value.real() + 0.0, p.point.value.imag() + 0.0,
                         p.multiplicity, to_string(p.side),
                         p.verified ? 1 : 0);
    }
}

inline void write_superstable_csv(const std::string& path,
                                  const std::vector<SuperstableHit>& hits,
                                  const ConfigEcho& echo = {}) {
    detail::FileCloser fc{detail::open_or_throw(path, "wb")};
    detail::write_echo(fc.f, echo);
    std::fprintf(fc.f, "re,im,residual,critical_verified\n");
    for (const auto& h : hits)
        std::fprintf(fc.f, "%.17g,%.17g,%.17g,%d\n", h.a.real(), h.a.imag(),
                     h.residual, h.verified_critical ? 1 : 0);
}

// Text form of a bivariate polynomial: one line `dz dw`, then
// (dz+1)*(dw+1) lines `i j re im` in row-major order.
inline void write_bipoly(const std::string& path, const BiPoly& p) {
    detail::FileCloser fc{detail::open_or_throw(path, "wb")};
    std::fprintf(fc.f, "%d %d\n", p.deg_z(), p.deg_w());
    for (int i = 0; i <= p.deg_z(); ++i)
        for (int j = 0; j <= p.deg_w(); ++j)
            std::fprintf(fc.f, "%d %d %.21Lg %.21Lg\n", i, j,
                         static_cast<long double>(p.c[i][j].real()),
                         static_cast<long double>(p.c[i][j].imag()));
}

inline BiPoly read_bipoly(const std::string& path) {
    detail::FileCloser fc{detail::open_or_throw(path, "rb")};
    std::string line;
    if (!detail::next_data_line(fc.f, line))
        throw std::runtime_error(path + ": empty polynomial file");
    int dz = -1, dw = -1;
    if (std::sscanf(line.c_str(), "%d %d", &dz, &dw) != 2 || dz < 0 || dw < 0)
        throw std::runtime_error(path + ": malformed degree line: " + line);
    BiPoly p = BiPoly::zero(dz, dw);
    for (int count = 0; count < (dz + 1) * (dw + 1); ++count) {
        if (!detail::next_data_line(fc.f, line))
            throw std::runtime_error(path + ": truncated coefficient list");
        int i = -1, j = -1;
        long double re = 0.0L, im = 0.0L;
        if (std::sscanf(line.c_str(), "%d %d %Lf %Lf", &i, &j, &re, &im) != 4 ||
            i < 0 || i > dz || j < 0 || j > dw)
            throw std::runtime_error(path + ": malformed coefficient row: " + line);
        p.c[i][j] = lcplx(re, im);
    }
    return p;
}

} // namespace corrdyn
