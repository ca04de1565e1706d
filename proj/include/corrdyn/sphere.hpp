#pragma once
// Points of the extended complex plane, the chordal metric, and Moebius maps.
//
// The point at infinity is a tagged alternative, never a huge float: the
// correspondences treated by this library have exact behavior at infinity
// that float overflow would corrupt. All tolerance comparisons downstream go
// through the chordal metric, which is the Euclidean distance between the
// stereographic images on a sphere of radius 1 (so it is bounded by 2).

#include <cmath>
#include <complex>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <string>

namespace corrdyn {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Default tolerance for "same point" in set membership decisions. Quadratic
// solve residuals accumulate to about 1e-12 per step; 1e-9 leaves headroom
// over a couple dozen steps.
inline constexpr double kSamePointTol = 1e-9;

struct SpherePoint {
    cplx value{0.0, 0.0};
    bool at_infinity = false;

    SpherePoint() = default;

    SpherePoint(const cplx& v) : value(v) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw std::invalid_argument("SpherePoint: non-finite coordinates");
    }
    SpherePoint(double re, double im) : SpherePoint(cplx(re, im)) {}

    static SpherePoint infinity() {
        SpherePoint p;
        p.at_infinity = true;
        return p;
    }

    // Overflow-tolerant factory: a value that left the double range is folded
    // onto the point at infinity instead of poisoning later arithmetic.
    static SpherePoint from_unchecked(const cplx& v) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            return infinity();
        SpherePoint p;
        p.value = v;
        return p;
    }

    bool is_finite() const { return !at_infinity; }

    // Exact equality; tolerance comparisons go through chordal_dist.
    bool operator==(const SpherePoint& o) const {
        if (at_infinity || o.at_infinity) return at_infinity == o.at_infinity;
        return value == o.value;
    }
};

// 2|p-q| / sqrt((1+|p|^2)(1+|q|^2)), with the usual limit at infinity.
// The two denominator factors are applied largest first so the intermediate
// stays in range even for |p| near the double limit.
inline double chordal_dist(const SpherePoint& p, const SpherePoint& q) {
    if (p.at_infinity && q.at_infinity) return 0.0;
    if (p.at_infinity) return 2.0 / std::hypot(1.0, std::abs(q.value));
    if (q.at_infinity) return 2.0 / std::hypot(1.0, std::abs(p.value));
    const double ap = std::abs(p.value);
    const double aq = std::abs(q.value);
    double d = 2.0 * std::abs(p.value - q.value);
    d /= std::hypot(1.0, std::max(ap, aq));
    d /= std::hypot(1.0, std::min(ap, aq));
    return d;
}

inline bool same_point(const SpherePoint& p, const SpherePoint& q,
                       double tol = kSamePointTol) {
    return chordal_dist(p, q) <= tol;
}

// Text form used by the CLI and the CSV writers: "re,im" or the token "inf".
inline std::string point_to_text(const SpherePoint& p) {
    if (p.at_infinity) return "inf";
    char buf[64];
    // adding 0.0 folds negative zero into plain zero
    std::snprintf(buf, sizeof buf, "%.17g,%.17g", p.value.real() + 0.0,
                  p.value.imag() + 0.0);
    return buf;
}

inline SpherePoint point_from_text(const std::string& s) {
    if (s == "inf" || s == "Inf" || s == "INF") return SpherePoint::infinity();
    double re = 0.0, im = 0.0;
    const auto comma = s.find(',');
    if (comma == std::string::npos) {
        re = std::stod(s);
    } else {
        re = std::stod(s.substr(0, comma));
        im = std::stod(s.substr(comma + 1));
    }
    return SpherePoint(re, im);
}

// z |-> (m11 z + m12) / (m21 z + m22), with projective handling of poles and
// of the point at infinity.
struct MobiusMap {
    cplx m11, m12, m21, m22;

    MobiusMap(cplx a11, cplx a12, cplx a21, cplx a22)
        : m11(a11), m12(a12), m21(a21), m22(a22) {
        const cplx d = det();
        if (!(std::isfinite(d.real()) && std::isfinite(d.imag())) || d == cplx(0.0))
            throw std::invalid_argument("MobiusMap: degenerate coefficient matrix");
    }

    cplx det() const { return m11 * m22 - m12 * m21; }

    static MobiusMap identity() { return MobiusMap(1.0, 0.0, 0.0, 1.0); }

    // Adjugate matrix; projectively this is the inverse map.
    MobiusMap inverse() const { return MobiusMap(m22, -m12, -m21, m11); }
};

inline MobiusMap mobius_compose(const MobiusMap& m, const MobiusMap& n) {
    return MobiusMap(m.m11 * n.m11 + m.m12 * n.m21, m.m11 * n.m12 + m.m12 * n.m22,
                     m.m21 * n.m11 + m.m22 * n.m21, m.m21 * n.m12 + m.m22 * n.m22);
}

inline SpherePoint mobius_apply(const MobiusMap& m, const SpherePoint& p) {
    if (p.at_infinity) {
        if (m.m21 == cplx(0.0)) return SpherePoint::infinity();
        return SpherePoint::from_unchecked(m.m11 / m.m21);
    }
    const cplx num = m.m11 * p.value + m.m12;
    const cplx den = m.m21 * p.value + m.m22;
    if (den == cplx(0.0)) return SpherePoint::infinity();
    return SpherePoint::from_unchecked(num / den);
}

// Inverse stereographic projection from the north pole: the unit-sphere point
// (x, y, h) maps to (x + iy)/(1 - h), and the pole itself to infinity.
inline SpherePoint stereographic(double x, double y, double h) {
    const double den = 1.0 - h;
    if (den < 1e-300) return SpherePoint::infinity();
    return SpherePoint::from_unchecked(cplx(x / den, y / den));
}

// Chordal-uniform random point: uniform on the unit sphere, then projected.
inline SpherePoint random_sphere_point(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double h = 2.0 * u01(rng) - 1.0;
    const double th = 2.0 * kPi * u01(rng);
    const double r = std::sqrt(std::max(0.0, 1.0 - h * h));
    return stereographic(r * std::cos(th), r * std::sin(th), h);
}

} // namespace corrdyn
