#pragma once
// Fundamental-domain geometry for the correspondence pair, valid on the
// parameter disk |a - 4| <= 3.
//
// The covering relation keeps a domain bounded by the curve traced by
// (1 + t/2) +- i sqrt(3 t + 3 t^2 / 4), t >= 0; eliminating t turns the
// region to the right of that curve into the closed-form test
//   x > 1  and  y^2 < 3 (x^2 - 1).
// The involution keeps the exterior of the circle through 1 and a centered
// at 1 + r on the real axis. The two domains overlap so that their union
// covers the sphere minus the common boundary point 1, which is what makes
// the single-valued two-sided restriction below well defined.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "corrdyn/corr.hpp"
#include "corrdyn/sphere.hpp"

namespace corrdyn {

// Region of the covering relation: right of the critical curve.
inline bool in_delta_cov(const SpherePoint& z) {
    if (z.at_infinity) return false;
    const double x = z.value.real();
    const double y = z.value.imag();
    return x > 1.0 && y * y < 3.0 * (x * x - 1.0);
}

// Region of the involution: exterior of the circle, plus infinity.
inline bool in_delta_j(const CorrContext& ctx, const SpherePoint& z) {
    if (!ctx.klein_radius)
        throw std::domain_error("in_delta_j: domain circle needs Re(a) > 1");
    if (z.at_infinity) return true;
    const double r = *ctx.klein_radius;
    return std::abs(z.value - cplx(1.0 + r, 0.0)) > r;
}

namespace detail {
// Signed margins: positive inside the region, negative outside, roughly
// proportional to the distance near the boundary. Used by the Monte-Carlo
// checks to keep a tolerance band around both boundaries.
inline double cov_margin(const SpherePoint& z) {
    if (z.at_infinity) return -1.0;
    const double x = z.value.real();
    const double y = z.value.imag();
    return std::min(x - 1.0, 3.0 * (x * x - 1.0) - y * y);
}
inline double j_margin(const CorrContext& ctx, const SpherePoint& z) {
    const double r = *ctx.klein_radius;
    if (z.at_infinity) return 1.0;
    return std::abs(z.value - cplx(1.0 + r, 0.0)) - r;
}
} // namespace detail

struct KleinReport {
    bool disjoint_ok = true;
    bool cover_ok = true;
    bool involution_ok = true;
    int disjoint_failures = 0;
    int cover_failures = 0;
    int involution_failures = 0;
    std::vector<SpherePoint> disjoint_examples;
    std::vector<SpherePoint> cover_examples;
    std::vector<SpherePoint> involution_examples;
    int samples = 0;

    bool all_ok() const { return disjoint_ok && cover_ok && involution_ok; }
};

// Monte-Carlo validation of the domain pair over chordal-uniform samples:
//  (i) images of the covering relation leave its domain,
//  (ii) the involution maps its domain off itself,
//  (iii) the two domains cover everything except a neighborhood of 1.
// All three use a 1e-6 margin band so that boundary roundoff never counts
// as a failure; samples within chordal 1e-6 of the common point 1 are
// excluded outright.
inline KleinReport validate_klein(const CorrContext& ctx, int n_samples,
                                  std::uint64_t seed = 0x2d358dccaa556c9dULL) {
    if (std::abs(ctx.a - cplx(4.0)) > 3.0)
        throw std::invalid_argument(
            "validate_klein: parameter outside the supported disk |a-4| <= 3");
    if (!ctx.klein_radius)
        throw std::invalid_argument("validate_klein: requires Re(a) > 1");

    constexpr double band = 1e-6;
    const SpherePoint one(1.0, 0.0);
    KleinReport rep;
    rep.samples = n_samples;
    std::mt19937_64 rng(seed);
    auto note = [](bool& ok, int& count, std::vector<SpherePoint>& ex,
                   const SpherePoint& z) {
        ok = false;
        ++count;
        if (ex.size() < 10) ex.push_back(z);
    };

    for (int i = 0; i < n_samples; ++i) {
        const SpherePoint z = random_sphere_point(rng);
        if (chordal_dist(z, one) < band) continue;

        if (detail::cov_margin(z) > band) {
            for (const auto& im : cov_images(z).images)
                if (detail::cov_margin(im.first) > band)
                    note(rep.disjoint_ok, rep.disjoint_failures,
                         rep.disjoint_examples, z);
        }
        if (detail::j_margin(ctx, z) > band) {
            const SpherePoint jz = mobius_apply(ctx.j_map, z);
            if (detail::j_margin(ctx, jz) > band)
                note(rep.involution_ok, rep.involution_failures,
                     rep.involution_examples, z);
        }
        if (detail::cov_margin(z) < -band && detail::j_margin(ctx, z) < -band)
            note(rep.cover_ok, rep.cover_failures, rep.cover_examples, z);
    }
    return rep;
}

// Plain-text form of the report: one line per check.
inline std::string klein_report_text(const KleinReport& rep) {
    auto line = [](const char* name, bool ok, int count,
                   const std::vector<SpherePoint>& ex) {
        std::string s = std::string(name) + ": ";
        if (ok) {
            s += "PASS";
        } else {
            s += "FAIL count=" + std::to_string(count);
            for (const auto& p : ex) s += " " + point_to_text(p);
        }
        return s + "\n";
    };
    std::string out;
    out += line("disjointness", rep.disjoint_ok, rep.disjoint_failures,
                rep.disjoint_examples);
    out += line("coverage", rep.cover_ok, rep.cover_failures, rep.cover_examples);
    out += line("involution", rep.involution_ok, rep.involution_failures,
                rep.involution_examples);
    return out;
}

// Result of the escape iteration: either the orbit stayed in the closed
// circle-exterior for all tested steps, or it left at a definite step.
struct EscapeResult {
    bool inside = true;
    int escaped_step = 0;  // valid when !inside; first step with no image
    SpherePoint last_point;
    double last_step_size = 0.0; // chordal distance between final iterates
};

enum class LimitSide { minus, plus };

inline const char* to_string(LimitSide s) {
    return s == LimitSide::minus ? "minus" : "plus";
}

namespace detail {
// Width of the closure band around the domain circle: an image with
// |w - c| >= r - band still counts as available, because orbits hugging the
// boundary near the parabolic point would otherwise flicker in and out.
inline constexpr double kClosureBand = 1e-9;
} // namespace detail

// The single-valued restriction: among the two forward images of z, the one
// lying in the circle-exterior domain. Returns nothing when neither image is
// within the closure band (the orbit has escaped). The common boundary point
// 1 is fixed by convention, where the restriction extends continuously.
inline std::optional<SpherePoint> f_restricted(const CorrContext& ctx,
                                               const SpherePoint& z) {
    if (!ctx.klein_radius)
        throw std::domain_error("f_restricted: domain circle needs Re(a) > 1");
    const SpherePoint one(1.0, 0.0);
    if (!z.at_infinity && z.value == cplx(1.0)) return one;

    const WeightedImage fw = fa_forward(ctx, z);
    double best_margin = -1.0;
    std::optional<SpherePoint> best;
    int strictly_inside = 0;
    for (const auto& im : fw.images) {
        const double m = detail::j_margin(ctx, im.first);
        if (m > detail::kClosureBand) ++strictly_inside;
        if (m >= -detail::kClosureBand && m > best_margin) {
            best_margin = m;
            best = im.first;
        }
    }
    if (strictly_inside > 1 && fw.images.size() > 1)
        throw std::runtime_error(
            "f_restricted: both forward images landed inside the domain "
            "(two-sidedness violated)");
    return best;
}

// The companion branch: the forward image f_restricted does not take. At the
// ramification input -2 both images coincide at 1, so the companion is 1.
inline SpherePoint f_tilde(const CorrContext& ctx, const SpherePoint& z) {
    const auto kept = f_restricted(ctx, z);
    if (!kept)
        throw std::domain_error("f_tilde: point escapes the restricted map");
    const WeightedImage fw = fa_forward(ctx, z);
    if (fw.images.size() == 1) return fw.images[0].first; // double point
    const double d0 = chordal_dist(fw.images[0].first, *kept);
    const double d1 = chordal_dist(fw.images[1].first, *kept);
    return d0 <= d1 ? fw.images[1].first : fw.images[0].first;
}

// Membership in the backward (minus) or forward (plus) limit set, decided by
// escape time: a point is out as soon as some iterate of the restricted map
// has no image left in the closed domain. The plus side reduces to the minus
// side through the involution, which swaps the two limit sets.
inline EscapeResult limit_membership(const CorrContext& ctx, const SpherePoint& z,
                                     LimitSide side, int n_max) {
    if (n_max < 1) throw std::invalid_argument("limit_membership: n_max >= 1");
    SpherePoint cur = side == LimitSide::plus ? mobius_apply(ctx.j_map, z) : z;
    EscapeResult res;
    res.last_point = cur;
    for (int k = 1; k <= n_max; ++k) {
        const auto next = f_restricted(ctx, cur);
        if (!next) {
            res.inside = false;
            res.escaped_step = k;
            res.last_point = cur;
            return res;
        }
        res.last_step_size = chordal_dist(*next, cur);
        cur = *next;
    }
    res.last_point = cur;
    return res;
}

} // namespace corrdyn
