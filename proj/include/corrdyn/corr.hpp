#pragma once
// The two-valued correspondence family and its branch evaluation.
//
// Fixed ingredients: Q(z) = z^3 - 3z, whose deleted covering relation
//   P(z, w) = z^2 + z w + w^2 - 3 = 0
// relates z to the other two solutions of Q(w) = Q(z); and the involution
//   J_a(z) = ((a+1) z - 2a) / (2 z - (a+1)),
// which fixes 1 and a. The forward correspondence is F_a = J_a after the
// covering relation, the backward one is the covering relation after J_a;
// both are 2-valued everywhere, counted with multiplicity.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "corrdyn/atoms.hpp"
#include "corrdyn/parallel.hpp"
#include "corrdyn/sphere.hpp"

namespace corrdyn {

// A fiber of the correspondence: either two simple points (principal branch
// first) or one double point. Total multiplicity is always exactly 2.
struct WeightedImage {
    std::vector<std::pair<SpherePoint, int>> images;

    int total_multiplicity() const {
        int m = 0;
        for (const auto& im : images) m += im.second;
        return m;
    }
};

enum class Direction { forward, backward };

inline const char* to_string(Direction d) {
    return d == Direction::forward ? "forward" : "backward";
}

// The circle bounding the involution's fundamental domain is centered at
// 1 + r on the real axis and passes through 1 and a; it exists when
// Re(a) > 1.
inline double klein_radius(const cplx& a) {
    if (!(a.real() > 1.0))
        throw std::domain_error("klein_radius: requires Re(a) > 1");
    return std::norm(a - 1.0) / (2.0 * (a.real() - 1.0));
}

struct CorrContext {
    cplx a;
    MobiusMap j_map;                    // the involution fixing 1 and a
    MobiusMap phi_map;                  // phi(w) = (a w + 1)/(w + 1)
    std::optional<double> klein_radius; // set when Re(a) > 1
    std::vector<SpherePoint> exceptional; // {-1, 2} exactly at a = 5
    bool has_critical_point = false;    // 2 lies inside the domain circle

    explicit CorrContext(const cplx& a_in)
        : a(a_in),
          j_map(a_in + 1.0, -2.0 * a_in, 2.0, -(a_in + 1.0)),
          phi_map(a_in, 1.0, 1.0, 1.0) {
        if (a == cplx(1.0))
            throw std::invalid_argument("CorrContext: parameter a = 1 is degenerate");
        if (a.real() > 1.0) {
            klein_radius = corrdyn::klein_radius(a);
            has_critical_point = *klein_radius > 0.5;
        }
        if (std::abs(a - cplx(5.0)) < 1e-12) {
            exceptional.push_back(SpherePoint(-1.0, 0.0));
            exceptional.push_back(SpherePoint(2.0, 0.0));
        }
    }
};

// The two solutions w of w^2 + z w + (z^2 - 3) = 0, principal branch first.
// One root is computed with the sign that avoids cancellation, the other via
// the product of roots, so accuracy survives near the ramification inputs
// z = +-2 where the discriminant 12 - 3 z^2 vanishes.
inline WeightedImage cov_images(const SpherePoint& z) {
    WeightedImage out;
    if (z.at_infinity) {
        out.images.emplace_back(SpherePoint::infinity(), 2);
        return out;
    }
    const cplx zv = z.value;
    const cplx disc = 12.0 - 3.0 * zv * zv;
    const double scale = std::max(1.0, std::norm(zv));
    if (std::abs(disc) < 1e-12 * scale) {
        out.images.emplace_back(SpherePoint::from_unchecked(-0.5 * zv), 2);
        return out;
    }
    const cplx sq = std::sqrt(disc);
    const bool add = std::real(std::conj(zv) * sq) >= 0.0;
    const cplx q = add ? -0.5 * (zv + sq) : -0.5 * (zv - sq);
    const cplx other = (zv * zv - 3.0) / q;
    // Label the branches: the principal one is (-z + sqrt(disc))/2.
    const cplx w_plus = add ? other : q;
    const cplx w_minus = add ? q : other;
    out.images.emplace_back(SpherePoint::from_unchecked(w_plus), 1);
    out.images.emplace_back(SpherePoint::from_unchecked(w_minus), 1);
    return out;
}

inline WeightedImage fa_forward(const CorrContext& ctx, const SpherePoint& z) {
    WeightedImage cov = cov_images(z);
    for (auto& im : cov.images) im.first = mobius_apply(ctx.j_map, im.first);
    return cov;
}

inline WeightedImage fa_backward(const CorrContext& ctx, const SpherePoint& z) {
    return cov_images(mobius_apply(ctx.j_map, z));
}

// Ramification data of the graph curve, in closed form. a1/a2 are the
// ramification points of the two projections as (z, w) pairs on the graph;
// b1/b2 are their critical values. Pole parameters (a = -5, 3, -3) send the
// affected entry to the point at infinity, which is a valid answer here.
struct CriticalData {
    std::vector<std::pair<SpherePoint, SpherePoint>> a1, a2;
    std::vector<SpherePoint> b1, b2;
};

namespace detail {
inline SpherePoint ratio_point(const cplx& num, const cplx& den) {
    if (den == cplx(0.0)) return SpherePoint::infinity();
    return SpherePoint::from_unchecked(num / den);
}
} // namespace detail

inline CriticalData critical_data(const CorrContext& ctx) {
    const cplx a = ctx.a;
    CriticalData cd;
    const SpherePoint half_a1 = SpherePoint::from_unchecked(0.5 * (a + 1.0));
    const SpherePoint v_ratio = detail::ratio_point(3.0 * a + 1.0, 3.0 + a);
    const SpherePoint v_fixed = detail::ratio_point(4.0 * a + 2.0, a + 5.0);
    const SpherePoint v_pole = detail::ratio_point(2.0, 3.0 - a);
    cd.a1 = {{SpherePoint::infinity(), half_a1},
             {SpherePoint(-2.0, 0.0), SpherePoint(1.0, 0.0)},
             {SpherePoint(2.0, 0.0), v_ratio}};
    cd.a2 = {{SpherePoint::infinity(), half_a1},
             {SpherePoint(1.0, 0.0), v_fixed},
             {SpherePoint(-1.0, 0.0), v_pole}};
    cd.b1 = {SpherePoint::infinity(), SpherePoint(-2.0, 0.0), SpherePoint(2.0, 0.0)};
    cd.b2 = {half_a1, v_fixed, v_pole};
    return cd;
}

// Weight bookkeeping for orbit trees: an exact dyadic rational num * 2^-exp.
// Depth is capped well below the point where the mass sum could lose bits.
struct DyadicWeight {
    std::uint64_t num = 1;
    int exp = 0;

    double to_double() const {
        return std::ldexp(static_cast<double>(num), -exp);
    }
};

inline constexpr int kOrbitDepthCap = 22;

// The normalized n-step image measure of the unit atom at z0: each step sends
// an atom of weight v to its branch images with weights v * (multiplicity/2).
// Expansion is level by level with order-preserving placement, which gives
// the depth-first leaf order (principal branch first); the per-level map may
// run on several threads without changing the output.
inline AtomicMeasure orbit_tree(const CorrContext& ctx, const SpherePoint& z0,
                                int n, Direction dir,
                                double coalesce_eps = 0.0,
                                int depth_cap = kOrbitDepthCap) {
    if (n < 0) throw std::invalid_argument("orbit_tree: negative depth");
    if (n > depth_cap)
        throw std::length_error(
            "orbit_tree: depth " + std::to_string(n) + " would allow 2^" +
            std::to_string(n) + " atoms, beyond the configured cap 2^" +
            std::to_string(depth_cap));

    std::vector<std::pair<SpherePoint, DyadicWeight>> level;
    level.emplace_back(z0, DyadicWeight{});
    std::vector<WeightedImage> images;
    for (int step = 0; step < n; ++step) {
        images.assign(level.size(), WeightedImage{});
        parallel_for(level.size(), [&](std::size_t i) {
            images[i] = dir == Direction::forward
                            ? fa_forward(ctx, level[i].first)
                            : fa_backward(ctx, level[i].first);
        });
        std::vector<std::pair<SpherePoint, DyadicWeight>> next;
        next.reserve(2 * level.size());
        for (std::size_t i = 0; i < level.size(); ++i) {
            const DyadicWeight w = level[i].second;
            for (const auto& im : images[i].images) {
                DyadicWeight cw = w;
                if (im.second == 1) cw.exp += 1; // halve; a double point keeps v
                next.emplace_back(im.first, cw);
            }
        }
        level = std::move(next);
    }

    // Exact mass audit: the numerators at common exponent must sum to 2^maxe.
    int maxe = 0;
    for (const auto& at : level) maxe = std::max(maxe, at.second.exp);
    unsigned long long total = 0;
    for (const auto& at : level)
        total += at.second.num << (maxe - at.second.exp);
    if (total != (1ull << maxe))
        throw std::runtime_error("orbit_tree: dyadic mass bookkeeping broke");

    AtomicMeasure mu;
    mu.atoms.reserve(level.size());
    for (const auto& at : level)
        mu.atoms.emplace_back(at.first, at.second.to_double());
    if (coalesce_eps > 0.0) mu = coalesce(mu, coalesce_eps);
    return mu;
}

// Residual of the covering relation in the conjugating chart: with
// X = (a z + 1)/(z + 1) and Y = (a w - 1)/(w - 1), a pair (z, w) belongs to
// the chart-transported correspondence exactly when X^2 + X Y + Y^2 = 3.
// Returns |X^2 + X Y + Y^2 - 3| / scale for use as a relative residual.
inline double chart_relation_residual(const CorrContext& ctx, const cplx& z,
                                      const cplx& w) {
    const cplx x = (ctx.a * z + 1.0) / (z + 1.0);
    const cplx y = (ctx.a * w - 1.0) / (w - 1.0);
    const cplx val = x * x + x * y + y * y - 3.0;
    const double scale = std::max({std::abs(x * x), std::abs(x * y),
                                   std::abs(y * y), 3.0});
    return std::abs(val) / scale;
}

} // namespace corrdyn
