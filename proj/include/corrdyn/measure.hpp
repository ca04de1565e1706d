#pragma once
// Measure transport along the correspondence and kernel-feature comparison.
//
// Transport pushes every atom through the two-valued branch map and splits
// its weight dyadically (each branch carries multiplicity/2), so iterating
// from a Dirac mass reproduces the normalized image measures without any
// rounding drift. Kernel features turn a measure into a fixed-length vector
// of Gaussian test-function integrals; the max-norm gap between two such
// vectors is the discrepancy used by the equidistribution experiments.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "corrdyn/atoms.hpp"
#include "corrdyn/corr.hpp"
#include "corrdyn/parallel.hpp"
#include "corrdyn/periodic.hpp"
#include "corrdyn/sphere.hpp"

namespace corrdyn {

// Hard ceiling on atom counts inside transport. One step at most doubles the
// list, so the check runs against the projected size before expanding.
inline constexpr std::size_t kAtomCap = std::size_t(1) << 22;

// Automatic coalescing policy: exact bookkeeping while the list is small,
// gentle merging once it would start to strain memory and runtime.
inline double default_coalesce_eps(std::size_t atom_count) {
    return atom_count < (std::size_t(1) << 16) ? 0.0 : 1e-10;
}

// Sentinel for "apply the automatic policy each step".
inline constexpr double kAutoCoalesce = -1.0;

// n-step push-forward (or pull-back) of an atomic measure. Each atom maps to
// the branch images of its location, child weight = parent weight times
// multiplicity/2. With coalesce_eps == 0 the bookkeeping is exact; a positive
// eps merges nearby atoms after every step; kAutoCoalesce switches merging on
// only above 2^16 atoms.
inline AtomicMeasure transport(const CorrContext& ctx, const AtomicMeasure& mu,
                               int steps, Direction dir,
                               double coalesce_eps = kAutoCoalesce) {
    if (steps < 0)
        throw std::invalid_argument("transport: steps must be nonnegative");
    AtomicMeasure cur = mu;
    for (int s = 0; s < steps; ++s) {
        if (cur.atoms.size() > kAtomCap / 2)
            throw std::length_error(
                "transport: atom count would exceed 2^22; rerun with a "
                "positive coalesce_eps to bound the growth");
        std::vector<std::pair<SpherePoint, double>> next(
            cur.atoms.size() * 2, {SpherePoint(), 0.0});
        parallel_for(cur.atoms.size(), [&](std::size_t i) {
            const auto& [p, w] = cur.atoms[i];
            const WeightedImage im = (dir == Direction::forward)
                                         ? fa_forward(ctx, p)
                                         : fa_backward(ctx, p);
            std::size_t k = 2 * i;
            for (const auto& [q, m] : im.images)
                next[k++] = {q, w * (0.5 * m)};
        });
        cur.atoms = std::move(next);
        cur.compact();
        const double eps = (coalesce_eps == kAutoCoalesce)
                               ? default_coalesce_eps(cur.atoms.size())
                               : coalesce_eps;
        if (eps > 0.0) cur = coalesce(cur, eps);
    }
    return cur;
}

// A measure reduced to Gaussian kernel integrals against a center set. Two
// vectors are comparable only when their descriptors match; the descriptor
// encodes the center count, the bandwidth, and a coordinate checksum.
struct FeatureVector {
    std::vector<double> values;
    std::string descriptor;
};

inline constexpr double kDefaultBandwidth = 0.15;

// 256 points of a Fibonacci lattice on the unit sphere, projected to the
// plane. Deterministic and well spread at the scale of the limit sets.
inline const std::vector<SpherePoint>& default_centers() {
    static const std::vector<SpherePoint> centers = [] {
        std::vector<SpherePoint> out;
        const int n = 256;
        out.reserve(n);
        const double golden_angle = kPi * (3.0 - std::sqrt(5.0));
        for (int i = 0; i < n; ++i) {
            const double h = 1.0 - 2.0 * (i + 0.5) / n;
            const double r = std::sqrt(std::max(0.0, 1.0 - h * h));
            const double th = golden_angle * i;
            out.push_back(stereographic(r * std::cos(th), r * std::sin(th), h));
        }
        return out;
    }();
    return centers;
}

namespace detail {

inline std::string center_descriptor(const std::vector<SpherePoint>& centers,
                                     double bandwidth) {
    double sig = 0.0;
    for (std::size_t i = 0; i < centers.size(); ++i) {
        const auto& c = centers[i];
        const double re = c.at_infinity ? 3.0 : c.value.real();
        const double im = c.at_infinity ? 7.0 : c.value.imag();
        sig += std::fmod((i + 1.0) * (re + 0.6180339887498949 * im), 997.0);
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "n=%zu;bw=%.17g;sig=%.12g", centers.size(),
                  bandwidth, sig);
    return buf;
}

// Fixed-order pairwise summation so the result is independent of the thread
// count (each center's total is assembled by exactly one worker).
inline double kernel_sum(const std::vector<std::pair<SpherePoint, double>>& atoms,
                         const SpherePoint& center, double bandwidth,
                         std::size_t lo, std::size_t hi) {
    if (hi - lo <= 64) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            const double d = chordal_dist(atoms[i].first, center) / bandwidth;
            s += atoms[i].second * std::exp(-d * d);
        }
        return s;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    return kernel_sum(atoms, center, bandwidth, lo, mid) +
           kernel_sum(atoms, center, bandwidth, mid, hi);
}

} // namespace detail

inline FeatureVector kernel_features(
    const AtomicMeasure& mu,
    const std::vector<SpherePoint>& centers = default_centers(),
    double bandwidth = kDefaultBandwidth) {
    if (centers.empty())
        throw std::invalid_argument("kernel_features: centers must be nonempty");
    if (!(bandwidth > 0.0))
        throw std::invalid_argument("kernel_features: bandwidth must be positive");
    FeatureVector f;
    f.values.assign(centers.size(), 0.0);
    f.descriptor = detail::center_descriptor(centers, bandwidth);
    parallel_for(centers.size(), [&](std::size_t j) {
        f.values[j] =
            detail::kernel_sum(mu.atoms, centers[j], bandwidth, 0, mu.atoms.size());
    });
    return f;
}

// Max-norm gap of two feature vectors, normalized by mass_scale.
inline double feature_discrepancy(const FeatureVector& f, const FeatureVector& g,
                                  double mass_scale) {
    if (f.descriptor != g.descriptor || f.values.size() != g.values.size())
        throw std::invalid_argument(
            "feature_discrepancy: vectors built with different centers or "
            "bandwidth are not comparable");
    double worst = 0.0;
    for (std::size_t j = 0; j < f.values.size(); ++j)
        worst = std::max(worst, std::abs(f.values[j] - g.values[j]));
    return mass_scale > 0.0 ? worst / mass_scale : worst;
}

inline double discrepancy(const AtomicMeasure& mu, const AtomicMeasure& nu,
                          const std::vector<SpherePoint>& centers = default_centers(),
                          double bandwidth = kDefaultBandwidth) {
    const FeatureVector f = kernel_features(mu, centers, bandwidth);
    const FeatureVector g = kernel_features(nu, centers, bandwidth);
    return feature_discrepancy(f, g, std::max(mu.mass(), nu.mass()));
}

// How far a normalized measure is from being preserved by one transport step.
inline double invariance_residual(const CorrContext& ctx, const AtomicMeasure& mu,
                                  Direction dir) {
    return discrepancy(transport(ctx, mu, 1, dir, 0.0), mu);
}

enum class Weighting { counting, multiplicity };

inline const char* to_string(Weighting w) {
    return w == Weighting::counting ? "counting" : "multiplicity";
}

// The two normalized measures supported on a verified periodic-point report:
// equal weights over the distinct points, or weights proportional to the
// diagonal multiplicities (which must total 2^(n+1)).
inline AtomicMeasure periodic_measure(const PeriodicReport& report,
                                      Weighting weighting) {
    if (report.points.empty())
        throw std::invalid_argument("periodic_measure: empty report");
    for (const auto& p : report.points)
        if (!p.verified)
            throw std::invalid_argument(
                "periodic_measure: report contains unverified points");
    AtomicMeasure mu;
    mu.atoms.reserve(report.points.size());
    if (weighting == Weighting::counting) {
        const std::size_t count = report.points.size();
        const double w = 1.0 / static_cast<double>(count);
        double running = 0.0;
        for (std::size_t i = 0; i + 1 < count; ++i) {
            mu.atoms.emplace_back(report.points[i].point, w);
            running += w;
        }
        // The last weight absorbs the rounding of 1/count so the measure
        // sums to exactly 1 in the stored atom order.
        mu.atoms.emplace_back(report.points.back().point, 1.0 - running);
    } else {
        const int expected = 1 << (report.n + 1);
        if (report.total_multiplicity != expected)
            throw std::invalid_argument(
                "periodic_measure: verified multiplicities total " +
                std::to_string(report.total_multiplicity) + ", expected " +
                std::to_string(expected));
        const double denom = static_cast<double>(expected);
        for (const auto& p : report.points)
            mu.atoms.emplace_back(p.point, p.multiplicity / denom);
    }
    return mu;
}

// Equal-weight mixture of two measures (used to compare periodic-point
// measures against the average of the two empirical limit measures).
inline AtomicMeasure mixed(const AtomicMeasure& mu, const AtomicMeasure& nu) {
    AtomicMeasure out;
    out.atoms.reserve(mu.atoms.size() + nu.atoms.size());
    for (const auto& a : mu.atoms) out.atoms.emplace_back(a.first, 0.5 * a.second);
    for (const auto& a : nu.atoms) out.atoms.emplace_back(a.first, 0.5 * a.second);
    return out;
}

} // namespace corrdyn
