#pragma once
// Finite atomic measures on the extended plane: the common currency between
// the orbit trees, the transport operators, and the renderer.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <stdexcept>
#include <utility>
#include <vector>

#include "corrdyn/sphere.hpp"

namespace corrdyn {

struct AtomicMeasure {
    // (location, nonnegative weight); order is meaningful and deterministic.
    std::vector<std::pair<SpherePoint, double>> atoms;

    double mass() const {
        double m = 0.0;
        for (const auto& a : atoms) m += a.second;
        return m;
    }

    // Drop exact-zero weights (coalescing can produce them transiently).
    void compact() {
        std::erase_if(atoms, [](const auto& a) { return a.second == 0.0; });
    }

    static AtomicMeasure dirac(const SpherePoint& p, double w = 1.0) {
        AtomicMeasure mu;
        mu.atoms.emplace_back(p, w);
        return mu;
    }
};

namespace detail {
// Embedding with chordal distance = Euclidean distance in R^3 (sphere of
// radius 1, scaled by 2 to match the metric normalization).
struct Embedded3 {
    double x, y, h;
};
inline Embedded3 embed(const SpherePoint& p) {
    if (p.at_infinity) return {0.0, 0.0, 2.0};
    const double a = std::abs(p.value);
    const double den = 1.0 + a * a;
    return {2.0 * p.value.real() / den, 2.0 * p.value.imag() / den,
            2.0 * a * a / den};
}
inline double dist3(const Embedded3& u, const Embedded3& v) {
    return std::sqrt((u.x - v.x) * (u.x - v.x) + (u.y - v.y) * (u.y - v.y) +
                     (u.h - v.h) * (u.h - v.h));
}
} // namespace detail

// Merge atoms lying within chordal eps of one another. Finite clusters are
// replaced by their weight-sum at the weighted centroid in the plane;
// atoms at infinity merge only with each other. The sweep runs over a fixed
// sort order, so the result is deterministic.
inline AtomicMeasure coalesce(const AtomicMeasure& mu, double eps) {
    if (eps <= 0.0 || mu.atoms.size() < 2) return mu;

    struct Entry {
        detail::Embedded3 e;
        std::size_t idx;
    };
    std::vector<Entry> order;
    order.reserve(mu.atoms.size());
    double inf_weight = 0.0;
    bool has_inf = false;
    for (std::size_t i = 0; i < mu.atoms.size(); ++i) {
        if (mu.atoms[i].first.at_infinity) {
            inf_weight += mu.atoms[i].second;
            has_inf = true;
        } else {
            order.push_back({detail::embed(mu.atoms[i].first), i});
        }
    }
    std::sort(order.begin(), order.end(), [](const Entry& a, const Entry& b) {
        if (a.e.x != b.e.x) return a.e.x < b.e.x;
        if (a.e.y != b.e.y) return a.e.y < b.e.y;
        if (a.e.h != b.e.h) return a.e.h < b.e.h;
        return a.idx < b.idx;
    });

    struct Cluster {
        cplx centroid;           // weighted, in the finite chart
        double weight;
        detail::Embedded3 rep;   // embedding of the current centroid
    };
    std::vector<Cluster> clusters;
    // Active window: clusters whose representative may still be within eps
    // in the x-coordinate of the embedding.
    std::deque<std::size_t> active;

    for (const Entry& ent : order) {
        // Centroid updates can drag a representative backward by up to eps,
        // so the retirement window is widened accordingly.
        while (!active.empty() &&
               clusters[active.front()].rep.x < ent.e.x - 3.0 * eps)
            active.pop_front();
        const auto& atom = mu.atoms[ent.idx];
        bool merged = false;
        for (std::size_t ci : active) {
            if (detail::dist3(ent.e, clusters[ci].rep) <= eps) {
                Cluster& c = clusters[ci];
                const double wsum = c.weight + atom.second;
                if (wsum > 0.0)
                    c.centroid = (c.centroid * c.weight +
                                  atom.first.value * atom.second) / wsum;
                c.weight = wsum;
                c.rep = detail::embed(SpherePoint::from_unchecked(c.centroid));
                merged = true;
                break;
            }
        }
        if (!merged) {
            clusters.push_back({atom.first.value, atom.second, ent.e});
            active.push_back(clusters.size() - 1);
        }
    }

    AtomicMeasure out;
    out.atoms.reserve(clusters.size() + (has_inf ? 1 : 0));
    for (const Cluster& c : clusters)
        out.atoms.emplace_back(SpherePoint::from_unchecked(c.centroid), c.weight);
    if (has_inf) out.atoms.emplace_back(SpherePoint::infinity(), inf_weight);
    out.compact();
    return out;
}

} // namespace corrdyn
