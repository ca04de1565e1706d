#pragma once
// Periodic points of the iterated correspondence, found two independent
// ways: roots of the diagonal of the iterated-graph polynomial (resultant
// chain), and branch-word Newton search from a seed grid. Both funnel into
// the same finishing pipeline: dynamical polish, orbit verification,
// dedup, orbit and symmetry completion, local multiplicity estimation, and
// limit-set side classification. Also hosts the parabolic germ data at the
// common fixed point, the superstable parameter search, and a numeric
// cross-check of the forward critical values.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "corrdyn/corr.hpp"
#include "corrdyn/klein.hpp"
#include "corrdyn/polyalg.hpp"

namespace corrdyn {

// Defining polynomial of the relation graph: vanishes exactly when w is a
// forward image of z. Bidegree (2, 2); the coefficient table comes from
// clearing the involution's denominator out of the covering equation.
inline BiPoly graph_polynomial(const CorrContext& ctx) {
    const cplx a = ctx.a;
    const cplx A = a + 1.0;
    BiPoly g = BiPoly::zero(2, 2);
    g.c[2][0] = A * A;
    g.c[2][1] = -4.0 * A;
    g.c[2][2] = cplx(4.0);
    g.c[1][0] = 2.0 * a * A;
    g.c[1][1] = -4.0 * a - A * A;
    g.c[1][2] = 2.0 * A;
    g.c[0][0] = 4.0 * a * a - 3.0 * A * A;
    g.c[0][1] = 12.0 * A - 4.0 * a * A;
    g.c[0][2] = A * A - 12.0;
    return g;
}

// All 2^n branch orbits of length n+1 starting at z, in fixed order: the
// "+" branch expands before the "-" branch at every level, and a double
// image occupies both slots.
inline std::vector<std::vector<SpherePoint>> branch_orbits(
    const CorrContext& ctx, const SpherePoint& z, int n,
    Direction dir = Direction::forward) {
    if (n < 0 || n > 12)
        throw std::invalid_argument("branch_orbits: n must be in [0, 12]");
    std::vector<std::vector<SpherePoint>> cur{{z}};
    for (int s = 0; s < n; ++s) {
        std::vector<std::vector<SpherePoint>> next;
        next.reserve(cur.size() * 2);
        for (const auto& orb : cur) {
            const WeightedImage im = dir == Direction::forward
                                         ? fa_forward(ctx, orb.back())
                                         : fa_backward(ctx, orb.back());
            for (const auto& [pt, mult] : im.images)
                for (int c = 0; c < mult; ++c) {
                    next.push_back(orb);
                    next.back().push_back(pt);
                }
        }
        cur = std::move(next);
    }
    return cur;
}

// Endpoints only, same order as branch_orbits.
inline std::vector<SpherePoint> branch_endpoints(const CorrContext& ctx,
                                                 const SpherePoint& z, int n,
                                                 Direction dir = Direction::forward) {
    if (n < 0 || n > 12)
        throw std::invalid_argument("branch_endpoints: n must be in [0, 12]");
    std::vector<SpherePoint> cur{z};
    for (int s = 0; s < n; ++s) {
        std::vector<SpherePoint> next;
        next.reserve(cur.size() * 2);
        for (const auto& p : cur) {
            const WeightedImage im = dir == Direction::forward
                                         ? fa_forward(ctx, p)
                                         : fa_backward(ctx, p);
            for (const auto& [pt, mult] : im.images)
                for (int c = 0; c < mult; ++c) next.push_back(pt);
        }
        cur = std::move(next);
    }
    return cur;
}

// How far z is from returning to itself in n steps along the best branch
// word; this is the verification metric for periodic candidates.
inline double return_residual(const CorrContext& ctx, const SpherePoint& z, int n) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : branch_endpoints(ctx, z, n))
        best = std::min(best, chordal_dist(e, z));
    return best;
}

// n-fold composed graph: the resultant chain eliminates the intermediate
// variable one step at a time. The result is validated against 50 randomly
// sampled branch orbits before it is returned; coefficient noise from the
// chain would show up there immediately.
inline BiPoly graph_iterate(const CorrContext& ctx, int n) {
    if (n < 1 || n > 5)
        throw std::invalid_argument(
            "graph_iterate: n must be in [1, 5]; beyond bidegree 32 the "
            "interpolated chain is not trustworthy");
    const BiPoly g = graph_polynomial(ctx);
    BiPoly acc = g;
    for (int k = 2; k <= n; ++k) acc = resultant_x(acc, g);

    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL ^ static_cast<unsigned>(n));
    std::uniform_real_distribution<double> uang(0.0, 2.0 * kPi);
    std::uniform_real_distribution<double> urad(0.8, 1.6);
    double worst = 0.0;
    int done = 0, guard = 0;
    while (done < 50 && guard++ < 500) {
        const double ang = uang(rng);
        const cplx z0 = urad(rng) * cplx(std::cos(ang), std::sin(ang));
        SpherePoint w = SpherePoint::from_unchecked(z0);
        bool bad = false;
        for (int s = 0; s < n; ++s) {
            const WeightedImage im = fa_forward(ctx, w);
            const std::size_t pick = rng() % im.images.size();
            w = im.images[pick].first;
            if (!w.is_finite() || std::abs(w.value) > 1e6) {
                bad = true;
                break;
            }
        }
        if (bad) continue;
        const double res = std::abs(acc.eval(z0, w.value)) /
                           acc.eval_scale(z0, w.value);
        worst = std::max(worst, res);
        ++done;
    }
    if (done < 50 || worst > 1e-6)
        throw std::runtime_error(
            "graph_iterate: composed graph failed on-orbit validation "
            "(worst relative residual " +
            std::to_string(worst) + ")");
    return acc;
}

namespace detail {

inline double orbit_gap(const std::vector<SpherePoint>& o1,
                        const std::vector<SpherePoint>& o2) {
    double d = 0.0;
    const std::size_t m = std::min(o1.size(), o2.size());
    for (std::size_t k = 0; k < m; ++k)
        d = std::max(d, chordal_dist(o1[k], o2[k]));
    return d;
}

// Sheet whose whole orbit stays closest to the reference orbit. Branch
// labels are not continuous across the discriminant locus, so tracking a
// sheet through a Newton step has to go by proximity, not by word.
inline std::size_t continuity_sheet(const std::vector<std::vector<SpherePoint>>& fam,
                                    const std::vector<SpherePoint>& ref) {
    std::size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < fam.size(); ++i) {
        const double d = orbit_gap(fam[i], ref);
        if (d < bd) {
            bd = d;
            best = i;
        }
    }
    return best;
}

inline std::size_t returning_sheet(const std::vector<std::vector<SpherePoint>>& fam,
                                   const SpherePoint& z) {
    std::size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < fam.size(); ++i) {
        const double d = chordal_dist(fam[i].back(), z);
        if (d < bd) {
            bd = d;
            best = i;
        }
    }
    return best;
}

// Orbit along one branch word, decoded bit by bit (bit k picks the image at
// step k; a double image occupies both slots).
inline std::vector<SpherePoint> orbit_by_word(const CorrContext& ctx,
                                              const SpherePoint& z, int n,
                                              int word) {
    std::vector<SpherePoint> orb{z};
    orb.reserve(n + 1);
    for (int k = 0; k < n; ++k) {
        const WeightedImage im = fa_forward(ctx, orb.back());
        std::size_t pick = static_cast<std::size_t>((word >> k) & 1);
        if (pick >= im.images.size()) pick = im.images.size() - 1;
        orb.push_back(im.images[pick].first);
    }
    return orb;
}

// Re-evaluate an orbit at a nearby start point, choosing at every step the
// image closest to the reference orbit. This is how a branch word is carried
// across a Newton step without fixed +/- labels, which are not continuous
// across the discriminant locus.
inline std::vector<SpherePoint> orbit_by_continuity(
    const CorrContext& ctx, const SpherePoint& z,
    const std::vector<SpherePoint>& ref) {
    std::vector<SpherePoint> orb{z};
    orb.reserve(ref.size());
    for (std::size_t k = 1; k < ref.size(); ++k) {
        const WeightedImage im = fa_forward(ctx, orb.back());
        std::size_t pick = 0;
        double bd = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < im.images.size(); ++i) {
            const double d = chordal_dist(im.images[i].first, ref[k]);
            if (d < bd) {
                bd = d;
                pick = i;
            }
        }
        orb.push_back(im.images[pick].first);
    }
    return orb;
}

// Damped Newton on g(z) = (endpoint of one fixed branch word) - z, from one
// seed. Appends the solution to hits when it converges inside the search
// region.
inline void newton_from_seed(const CorrContext& ctx, int n, int word,
                             const cplx& seed, std::vector<cplx>& hits) {
    cplx z = seed;
    std::vector<SpherePoint> ref =
        orbit_by_word(ctx, SpherePoint::from_unchecked(z), n, word);
    for (int iter = 0; iter < 30; ++iter) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) ||
            std::abs(z) > 50.0)
            return;
        if (!ref.back().is_finite()) return;
        const cplx g = ref.back().value - z;
        if (std::abs(g) > 1e3) return;
        if (std::abs(g) < 1e-11 * (1.0 + std::abs(z))) {
            for (const auto& h : hits)
                if (std::abs(h - z) <= 1e-6 * (1.0 + std::abs(z))) return;
            hits.push_back(z);
            return;
        }
        const double h = 1e-7 * (1.0 + std::abs(z));
        const auto orbh =
            orbit_by_continuity(ctx, SpherePoint::from_unchecked(z + h), ref);
        if (!orbh.back().is_finite()) return;
        const cplx deriv = (orbh.back().value - (z + h) - g) / h;
        if (std::abs(deriv) < 1e-14) return;
        const cplx step = -g / deriv;
        double t = 1.0;
        bool accepted = false;
        for (int halving = 0; halving < 12; ++halving, t *= 0.5) {
            const cplx zt = z + t * step;
            const auto orbt =
                orbit_by_continuity(ctx, SpherePoint::from_unchecked(zt), ref);
            if (!orbt.back().is_finite()) continue;
            if (std::abs(orbt.back().value - zt) < (1.0 - 0.25 * t) * std::abs(g)) {
                z = zt;
                ref = orbt;
                accepted = true;
                break;
            }
        }
        if (!accepted) return;
    }
}

// The grid search: every branch word is swept independently over the seed
// grid, which is what makes this path complete without any algebra. Words
// whose zero sets overlap (periods dividing n) just land on the same points.
inline std::vector<cplx> newton_word_search(const CorrContext& ctx, int n) {
    std::vector<cplx> hits;
    const int words = 1 << n;
    for (int word = 0; word < words; ++word)
        for (int gi = 0; gi < 30; ++gi)
            for (int gj = 0; gj < 30; ++gj)
                newton_from_seed(ctx, n, word,
                                 cplx(-4.0 + 10.0 * (gi + 0.5) / 30.0,
                                      -5.0 + 10.0 * (gj + 0.5) / 30.0),
                                 hits);
    return hits;
}

} // namespace detail

struct PolishResult {
    cplx z{};
    double residual = std::numeric_limits<double>::infinity(); // chordal
    bool usable = false;
};

// Damped Newton on g(z) = (best returning branch endpoint) - z. The sheet is
// re-selected at every iterate by the smallest return distance, and the
// finite-difference probe follows the same sheet by orbit continuity, so the
// method survives crossing branch cuts. Returns the best point seen by the
// verification metric, converged or not.
inline PolishResult polish_candidate(const CorrContext& ctx, const cplx& z0, int n) {
    PolishResult out;
    cplx z = z0;
    for (int iter = 0; iter < 60; ++iter) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) ||
            std::abs(z) > 50.0)
            break;
        const SpherePoint zp = SpherePoint::from_unchecked(z);
        const auto fam = branch_orbits(ctx, zp, n);
        const auto& ref = fam[detail::returning_sheet(fam, zp)];
        double vres = std::numeric_limits<double>::infinity();
        for (const auto& orb : fam)
            vres = std::min(vres, chordal_dist(orb.back(), zp));
        if (vres < out.residual) {
            out.residual = vres;
            out.z = z;
            out.usable = true;
        }
        const SpherePoint end = ref.back();
        if (!end.is_finite()) break; // cannot refine through infinity
        const cplx g = end.value - z;
        if (std::abs(g) < 1e-13 * (1.0 + std::abs(z))) break;

        const double h = 1e-7 * (1.0 + std::abs(z));
        const auto famh = branch_orbits(ctx, SpherePoint::from_unchecked(z + h), n);
        const auto& orbh = famh[detail::continuity_sheet(famh, ref)];
        if (!orbh.back().is_finite()) break;
        const cplx deriv = (orbh.back().value - (z + h) - g) / h;
        if (std::abs(deriv) < 1e-14) break;
        const cplx step = -g / deriv;

        double t = 1.0;
        bool accepted = false;
        for (int halving = 0; halving < 40; ++halving, t *= 0.5) {
            const cplx zt = z + t * step;
            const auto famt =
                branch_orbits(ctx, SpherePoint::from_unchecked(zt), n);
            const auto& orbt = famt[detail::continuity_sheet(famt, ref)];
            if (!orbt.back().is_finite()) continue;
            if (std::abs(orbt.back().value - zt) < (1.0 - 0.25 * t) * std::abs(g)) {
                z = zt;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }
    return out;
}

// Order of vanishing of B(z) = prod over branch words (endpoint - z) at a
// periodic point, read off as the log-log slope of |B| between two probe
// radii. The composed-graph diagonal factors as a unit times B near any of
// its roots, so this recovers the diagonal root multiplicity without ever
// expanding the diagonal polynomial. Probe radii adapt to the gap to the
// nearest other periodic point so clustered simple roots do not blur
// together.
inline int local_multiplicity(const CorrContext& ctx, const cplx& z, int n,
                              double gap) {
    const auto log_abs_b = [&](const cplx& x) {
        double s = 0.0;
        for (const auto& e :
             branch_endpoints(ctx, SpherePoint::from_unchecked(x), n))
            if (e.is_finite()) s += std::log(std::abs(e.value - x));
        return s;
    };
    const double h1 = std::clamp(gap / 30.0, 1e-5, 1e-2);
    const double h2 = h1 / 10.0;
    std::vector<double> slopes;
    slopes.reserve(5);
    for (int k = 0; k < 5; ++k) {
        const double ang = 2.0 * kPi * (k + 0.3) / 5.0;
        const cplx dir(std::cos(ang), std::sin(ang));
        slopes.push_back((log_abs_b(z + h1 * dir) - log_abs_b(z + h2 * dir)) /
                         std::log(10.0));
    }
    std::sort(slopes.begin(), slopes.end());
    const double med = slopes[2];
    const int cap = 1 << (n + 1);
    return std::clamp(static_cast<int>(std::lround(med)), 1, cap);
}

enum class Side { minus, plus, fixed1 };

inline const char* to_string(Side s) {
    switch (s) {
        case Side::minus: return "minus";
        case Side::plus: return "plus";
        default: return "fixed1";
    }
}

// Which limit set a verified periodic point belongs to. Near-unit points get
// the shared-boundary label. Otherwise the point is tested as a fixed point
// of the n-fold restricted map (directly for the minus side, through the
// involution for the plus side); that test tolerates the small polish error
// where long escape-time iteration would amplify it along the repelling
// cycle. Escape time remains as the fallback for whatever is left.
inline Side classify_side(const CorrContext& ctx, const SpherePoint& z, int n) {
    if (chordal_dist(z, SpherePoint(1.0, 0.0)) < 1e-6) return Side::fixed1;
    const auto restricted_fixed = [&](const SpherePoint& w) {
        SpherePoint cur = w;
        for (int s = 0; s < n; ++s) {
            std::optional<SpherePoint> nx;
            try {
                nx = f_restricted(ctx, cur);
            } catch (const std::exception&) {
                return false;
            }
            if (!nx) return false;
            cur = *nx;
        }
        return chordal_dist(cur, w) < 1e-5;
    };
    if (restricted_fixed(z)) return Side::minus;
    if (restricted_fixed(mobius_apply(ctx.j_map, z))) return Side::plus;
    const auto membership = [&](LimitSide s) {
        try {
            return limit_membership(ctx, z, s, 200);
        } catch (const std::exception&) {
            EscapeResult r;
            r.inside = false;
            r.escaped_step = 0;
            return r;
        }
    };
    const EscapeResult em = membership(LimitSide::minus);
    if (em.inside) return Side::minus;
    const EscapeResult ep = membership(LimitSide::plus);
    if (ep.inside) return Side::plus;
    return em.escaped_step >= ep.escaped_step ? Side::minus : Side::plus;
}

enum class PeriodicMethod { resultant, newton, both };

inline const char* to_string(PeriodicMethod m) {
    switch (m) {
        case PeriodicMethod::resultant: return "resultant";
        case PeriodicMethod::newton: return "newton";
        default: return "both";
    }
}

struct PeriodicPoint {
    SpherePoint point;
    int multiplicity = 1;
    Side side = Side::minus;
    bool verified = false;
    double residual = 0.0; // best chordal return distance
};

struct PeriodicReport {
    int n = 1;
    PeriodicMethod method = PeriodicMethod::resultant;
    std::vector<PeriodicPoint> points;
    int total_multiplicity = 0; // verified points, with multiplicity
    int count_distinct = 0;     // verified points
};

namespace detail {

// Polish a candidate and merge it into the running list, keeping the better
// residual when two candidates land on the same point.
inline void consider_candidate(const CorrContext& ctx, int n, const cplx& cand,
                               std::vector<std::pair<cplx, double>>& pts) {
    const PolishResult pr = polish_candidate(ctx, cand, n);
    if (!pr.usable || pr.residual > 1e-4) return;
    for (auto& [p, r] : pts) {
        const double tol = 1e-6 * (1.0 + std::max(std::abs(p), std::abs(pr.z)));
        if (std::abs(p - pr.z) <= tol) {
            if (pr.residual < r) {
                p = pr.z;
                r = pr.residual;
            }
            return;
        }
    }
    pts.emplace_back(pr.z, pr.residual);
}

// Shared finishing for both search paths: polish everything, then grow the
// set through returning-orbit points and involution images until closed
// (verified periodic orbits are permuted by both operations).
inline std::vector<std::pair<cplx, double>> finish_candidates(
    const CorrContext& ctx, int n, const std::vector<cplx>& candidates) {
    std::vector<std::pair<cplx, double>> pts;
    for (const auto& c : candidates) consider_candidate(ctx, n, c, pts);
    for (int round = 0; round < 4; ++round) {
        const std::size_t before = pts.size();
        std::vector<cplx> extra;
        for (const auto& [p, r] : pts) {
            if (r > 1e-6) continue;
            const SpherePoint sp = SpherePoint::from_unchecked(p);
            const auto fam = branch_orbits(ctx, sp, n);
            const auto& orb = fam[returning_sheet(fam, sp)];
            for (std::size_t k = 1; k + 1 < orb.size(); ++k)
                if (orb[k].is_finite()) extra.push_back(orb[k].value);
            const SpherePoint jp = mobius_apply(ctx.j_map, sp);
            if (jp.is_finite()) extra.push_back(jp.value);
        }
        for (const auto& c : extra) consider_candidate(ctx, n, c, pts);
        if (pts.size() == before) break;
    }
    return pts;
}

// Merge points that branch evaluation cannot tell apart. Around a flat
// parabolic germ (quadratic coefficient zero, so the germ is tangent to the
// identity to high order) the return residual sits at rounding level on a
// whole basin, and candidate scatter inside it carries no information. Two
// points are merged when probes a fraction of their separation away from
// both still show rounding-level residuals. The member with the smallest
// residual represents its cluster; the exact fixed point 1 is always among
// the candidates, so a basin around it collapses to 1 itself.
inline void merge_indistinguishable(const CorrContext& ctx, int n,
                                    std::vector<std::pair<cplx, double>>& pts) {
    const std::size_t m = pts.size();
    if (m < 2) return;
    std::vector<std::size_t> parent(m);
    for (std::size_t i = 0; i < m; ++i) parent[i] = i;
    std::function<std::size_t(std::size_t)> find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    const auto flat_around = [&](const cplx& base, double d) {
        for (int k = 0; k < 3; ++k) {
            const double ang = 2.0 * kPi * k / 3.0 + 0.7;
            const cplx probe = base + 0.3 * d * cplx(std::cos(ang), std::sin(ang));
            if (return_residual(ctx, SpherePoint::from_unchecked(probe), n) > 3e-11)
                return false;
        }
        return true;
    };
    for (std::size_t i = 0; i < m; ++i) {
        if (pts[i].second > 1e-6) continue;
        for (std::size_t j = i + 1; j < m; ++j) {
            if (pts[j].second > 1e-6) continue;
            const double d = std::abs(pts[i].first - pts[j].first);
            if (d > 5e-3 * (1.0 + std::abs(pts[i].first))) continue;
            if (find(i) == find(j)) continue;
            if (flat_around(pts[i].first, d) && flat_around(pts[j].first, d))
                parent[find(i)] = find(j);
        }
    }
    std::vector<std::pair<cplx, double>> merged;
    std::vector<bool> taken(m, false);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t r = find(i);
        if (taken[r]) continue;
        taken[r] = true;
        std::size_t best = i;
        for (std::size_t j = 0; j < m; ++j)
            if (find(j) == r && pts[j].second < pts[best].second) best = j;
        merged.push_back(pts[best]);
    }
    pts = std::move(merged);
}

} // namespace detail

// The full periodic-point pipeline for period n. The resultant path takes
// the diagonal of the composed graph and solves it; the newton path sweeps a
// 30x30 seed grid on [-4,6]x[-5,5] through the branch-word Newton solver.
// Running both cross-validates the two candidate sets against each other
// before finishing. Points that fail orbit verification stay in the report
// flagged unverified and are excluded from the totals.
inline PeriodicReport periodic_points(const CorrContext& ctx, int n,
                                      PeriodicMethod method = PeriodicMethod::resultant) {
    if (n < 1) throw std::invalid_argument("periodic_points: n must be >= 1");
    const bool want_res = method != PeriodicMethod::newton;
    const bool want_newt = method != PeriodicMethod::resultant;
    if (want_res && n > 5)
        throw std::invalid_argument(
            "periodic_points: the resultant path supports n <= 5; use the "
            "newton method for deeper periods");
    if (n > 10)
        throw std::invalid_argument("periodic_points: n capped at 10");

    int diagonal_roots_at_infinity = 0;
    std::vector<std::pair<cplx, double>> pts_res, pts_newt;

    // The common fixed point is n-periodic for every n and every parameter;
    // seeding it outright pins any flat basin around it to its exact center.
    if (want_res) {
        const BiPoly gn = graph_iterate(ctx, n);
        const RootSet rs = roots_simultaneous(gn.diagonal());
        diagonal_roots_at_infinity = rs.roots_at_infinity;
        std::vector<cplx> cand;
        cand.reserve(rs.roots.size() + rs.raw_roots.size() + 1);
        cand.emplace_back(1.0, 0.0);
        for (const auto& [r, m] : rs.roots) cand.push_back(r);
        // Clustered roots of a high-degree diagonal are ill conditioned, so
        // the raw scatter makes better polish seeds than the centroids alone.
        for (const auto& r : rs.raw_roots) cand.push_back(r);
        pts_res = detail::finish_candidates(ctx, n, cand);
        detail::merge_indistinguishable(ctx, n, pts_res);
    }
    if (want_newt) {
        std::vector<cplx> cand = detail::newton_word_search(ctx, n);
        cand.emplace_back(1.0, 0.0);
        pts_newt = detail::finish_candidates(ctx, n, cand);
        detail::merge_indistinguishable(ctx, n, pts_newt);
    }

    std::vector<std::pair<cplx, double>> pts;
    if (method == PeriodicMethod::resultant) {
        pts = std::move(pts_res);
    } else if (method == PeriodicMethod::newton) {
        pts = std::move(pts_newt);
    } else {
        // Verified points of each path must appear in the other.
        const auto covered = [](const cplx& p,
                                const std::vector<std::pair<cplx, double>>& set) {
            for (const auto& [q, r] : set)
                if (std::abs(p - q) <= 1e-5 * (1.0 + std::abs(p))) return true;
            return false;
        };
        for (const auto& [p, r] : pts_res)
            if (r < 1e-6 && !covered(p, pts_newt))
                throw std::runtime_error(
                    "periodic_points: resultant and newton paths disagree "
                    "(a resultant-path point is missing from the grid search)");
        for (const auto& [p, r] : pts_newt)
            if (r < 1e-6 && !covered(p, pts_res))
                throw std::runtime_error(
                    "periodic_points: resultant and newton paths disagree "
                    "(a grid-search point is missing from the resultant path)");
        pts = std::move(pts_res);
        for (const auto& [p, r] : pts_newt) detail::consider_candidate(ctx, n, p, pts);
        detail::merge_indistinguishable(ctx, n, pts);
    }

    PeriodicReport rep;
    rep.n = n;
    rep.method = method;
    for (const auto& [p, r] : pts) {
        PeriodicPoint pp;
        pp.point = SpherePoint::from_unchecked(p);
        pp.residual = r;
        pp.verified = r < 1e-6;
        double gap = std::numeric_limits<double>::infinity();
        for (const auto& [q, rq] : pts)
            if (q != p) gap = std::min(gap, std::abs(q - p));
        if (!std::isfinite(gap)) gap = 1.0;
        pp.multiplicity = pp.verified ? local_multiplicity(ctx, p, n, gap) : 1;
        pp.side = classify_side(ctx, pp.point, n);
        rep.points.push_back(pp);
    }

    // The point at infinity never enters the finite search; test it directly.
    {
        const auto ends = branch_endpoints(ctx, SpherePoint::infinity(), n);
        int returning = 0;
        for (const auto& e : ends)
            if (!e.is_finite()) ++returning;
        if (returning > 0 || diagonal_roots_at_infinity > 0) {
            PeriodicPoint pp;
            pp.point = SpherePoint::infinity();
            pp.verified = returning > 0;
            pp.residual = pp.verified ? 0.0 : 2.0;
            pp.multiplicity = std::max(returning, 1);
            pp.side = classify_side(ctx, pp.point, n);
            rep.points.push_back(pp);
        }
    }

    std::sort(rep.points.begin(), rep.points.end(),
              [](const PeriodicPoint& x, const PeriodicPoint& y) {
                  if (x.point.at_infinity != y.point.at_infinity)
                      return y.point.at_infinity;
                  if (x.point.value.real() != y.point.value.real())
                      return x.point.value.real() < y.point.value.real();
                  return x.point.value.imag() < y.point.value.imag();
              });
    for (const auto& pp : rep.points)
        if (pp.verified) {
            rep.total_multiplicity += pp.multiplicity;
            rep.count_distinct += 1;
        }
    return rep;
}

// Taylor data of the restriction germ at the common fixed point 1, where the
// multiplier is 1 for every parameter. The quadratic coefficient has the
// closed form (a-7)/(3(a-1)); the finite-difference values come from the
// branch nearest the probe (the germ is tangent to the identity, so nearest-
// image selection picks it out whenever the companion image stays away).
struct ParabolicData {
    cplx multiplier_fd{};
    cplx c2_closed{};
    cplx c2_fd{};
    double deviation = 0.0; // |c2_fd - c2_closed| relative
    bool flagged = false;
};

inline ParabolicData parabolic_fixed_point(const CorrContext& ctx) {
    const cplx a = ctx.a;
    if (std::abs(a - 1.0) < 0.05)
        throw std::invalid_argument(
            "parabolic_fixed_point: the companion image collides with the "
            "fixed point as a approaches 1");
    ParabolicData out;
    out.c2_closed = (a - 7.0) / (3.0 * (a - 1.0));
    const auto germ = [&](const cplx& z) {
        const WeightedImage im = fa_forward(ctx, SpherePoint::from_unchecked(z));
        cplx best{};
        double bd = std::numeric_limits<double>::infinity();
        for (const auto& [pt, mult] : im.images) {
            if (!pt.is_finite()) continue;
            const double d = std::abs(pt.value - z);
            if (d < bd) {
                bd = d;
                best = pt.value;
            }
        }
        return best;
    };
    const double h = 1e-3;
    const auto diff = [&](double hh) {
        return (germ(cplx(1.0 + hh)) - germ(cplx(1.0 - hh))) / (2.0 * hh);
    };
    const auto curv = [&](double hh) {
        return (germ(cplx(1.0 + hh)) + germ(cplx(1.0 - hh)) - 2.0) / (2.0 * hh * hh);
    };
    // One Richardson step removes the h^2 error of both stencils.
    out.multiplier_fd = (4.0 * diff(h / 2.0) - diff(h)) / 3.0;
    out.c2_fd = (4.0 * curv(h / 2.0) - curv(h)) / 3.0;
    out.deviation =
        std::abs(out.c2_fd - out.c2_closed) / std::max(1.0, std::abs(out.c2_closed));
    out.flagged =
        out.deviation > 1e-5 || std::abs(out.multiplier_fd - 1.0) > 1e-5;
    return out;
}

// Parameters where the critical orbit of the restricted map returns to the
// critical value -1 after exactly n steps. Newton in the parameter with a
// central finite difference, seeded from a grid over the supported disk;
// seeds whose orbit escapes mid-iteration are dropped.
struct SuperstableHit {
    cplx a{};
    double residual = 0.0;        // |f^n(-1) + 1| at the reported parameter
    bool verified_critical = false; // -1 is genuinely critical there
};

namespace detail {

inline std::optional<cplx> critical_return(const cplx& a, int n) {
    if (!(a.real() > 1.0)) return std::nullopt;
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) return std::nullopt;
    CorrContext ctx(a);
    SpherePoint z(-1.0, 0.0);
    for (int s = 0; s < n; ++s) {
        std::optional<SpherePoint> nx;
        try {
            nx = f_restricted(ctx, z);
        } catch (const std::exception&) {
            return std::nullopt;
        }
        if (!nx || !nx->is_finite()) return std::nullopt;
        z = *nx;
    }
    return z.value + 1.0;
}

} // namespace detail

inline std::vector<SuperstableHit> superstable_parameters(int n, int grid_n = 48) {
    if (n < 1 || n > 12)
        throw std::invalid_argument("superstable_parameters: n must be in [1, 12]");
    if (grid_n < 2)
        throw std::invalid_argument("superstable_parameters: grid_n must be >= 2");
    std::vector<SuperstableHit> out;
    for (int gi = 0; gi < grid_n; ++gi) {
        for (int gj = 0; gj < grid_n; ++gj) {
            cplx alpha(4.0 - 2.95 + 5.9 * (gi + 0.5) / grid_n,
                       -2.95 + 5.9 * (gj + 0.5) / grid_n);
            if (!(alpha.real() > 1.0)) continue;
            bool converged = false;
            for (int iter = 0; iter < 40; ++iter) {
                const auto psi = detail::critical_return(alpha, n);
                if (!psi) break;
                if (std::abs(*psi) < 1e-10) {
                    converged = true;
                    break;
                }
                const double da = 1e-6 * (1.0 + std::abs(alpha));
                const auto pp = detail::critical_return(alpha + da, n);
                const auto pm = detail::critical_return(alpha - da, n);
                if (!pp || !pm) break;
                const cplx deriv = (*pp - *pm) / (2.0 * da);
                if (std::abs(deriv) < 1e-14) break;
                const cplx step = -*psi / deriv;
                double t = 1.0;
                bool accepted = false;
                for (int halving = 0; halving < 30; ++halving, t *= 0.5) {
                    const auto pt = detail::critical_return(alpha + t * step, n);
                    if (pt && std::abs(*pt) < (1.0 - 0.25 * t) * std::abs(*psi)) {
                        alpha += t * step;
                        accepted = true;
                        break;
                    }
                }
                if (!accepted) break;
            }
            if (!converged) continue;
            if (!(std::abs(alpha - 4.0) <= 2.95 && alpha.real() > 1.0)) continue;
            bool dup = false;
            for (const auto& hit : out)
                if (std::abs(hit.a - alpha) <= 1e-8) {
                    dup = true;
                    break;
                }
            if (dup) continue;
            const auto psi = detail::critical_return(alpha, n);
            SuperstableHit hit;
            hit.a = alpha;
            hit.residual = psi ? std::abs(*psi) : std::numeric_limits<double>::infinity();
            hit.verified_critical = std::abs(alpha - cplx(1.5)) > 0.5;
            out.push_back(hit);
        }
    }
    std::sort(out.begin(), out.end(), [](const SuperstableHit& x, const SuperstableHit& y) {
        if (x.a.real() != y.a.real()) return x.a.real() < y.a.real();
        return x.a.imag() < y.a.imag();
    });
    return out;
}

// Numeric recovery of the forward critical values: roots in w of the
// z-discriminant of the graph polynomial, compared against the closed-form
// list. worst_match is the largest chordal distance from a computed root to
// the closed-form set.
struct CriticalValueCheck {
    std::vector<std::pair<cplx, int>> disc_roots;
    int roots_at_infinity = 0;
    double worst_match = 0.0;
};

inline CriticalValueCheck critical_values_search(const CorrContext& ctx) {
    const BiPoly g = graph_polynomial(ctx);
    const std::vector<cplx> c2(g.c[2].begin(), g.c[2].end());
    const std::vector<cplx> c1(g.c[1].begin(), g.c[1].end());
    const std::vector<cplx> c0(g.c[0].begin(), g.c[0].end());
    // discriminant in z: c1^2 - 4 c2 c0, a quartic in w
    const std::vector<cplx> disc =
        poly_axpy(poly_mul(c1, c1), cplx(-4.0), poly_mul(c2, c0));
    const RootSet rs = roots_simultaneous(disc);
    CriticalValueCheck out;
    out.roots_at_infinity = rs.roots_at_infinity;
    for (const auto& [r, m] : rs.roots)
        out.disc_roots.emplace_back(polish_root(disc, r, m), m);
    const CriticalData cd = critical_data(ctx);
    for (const auto& [r, m] : out.disc_roots) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& v : cd.b2)
            best = std::min(best, chordal_dist(SpherePoint::from_unchecked(r), v));
        out.worst_match = std::max(out.worst_match, best);
    }
    // Roots pushed to infinity must be matched by an infinite critical value.
    if (out.roots_at_infinity > 0) {
        bool has_inf = false;
        for (const auto& v : cd.b2)
            if (!v.is_finite()) has_inf = true;
        if (!has_inf) out.worst_match = std::max(out.worst_match, 2.0);
    }
    return out;
}

} // namespace corrdyn
