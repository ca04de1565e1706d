#pragma once
// Dense bivariate complex polynomials, Sylvester resultants by evaluation
// and interpolation, simultaneous root finding, and multiplicity clustering.
//
// Resultants are never expanded symbolically: both inputs are specialized on
// circles of radius 2 in each surviving variable, a numeric Sylvester
// determinant is taken at every node pair, and the coefficient array is
// recovered by inverse discrete Fourier transforms (the Vandermonde system
// for circle nodes is the DFT matrix, so this solve is exact and perfectly
// conditioned up to the radius scaling). Determinants and transforms run in
// 80-bit long double because the iterated-graph coefficients span enough
// orders of magnitude to eat most of a double's mantissa by the fifth step.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "corrdyn/parallel.hpp"
#include "corrdyn/sphere.hpp"

namespace corrdyn {

using lcplx = std::complex<long double>;

inline constexpr long double kLPi = 3.14159265358979323846264338327950288L;

struct BiPoly {
    // c[i][j] multiplies z^i w^j.
    std::vector<std::vector<cplx>> c;

    static BiPoly zero(int dz, int dw) {
        BiPoly p;
        p.c.assign(dz + 1, std::vector<cplx>(dw + 1, cplx(0.0)));
        return p;
    }

    int deg_z() const { return static_cast<int>(c.size()) - 1; }
    int deg_w() const { return c.empty() ? -1 : static_cast<int>(c[0].size()) - 1; }

    cplx eval(const cplx& z, const cplx& w) const {
        cplx acc(0.0);
        for (int i = deg_z(); i >= 0; --i) {
            cplx row(0.0);
            for (int j = deg_w(); j >= 0; --j) row = row * w + c[i][j];
            acc = acc * z + row;
        }
        return acc;
    }

    double max_abs_coeff() const {
        double m = 0.0;
        for (const auto& row : c)
            for (const auto& v : row) m = std::max(m, std::abs(v));
        return m;
    }

    // Magnitude bound of the terms at (z, w); evaluation residuals are
    // meaningful relative to this.
    double eval_scale(const cplx& z, const cplx& w) const {
        return max_abs_coeff() *
               std::pow(std::max(1.0, std::abs(z)), deg_z()) *
               std::pow(std::max(1.0, std::abs(w)), deg_w());
    }

    // Tighten the bidegree: drop trailing rows/columns that are zero
    // relative to the largest coefficient.
    void trim(double rel_tol = 1e-12) {
        const double cut = rel_tol * max_abs_coeff();
        auto row_small = [&](const std::vector<cplx>& row) {
            for (const auto& v : row)
                if (std::abs(v) > cut) return false;
            return true;
        };
        while (c.size() > 1 && row_small(c.back())) c.pop_back();
        int dw = 0;
        for (const auto& row : c)
            for (int j = static_cast<int>(row.size()) - 1; j >= 0; --j)
                if (std::abs(row[j]) > cut) {
                    dw = std::max(dw, j);
                    break;
                }
        for (auto& row : c) row.resize(dw + 1, cplx(0.0));
    }

    void normalize() {
        const double m = max_abs_coeff();
        if (m == 0.0) return;
        for (auto& row : c)
            for (auto& v : row) v /= m;
    }

    // Coefficients in w of P(z0, w), ascending.
    std::vector<cplx> specialize_z(const cplx& z0) const {
        std::vector<cplx> out(deg_w() + 1, cplx(0.0));
        for (int j = 0; j <= deg_w(); ++j) {
            cplx acc(0.0);
            for (int i = deg_z(); i >= 0; --i) acc = acc * z0 + c[i][j];
            out[j] = acc;
        }
        return out;
    }

    // Coefficients in z of P(z, w0), ascending.
    std::vector<cplx> specialize_w(const cplx& w0) const {
        std::vector<cplx> out(deg_z() + 1, cplx(0.0));
        for (int i = 0; i <= deg_z(); ++i) {
            cplx acc(0.0);
            for (int j = deg_w(); j >= 0; --j) acc = acc * w0 + c[i][j];
            out[i] = acc;
        }
        return out;
    }

    // p(z) = P(z, z), ascending coefficients; degree at most deg_z + deg_w.
    std::vector<cplx> diagonal() const {
        std::vector<cplx> d(deg_z() + deg_w() + 1, cplx(0.0));
        for (int i = 0; i <= deg_z(); ++i)
            for (int j = 0; j <= deg_w(); ++j) d[i + j] += c[i][j];
        return d;
    }
};

// Small ascending-coefficient univariate helpers.
inline std::vector<cplx> poly_mul(const std::vector<cplx>& u,
                                  const std::vector<cplx>& v) {
    std::vector<cplx> out(u.size() + v.size() - 1, cplx(0.0));
    for (std::size_t i = 0; i < u.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) out[i + j] += u[i] * v[j];
    return out;
}

inline std::vector<cplx> poly_axpy(const std::vector<cplx>& u, const cplx& s,
                                   const std::vector<cplx>& v) {
    std::vector<cplx> out(std::max(u.size(), v.size()), cplx(0.0));
    for (std::size_t i = 0; i < u.size(); ++i) out[i] += u[i];
    for (std::size_t i = 0; i < v.size(); ++i) out[i] += s * v[i];
    return out;
}

inline cplx poly_eval(const std::vector<cplx>& p, const cplx& z) {
    cplx acc(0.0);
    for (std::size_t k = p.size(); k-- > 0;) acc = acc * z + p[k];
    return acc;
}

namespace detail {

// Sylvester determinant of two specialized univariate polynomials in the
// eliminated variable (ascending coefficients, declared degrees dp and dq).
// The matrix is always built at the declared degrees, so specializing first
// and taking the determinant agrees exactly with the resultant polynomial
// even where a leading coefficient happens to vanish.
inline lcplx sylvester_det(const std::vector<lcplx>& pc, int dp,
                           const std::vector<lcplx>& qc, int dq) {
    const int n = dp + dq;
    std::vector<lcplx> m(static_cast<std::size_t>(n) * n, lcplx(0.0L));
    for (int r = 0; r < dq; ++r)
        for (int k = 0; k <= dp; ++k)
            m[static_cast<std::size_t>(r) * n + r + k] = pc[dp - k];
    for (int r = 0; r < dp; ++r)
        for (int k = 0; k <= dq; ++k)
            m[static_cast<std::size_t>(dq + r) * n + r + k] = qc[dq - k];

    // Partial-pivoted LU; determinant is the signed product of pivots.
    lcplx det(1.0L);
    for (int col = 0; col < n; ++col) {
        int piv = col;
        long double best = std::abs(m[static_cast<std::size_t>(col) * n + col]);
        for (int r = col + 1; r < n; ++r) {
            const long double v = std::abs(m[static_cast<std::size_t>(r) * n + col]);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best == 0.0L) return lcplx(0.0L);
        if (piv != col) {
            for (int k = col; k < n; ++k)
                std::swap(m[static_cast<std::size_t>(piv) * n + k],
                          m[static_cast<std::size_t>(col) * n + k]);
            det = -det;
        }
        const lcplx pivot = m[static_cast<std::size_t>(col) * n + col];
        det *= pivot;
        for (int r = col + 1; r < n; ++r) {
            const lcplx f = m[static_cast<std::size_t>(r) * n + col] / pivot;
            if (f == lcplx(0.0L)) continue;
            for (int k = col + 1; k < n; ++k)
                m[static_cast<std::size_t>(r) * n + k] -=
                    f * m[static_cast<std::size_t>(col) * n + k];
        }
    }
    return det;
}

inline std::vector<lcplx> to_long(const std::vector<cplx>& v) {
    std::vector<lcplx> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out[i] = lcplx(v[i].real(), v[i].imag());
    return out;
}

} // namespace detail

// Recover the coefficient array of a bidegree (dz, dw) polynomial from its
// values on the product of circles radius * e^{2 pi i k / (d+1)}. Exposed so
// the round-trip property can be tested on its own.
inline BiPoly bipoly_from_circle_samples(const std::vector<std::vector<lcplx>>& vals,
                                         int dz, int dw, long double radius) {
    const int nz = dz + 1, nw = dw + 1;
    // First transform over the w-index for every z-node.
    std::vector<std::vector<lcplx>> g(nz, std::vector<lcplx>(nw));
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < nw; ++j) {
            lcplx acc(0.0L);
            for (int l = 0; l < nw; ++l) {
                const long double ang = -2.0L * kLPi * l * j / nw;
                acc += vals[k][l] * lcplx(std::cos(ang), std::sin(ang));
            }
            g[k][j] = acc / static_cast<long double>(nw);
        }
    BiPoly out = BiPoly::zero(dz, dw);
    for (int i = 0; i < nz; ++i)
        for (int j = 0; j < nw; ++j) {
            lcplx acc(0.0L);
            for (int k = 0; k < nz; ++k) {
                const long double ang = -2.0L * kLPi * k * i / nz;
                acc += g[k][j] * lcplx(std::cos(ang), std::sin(ang));
            }
            acc /= static_cast<long double>(nz);
            acc /= std::pow(radius, static_cast<long double>(i + j));
            out.c[i][j] = cplx(static_cast<double>(acc.real()),
                               static_cast<double>(acc.imag()));
        }
    return out;
}

// Sylvester resultant eliminating the shared variable x from P(z, x) and
// Q(x, w); the result vanishes exactly on pairs (z, w) linked through some x
// on both graphs. The output is normalized to unit max coefficient (the
// inputs are only meaningful projectively here). Throws when the determinant
// vanishes across the whole grid (common component) or when off-grid
// validation shows the interpolation was ill conditioned.
inline BiPoly resultant_x(const BiPoly& p, const BiPoly& q) {
    const int dpx = p.deg_w(), dpz = p.deg_z();
    const int dqx = q.deg_z(), dqw = q.deg_w();
    if (dpx < 1 || dqx < 1)
        throw std::invalid_argument("resultant_x: inputs need positive degree in x");

    BiPoly pn = p, qn = q;
    pn.normalize();
    qn.normalize();
    const int dz_out = dpz * dqx;
    const int dw_out = dqw * dpx;
    const int nz = dz_out + 1, nw = dw_out + 1;

    auto det_at = [&](const lcplx& zv, const lcplx& wv) {
        // Specialize P at z (coefficients in x) and Q at w, in long double.
        std::vector<lcplx> pc(dpx + 1), qc(dqx + 1);
        for (int j = 0; j <= dpx; ++j) {
            lcplx acc(0.0L);
            for (int i = dpz; i >= 0; --i)
                acc = acc * zv + lcplx(pn.c[i][j].real(), pn.c[i][j].imag());
            pc[j] = acc;
        }
        for (int i = 0; i <= dqx; ++i) {
            lcplx acc(0.0L);
            for (int j = dqw; j >= 0; --j)
                acc = acc * wv + lcplx(qn.c[i][j].real(), qn.c[i][j].imag());
            qc[i] = acc;
        }
        return detail::sylvester_det(pc, dpx, qc, dqx);
    };

    std::string last_error;
    for (int attempt = 0; attempt < 4; ++attempt) {
        const long double radius = 2.0L * std::pow(1.07L, attempt);
        std::vector<std::vector<lcplx>> vals(nz, std::vector<lcplx>(nw));
        long double vmax = 0.0L;
        parallel_for(static_cast<std::size_t>(nz), [&](std::size_t k) {
            const long double angz = 2.0L * kLPi * static_cast<long double>(k) / nz;
            const lcplx zv = radius * lcplx(std::cos(angz), std::sin(angz));
            for (int l = 0; l < nw; ++l) {
                const long double angw = 2.0L * kLPi * l / nw;
                const lcplx wv = radius * lcplx(std::cos(angw), std::sin(angw));
                vals[k][l] = det_at(zv, wv);
            }
        });
        for (const auto& row : vals)
            for (const auto& v : row) vmax = std::max(vmax, std::abs(v));
        if (vmax < 1e-200L)
            throw std::runtime_error(
                "resultant_x: determinant vanishes on the whole grid "
                "(the graphs share a component)");

        BiPoly raw = bipoly_from_circle_samples(vals, dz_out, dw_out, radius);
        const double scale = raw.max_abs_coeff();
        BiPoly result = raw;
        result.normalize();
        result.trim();

        // Off-grid validation: the interpolant must reproduce the Sylvester
        // determinant away from the nodes.
        std::mt19937_64 rng(0x5bd1e995u + attempt);
        std::uniform_real_distribution<double> uang(0.0, 2.0 * kPi);
        double worst = 0.0;
        for (int t = 0; t < 3; ++t) {
            const double ta = uang(rng), tb = uang(rng);
            const cplx zt = 1.71 * cplx(std::cos(ta), std::sin(ta));
            const cplx wt = 1.33 * cplx(std::cos(tb), std::sin(tb));
            const lcplx dv = det_at(lcplx(zt.real(), zt.imag()),
                                    lcplx(wt.real(), wt.imag()));
            const double direct = static_cast<double>(std::abs(dv));
            const double interp = std::abs(raw.eval(zt, wt));
            const double denom = std::max({direct, interp, scale});
            const double rel =
                denom == 0.0
                    ? 0.0
                    : std::abs(interp - direct) / denom;
            worst = std::max(worst, rel);
        }
        if (worst <= 1e-6) return result;
        last_error = "resultant_x: interpolation residual " +
                     std::to_string(worst) + " at radius " +
                     std::to_string(static_cast<double>(radius));
    }
    throw std::runtime_error(last_error + " (all retries exhausted)");
}

// Refine the center of a root cluster of size m. An m-fold root of p is a
// simple root of the (m-1)-th derivative, and it stays one to working
// precision even after rounding splits the cluster, so plain Newton on that
// derivative converges quadratically where iteration on p itself saturates
// around sqrt(epsilon). For m = 1 this is ordinary Newton on p.
inline cplx polish_root(const std::vector<cplx>& coeffs, cplx z, int multiplicity) {
    if (static_cast<int>(coeffs.size()) - 1 < 1 || multiplicity < 1) return z;
    std::vector<cplx> p = coeffs;
    for (int d = 1; d < multiplicity && p.size() > 2; ++d) {
        std::vector<cplx> q(p.size() - 1);
        for (std::size_t k = 1; k < p.size(); ++k)
            q[k - 1] = static_cast<double>(k) * p[k];
        p.swap(q);
    }
    const int deg = static_cast<int>(p.size()) - 1;
    const auto eval = [&](const cplx& x, cplx& pv, cplx& dv) {
        pv = cplx(0.0);
        dv = cplx(0.0);
        for (int k = deg; k >= 0; --k) {
            dv = dv * x + pv;
            pv = pv * x + p[std::size_t(k)];
        }
    };
    cplx best = z;
    double best_res = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 16; ++it) {
        cplx pv, dv;
        eval(z, pv, dv);
        if (std::abs(pv) < best_res) {
            best_res = std::abs(pv);
            best = z;
        }
        if (pv == cplx(0.0) || dv == cplx(0.0)) break;
        const cplx step = pv / dv;
        z -= step;
        if (std::abs(step) <= 1e-15 * (1.0 + std::abs(z))) {
            cplx pv2, dv2;
            eval(z, pv2, dv2);
            if (std::abs(pv2) < best_res) best = z;
            break;
        }
    }
    return best;
}

// Root set with operational multiplicities from single-linkage clustering.
struct RootSet {
    std::vector<std::pair<cplx, int>> roots; // centroid, cluster size
    std::vector<cplx> raw_roots;
    int roots_at_infinity = 0;
    double worst_residual = 0.0; // relative to sum|c| * max(1,|r|)^deg
};

// Single-linkage clustering of near-coincident roots; each cluster is
// reported at its centroid with multiplicity equal to its size.
inline RootSet cluster_multiplicities(const std::vector<cplx>& roots,
                                      double tol_scale = 1e-6) {
    RootSet out;
    out.raw_roots = roots;
    const std::size_t n = roots.size();
    std::vector<std::size_t> parent(n);
    for (std::size_t i = 0; i < n; ++i) parent[i] = i;
    std::function<std::size_t(std::size_t)> find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double tol =
                tol_scale * (1.0 + std::max(std::abs(roots[i]), std::abs(roots[j])));
            if (std::abs(roots[i] - roots[j]) <= tol) parent[find(i)] = find(j);
        }
    std::vector<std::pair<cplx, int>> acc(n, {cplx(0.0), 0});
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = find(i);
        acc[r].first += roots[i];
        acc[r].second += 1;
    }
    for (std::size_t i = 0; i < n; ++i)
        if (acc[i].second > 0)
            out.roots.emplace_back(acc[i].first / static_cast<double>(acc[i].second),
                                   acc[i].second);
    std::sort(out.roots.begin(), out.roots.end(),
              [](const auto& a, const auto& b) {
                  if (a.first.real() != b.first.real())
                      return a.first.real() < b.first.real();
                  return a.first.imag() < b.first.imag();
              });
    return out;
}

// All complex roots of a univariate polynomial (ascending coefficients) by
// the Aberth-Ehrlich simultaneous iteration. Starting points sit on per-root
// circles read off the Newton polygon of the coefficient magnitudes (capped
// by the Cauchy bound), which keeps the iteration sane when the leading
// coefficient is many orders below the largest one. A vanishing-to-tolerance
// leading coefficient deflates the degree and is reported as a root at
// infinity.
inline RootSet roots_simultaneous(std::vector<cplx> coeffs,
                                  double cluster_tol_scale = 1e-6) {
    RootSet out;
    // Tight degree first, then deflation of negligible leading coefficients.
    double maxc = 0.0;
    for (const auto& v : coeffs) maxc = std::max(maxc, std::abs(v));
    if (maxc == 0.0)
        throw std::invalid_argument("roots_simultaneous: zero polynomial");
    while (coeffs.size() > 1 && std::abs(coeffs.back()) < 1e-12 * maxc) {
        coeffs.pop_back();
        ++out.roots_at_infinity;
    }
    const int deg = static_cast<int>(coeffs.size()) - 1;
    if (deg < 1) {
        if (out.roots_at_infinity == 0)
            throw std::invalid_argument("roots_simultaneous: degree must be >= 1");
        return out; // everything drifted to infinity
    }
    for (auto& v : coeffs) v /= maxc;

    // Newton-polygon radii: upper convex hull of (k, log|c_k|).
    std::vector<std::pair<int, double>> pts;
    for (int k = 0; k <= deg; ++k)
        if (std::abs(coeffs[k]) > 0.0)
            pts.emplace_back(k, std::log(std::abs(coeffs[k])));
    std::vector<std::pair<int, double>> hull;
    for (const auto& pt : pts) {
        while (hull.size() >= 2) {
            const auto& a = hull[hull.size() - 2];
            const auto& b = hull[hull.size() - 1];
            // keep b only if it lies strictly above the chord a->pt
            if ((b.second - a.second) * (pt.first - a.first) <=
                (pt.second - a.second) * (b.first - a.first))
                hull.pop_back();
            else
                break;
        }
        hull.push_back(pt);
    }
    double cauchy = 0.0;
    for (int k = 0; k < deg; ++k)
        cauchy = std::max(cauchy, std::abs(coeffs[k]));
    cauchy = 1.0 + cauchy / std::abs(coeffs[deg]);

    std::vector<cplx> z;
    z.reserve(deg);
    for (std::size_t s = 0; s + 1 < hull.size(); ++s) {
        const int k1 = hull[s].first, k2 = hull[s + 1].first;
        const double rho = std::min(
            std::exp((hull[s].second - hull[s + 1].second) / (k2 - k1)), cauchy);
        const int m = k2 - k1;
        for (int j = 0; j < m; ++j) {
            const double ang =
                2.0 * kPi * (j + 0.5) / m + 0.41 * static_cast<double>(s + 1);
            z.push_back(rho * cplx(std::cos(ang), std::sin(ang)));
        }
    }
    while (static_cast<int>(z.size()) < deg) z.push_back(cplx(0.618, 0.31));

    auto horner2 = [&](const cplx& x, cplx& pv, cplx& dv) {
        pv = cplx(0.0);
        dv = cplx(0.0);
        for (int k = deg; k >= 0; --k) {
            dv = dv * x + pv;
            pv = pv * x + coeffs[k];
        }
    };

    for (int sweep = 0; sweep < 200; ++sweep) {
        double max_step = 0.0;
        for (int i = 0; i < deg; ++i) {
            cplx pv, dv;
            horner2(z[i], pv, dv);
            if (pv == cplx(0.0)) continue;
            if (dv == cplx(0.0)) {
                z[i] += 1e-12 * (1.0 + std::abs(z[i]));
                max_step = 1.0;
                continue;
            }
            const cplx newton = pv / dv;
            cplx sum(0.0);
            double dmin = 1e300;
            for (int j = 0; j < deg; ++j) {
                if (j == i) continue;
                const cplx d = z[i] - z[j];
                dmin = std::min(dmin, std::abs(d));
                if (d != cplx(0.0)) sum += 1.0 / d;
            }
            const cplx denom = 1.0 - newton * sum;
            cplx step = denom == cplx(0.0) ? newton : newton / denom;
            // Trust region: never jump past the midpoint to a neighbor. A
            // collapsing denominator means more iterates sit on this root
            // than its multiplicity supports, and the resulting large step
            // is the surplus point's only way out, so in that case the cap
            // widens to the disk that contains every root.
            const double cap =
                std::abs(denom) < 0.1 ? 2.0 * cauchy : 0.5 * dmin;
            if (deg > 1 && std::abs(step) > cap && cap > 0.0)
                step *= cap / std::abs(step);
            z[i] -= step;
            max_step = std::max(max_step, std::abs(step) / (1.0 + std::abs(z[i])));
        }
        if (max_step < 1e-12) break;
    }

    double coeff_sum = 0.0;
    for (const auto& v : coeffs) coeff_sum += std::abs(v);
    for (int i = 0; i < deg; ++i) {
        cplx pv, dv;
        horner2(z[i], pv, dv);
        const double rel =
            std::abs(pv) /
            (coeff_sum * std::pow(std::max(1.0, std::abs(z[i])), deg));
        out.worst_residual = std::max(out.worst_residual, rel);
    }
    if (out.worst_residual > 1e-8)
        throw std::runtime_error(
            "roots_simultaneous: no convergence after 200 sweeps, worst "
            "relative residual " +
            std::to_string(out.worst_residual));

    RootSet clustered = cluster_multiplicities(z, cluster_tol_scale);
    out.roots = std::move(clustered.roots);
    out.raw_roots = std::move(clustered.raw_roots);
    return out;
}

} // namespace corrdyn
