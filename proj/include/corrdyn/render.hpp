#pragma once
// Escape-time images of the limit sets and heatmaps of atomic measures,
// written as binary portable pixmaps. Rendering is deterministic: pixels are
// classified independently, rows are distributed over threads, and the output
// bytes never depend on the thread count.

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "corrdyn/atoms.hpp"
#include "corrdyn/klein.hpp"
#include "corrdyn/parallel.hpp"
#include "corrdyn/sphere.hpp"

namespace corrdyn {

// Axis-aligned window into the plane. Pixel (0,0) is top-left; the map from
// pixel indices to points is affine and aspect-preserving.
struct Viewport {
    cplx center{0.0, 0.0};
    double width = 4.0;
    int pixels_x = 512;
    int pixels_y = 512;

    double height() const { return width * pixels_y / pixels_x; }

    cplx pixel_center(int ix, int iy) const {
        const double re =
            center.real() + ((ix + 0.5) / pixels_x - 0.5) * width;
        const double im =
            center.imag() + (0.5 - (iy + 0.5) / pixels_y) * height();
        return {re, im};
    }

    // Pixel containing a finite point, or nothing if it falls outside.
    std::optional<std::pair<int, int>> to_pixel(const cplx& z) const {
        const double fx = (z.real() - center.real()) / width + 0.5;
        const double fy = 0.5 - (z.imag() - center.imag()) / height();
        const int ix = static_cast<int>(std::floor(fx * pixels_x));
        const int iy = static_cast<int>(std::floor(fy * pixels_y));
        if (ix < 0 || ix >= pixels_x || iy < 0 || iy >= pixels_y)
            return std::nullopt;
        return std::make_pair(ix, iy);
    }
};

// Per-pixel payload: escape step (0 = never escaped) for limit-set images,
// accumulated weight for measure heatmaps. The slow mask flags pixels that
// were still inside at the iteration cap but barely moving, where the
// parabolic crawl makes the inside/outside call unreliable.
struct ImageGrid {
    int pixels_x = 0;
    int pixels_y = 0;
    std::vector<double> payload;     // row-major from top-left
    std::vector<std::uint8_t> slow;  // same layout, 0 or 1

    double at(int ix, int iy) const { return payload[std::size_t(iy) * pixels_x + ix]; }
    bool is_slow(int ix, int iy) const { return slow[std::size_t(iy) * pixels_x + ix] != 0; }
};

// Pixels classified as inside whose final two iterates are still this far
// apart are trusted; closer means the orbit stalled near the parabolic point.
inline constexpr double kSlowZoneStep = 1e-6;

inline ImageGrid render_limit_set(const CorrContext& ctx, LimitSide side,
                                  const Viewport& vp, int n_max = 500) {
    if (n_max < 1)
        throw std::invalid_argument("render_limit_set: n_max must be >= 1");
    ImageGrid g;
    g.pixels_x = vp.pixels_x;
    g.pixels_y = vp.pixels_y;
    g.payload.assign(std::size_t(vp.pixels_x) * vp.pixels_y, 0.0);
    g.slow.assign(g.payload.size(), 0);
    parallel_for(static_cast<std::size_t>(vp.pixels_y), [&](std::size_t iy) {
        for (int ix = 0; ix < vp.pixels_x; ++ix) {
            const SpherePoint z =
                SpherePoint::from_unchecked(vp.pixel_center(ix, int(iy)));
            const EscapeResult r = limit_membership(ctx, z, side, n_max);
            const std::size_t at = iy * vp.pixels_x + ix;
            if (r.inside) {
                g.payload[at] = 0.0;
                if (r.last_step_size < kSlowZoneStep) g.slow[at] = 1;
            } else {
                g.payload[at] = r.escaped_step;
            }
        }
    });
    return g;
}

// Heatmap of an atomic measure. Mass landing outside the viewport, including
// anything at infinity, is returned in overflow_mass so that grid + overflow
// always accounts for the full measure.
struct RenderedMeasure {
    ImageGrid grid;
    double overflow_mass = 0.0;
};

inline RenderedMeasure render_measure(const AtomicMeasure& mu, const Viewport& vp) {
    RenderedMeasure out;
    out.grid.pixels_x = vp.pixels_x;
    out.grid.pixels_y = vp.pixels_y;
    out.grid.payload.assign(std::size_t(vp.pixels_x) * vp.pixels_y, 0.0);
    out.grid.slow.assign(out.grid.payload.size(), 0);
    for (const auto& [p, w] : mu.atoms) {
        if (p.at_infinity) {
            out.overflow_mass += w;
            continue;
        }
        if (const auto px = vp.to_pixel(p.value)) {
            out.grid.payload[std::size_t(px->second) * vp.pixels_x + px->first] += w;
        } else {
            out.overflow_mass += w;
        }
    }
    return out;
}

// Inside pixels with an escaped 4-neighbor: the rendered boundary band.
// Border pixels count their existing neighbors only.
inline std::vector<std::uint8_t> boundary_mask(const ImageGrid& g) {
    std::vector<std::uint8_t> mask(g.payload.size(), 0);
    const auto inside = [&](int ix, int iy) { return g.at(ix, iy) == 0.0; };
    for (int iy = 0; iy < g.pixels_y; ++iy) {
        for (int ix = 0; ix < g.pixels_x; ++ix) {
            if (!inside(ix, iy)) continue;
            const bool edge =
                (ix > 0 && !inside(ix - 1, iy)) ||
                (ix + 1 < g.pixels_x && !inside(ix + 1, iy)) ||
                (iy > 0 && !inside(ix, iy - 1)) ||
                (iy + 1 < g.pixels_y && !inside(ix, iy + 1));
            if (edge) mask[std::size_t(iy) * g.pixels_x + ix] = 1;
        }
    }
    return mask;
}

using RGB = std::array<std::uint8_t, 3>;
using Palette = std::function<RGB(double)>;

// Inside is black; escape steps cycle through a fixed gradient so nearby
// escape times stay visually distinct at any magnification.
inline RGB default_escape_palette(double payload) {
    if (payload == 0.0) return {0, 0, 0};
    const double t = std::fmod(payload * 0.061803398875, 1.0);
    const auto channel = [&](double phase) {
        const double v = 0.5 + 0.5 * std::cos(2.0 * kPi * (t + phase));
        return static_cast<std::uint8_t>(std::lround(255.0 * v));
    };
    return {channel(0.0), channel(1.0 / 3.0), channel(2.0 / 3.0)};
}

// Grayscale ramp for measure heatmaps: 0 stays black, positive mass is
// log-compressed against the largest pixel.
inline Palette measure_palette(const ImageGrid& g) {
    double peak = 0.0;
    for (double v : g.payload) peak = std::max(peak, v);
    return [peak](double v) -> RGB {
        if (v <= 0.0 || peak <= 0.0) return {0, 0, 0};
        const double s = std::log1p(v / peak * 255.0) / std::log(256.0);
        const auto b = static_cast<std::uint8_t>(std::lround(255.0 * s));
        return {b, b, b};
    };
}

namespace detail {

inline void write_bytes(const std::string& path, const std::string& header,
                        const std::vector<std::uint8_t>& body) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    bool ok = std::fwrite(header.data(), 1, header.size(), f) == header.size();
    ok = ok && std::fwrite(body.data(), 1, body.size(), f) == body.size();
    if (std::fclose(f) != 0) ok = false;
    if (!ok) throw std::runtime_error("short write: " + path);
}

} // namespace detail

// Binary pixmap, header "P6\n<width> <height>\n255\n" then RGB triples
// row-major from the top-left pixel. mark_slow overrides the palette with a
// dark red on flagged pixels.
inline void write_ppm(const ImageGrid& g, const std::string& path,
                      const Palette& palette = default_escape_palette,
                      bool mark_slow = false) {
    char head[64];
    std::snprintf(head, sizeof head, "P6\n%d %d\n255\n", g.pixels_x, g.pixels_y);
    std::vector<std::uint8_t> body;
    body.reserve(g.payload.size() * 3);
    for (std::size_t i = 0; i < g.payload.size(); ++i) {
        RGB c = palette(g.payload[i]);
        if (mark_slow && g.slow[i]) c = {96, 0, 0};
        body.push_back(c[0]);
        body.push_back(c[1]);
        body.push_back(c[2]);
    }
    detail::write_bytes(path, head, body);
}

// Grayscale companion with the same header rules, magic "P5".
inline void write_pgm(const ImageGrid& g, const std::string& path,
                      const Palette& palette = default_escape_palette) {
    char head[64];
    std::snprintf(head, sizeof head, "P5\n%d %d\n255\n", g.pixels_x, g.pixels_y);
    std::vector<std::uint8_t> body;
    body.reserve(g.payload.size());
    for (double v : g.payload) {
        const RGB c = palette(v);
        const int luma = (c[0] * 299 + c[1] * 587 + c[2] * 114) / 1000;
        body.push_back(static_cast<std::uint8_t>(luma));
    }
    detail::write_bytes(path, head, body);
}

} // namespace corrdyn
