// Regenerates the calibration constants stored in tests/fixtures/calibration.json.
// The convergence statements being tested are qualitative (weak convergence of
// the transported measures), so every quantitative gate in the test suite is a
// measured value from this program, frozen with headroom. Rerun after any
// change to the transport, kernel, or render defaults:
//
//   ./corrdyn-calibrate > ../tests/fixtures/calibration.json

#include <cstdio>
#include <vector>

#include "corrdyn/corr.hpp"
#include "corrdyn/measure.hpp"
#include "corrdyn/periodic.hpp"
#include "corrdyn/render.hpp"

using namespace corrdyn;

int main() {
    const CorrContext ctx(cplx(4.0, 0.0));

    const AtomicMeasure m3 = transport(ctx, AtomicMeasure::dirac(SpherePoint(3.0, 0.0)),
                                       14, Direction::backward, 0.0);
    const AtomicMeasure m22 = transport(
        ctx, AtomicMeasure::dirac(SpherePoint(2.0, 2.0)), 14, Direction::backward, 0.0);
    const AtomicMeasure mneg = transport(
        ctx, AtomicMeasure::dirac(SpherePoint(-0.5, 0.0)), 14, Direction::backward, 0.0);

    const double pair_a = discrepancy(m3, m22);
    const double pair_b = discrepancy(m3, mneg);
    const double pair_c = discrepancy(m22, mneg);
    const double invariance = invariance_residual(ctx, m3, Direction::backward);

    // successive-step discrepancies for the monotone convergence proxy
    std::vector<double> steps;
    for (int n : {8, 10, 12}) {
        const AtomicMeasure a = transport(
            ctx, AtomicMeasure::dirac(SpherePoint(3.0, 0.0)), n, Direction::backward, 0.0);
        const AtomicMeasure b = transport(ctx, a, 2, Direction::backward, 0.0);
        steps.push_back(discrepancy(a, b));
    }

    // periodic measures against the averaged empirical limit measures
    const AtomicMeasure fwd = transport(
        ctx, AtomicMeasure::dirac(SpherePoint(3.0, 0.0)), 14, Direction::forward, 0.0);
    const AtomicMeasure half = mixed(m3, fwd);
    std::vector<double> periodic_disc;
    for (int n = 2; n <= 4; ++n) {
        const PeriodicReport rep = periodic_points(ctx, n, PeriodicMethod::both);
        periodic_disc.push_back(
            discrepancy(periodic_measure(rep, Weighting::multiplicity), half));
    }

    // mass near the rendered boundary at the acceptance viewport
    Viewport vp;
    vp.center = cplx(-0.5, 0.002197265625);
    vp.width = 4.5;
    vp.pixels_x = 1024;
    vp.pixels_y = 1024;
    const ImageGrid grid = render_limit_set(ctx, LimitSide::minus, vp, 500);
    const auto bmask = boundary_mask(grid);
    double near_mass = 0.0, total_mass = 0.0;
    for (const auto& [p, w] : m3.atoms) {
        total_mass += w;
        if (p.at_infinity) continue;
        const auto px = vp.to_pixel(p.value);
        if (!px) continue;
        bool close = false;
        for (int dy = -3; dy <= 3 && !close; ++dy)
            for (int dx = -3; dx <= 3 && !close; ++dx) {
                const int ix = px->first + dx, iy = px->second + dy;
                if (ix < 0 || iy < 0 || ix >= vp.pixels_x || iy >= vp.pixels_y) continue;
                if (bmask[std::size_t(iy) * vp.pixels_x + ix]) close = true;
            }
        if (close) near_mass += w;
    }

    std::printf("{\n");
    std::printf("  \"pairwise_discrepancy_n14\": [%.6g, %.6g, %.6g],\n", pair_a, pair_b,
                pair_c);
    std::printf("  \"invariance_residual_n14\": %.6g,\n", invariance);
    std::printf("  \"step_discrepancy_n8_n10_n12\": [%.6g, %.6g, %.6g],\n", steps[0],
                steps[1], steps[2]);
    std::printf("  \"periodic_measure_discrepancy_n2_n3_n4\": [%.6g, %.6g, %.6g],\n",
                periodic_disc[0], periodic_disc[1], periodic_disc[2]);
    std::printf("  \"boundary_mass_fraction_1024\": %.6g\n", near_mass / total_mass);
    std::printf("}\n");
    return 0;
}
