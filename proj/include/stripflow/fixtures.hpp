#ifndef STRIPFLOW_FIXTURES_HPP
#define STRIPFLOW_FIXTURES_HPP

#include <random>

#include "stripflow/field.hpp"
#include "stripflow/geometry.hpp"

namespace stripflow::fixtures {

// square patch [0.2,0.4]x[0.4,0.6] of value 1 plus its mirror
inline PatchSet mirrored_square_patch() {
    PatchSet ps;
    Polygon sq{{0.2, 0.4}, {0.4, 0.4}, {0.4, 0.6}, {0.2, 0.6}};
    ps.patches.push_back({sq, 1.0});
    ps.patches.push_back({reflected_x(sq), -1.0});
    return ps;
}

inline PatchSet lone_square_patch() {
    PatchSet ps;
    Polygon sq{{0.2, 0.4}, {0.4, 0.4}, {0.4, 0.6}, {0.2, 0.6}};
    ps.patches.push_back({sq, 1.0});
    return ps;
}

// simple star-shaped polygon around a center
inline Polygon random_star_polygon(std::mt19937_64& rng, Vec2 center = {0.0, 0.0},
                                   double rmin = 0.3, double rmax = 1.2, int nmin = 6,
                                   int nmax = 16) {
    std::uniform_int_distribution<int> nd(nmin, nmax);
    std::uniform_real_distribution<double> gd(0.5, 1.5), rd(rmin, rmax);
    const int n = nd(rng);
    // angles from normalized positive gaps: simple (star-shaped) by construction
    std::vector<double> gaps(n);
    double total = 0.0;
    for (double& g : gaps) { g = gd(rng); total += g; }
    Polygon p;
    double ang = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = rd(rng);
        p.push_back({center.x + r * std::cos(ang), center.y + r * std::sin(ang)});
        ang += 2.0 * 3.14159265358979323846 * gaps[i] / total;
    }
    return p;
}

// random free-surface polyline over [-R, R]: level 2 plus a few bumps,
// tapered so the lateral ends sit exactly at the reference level
inline std::vector<Vec2> random_interface(std::mt19937_64& rng, double R, int npts = 400) {
    std::uniform_int_distribution<int> kd(1, 4);
    std::uniform_real_distribution<double> amp(-0.45, 0.45), cen(-R + 2.0, R - 2.0),
        wid(0.3, 1.2);
    const int nb = kd(rng);
    std::vector<double> a(nb), c(nb), w(nb);
    for (int k = 0; k < nb; ++k) {
        a[k] = amp(rng);
        c[k] = cen(rng);
        w[k] = wid(rng);
    }
    std::vector<Vec2> curve(npts);
    for (int i = 0; i < npts; ++i) {
        const double x = -R + 2.0 * R * i / (npts - 1);
        double h = 0.0;
        for (int k = 0; k < nb; ++k) {
            const double u = (x - c[k]) / w[k];
            h += a[k] * std::exp(-u * u);
        }
        const double edge = (R - std::abs(x)) / 1.5; // taper to 0 at the lateral ends
        const double taper = edge >= 1.0 ? 1.0 : (edge <= 0.0 ? 0.0 : edge * edge * (3 - 2 * edge));
        curve[i] = {x, 2.0 + h * taper};
    }
    return curve;
}

} // namespace stripflow::fixtures

#endif
