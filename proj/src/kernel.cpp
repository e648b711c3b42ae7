#include "stripflow/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "stripflow/envelope.hpp"
#include "stripflow/quadrature.hpp"

namespace stripflow::kernel {

namespace {

constexpr double PI = std::numbers::pi;

// Image-sum kernels at one source point. "two-term" is one patch together
// with its bottom/top wall images; "four-term" additionally folds in the
// x1-mirrored patch of opposite sign, which cancels the large common part
// analytically and keeps the odd-field residual well conditioned.
//
// A-(m) = (x1-y1)^2 + (x2-y2+2m)^2     B-(m) = (x1-y1)^2 + (x2+y2+2m)^2
// A+(m) = (x1+y1)^2 + (x2-y2+2m)^2     B+(m) = (x1+y1)^2 + (x2+y2+2m)^2

double psi2_point(Vec2 x, Vec2 y, int M) {
    const double P2 = (x.x - y.x) * (x.x - y.x);
    double s = 0.0;
    for (int m = 0; m <= M; ++m) {
        const double a = x.y - y.y + 2.0 * m, b = x.y + y.y + 2.0 * m;
        s += std::log(P2 + a * a) - std::log(P2 + b * b);
        if (m > 0) {
            const double am = x.y - y.y - 2.0 * m, bm = x.y + y.y - 2.0 * m;
            s += std::log(P2 + am * am) - std::log(P2 + bm * bm);
        }
    }
    return s / (4.0 * PI);
}

double psi4_point(Vec2 x, Vec2 y, int M) {
    return psi2_point(x, y, M) - psi2_point(x, {-y.x, y.y}, M);
}

Vec2 vel2_point(Vec2 x, Vec2 y, int M) {
    const double dx = x.x - y.x;
    const double P2 = dx * dx;
    double s1 = 0.0, s2 = 0.0;
    for (int m = -M; m <= M; ++m) {
        const double a = x.y - y.y + 2.0 * m, b = x.y + y.y + 2.0 * m;
        const double iA = 1.0 / (P2 + a * a), iB = 1.0 / (P2 + b * b);
        s1 += a * iA - b * iB;
        s2 -= dx * (iA - iB);
    }
    return {s1 / (2.0 * PI), s2 / (2.0 * PI)};
}

Vec2 vel4_point(Vec2 x, Vec2 y, int M) {
    const Vec2 r = vel2_point(x, y, M);
    const Vec2 l = vel2_point(x, {-y.x, y.y}, M);
    return {r.x - l.x, r.y - l.y};
}

// ---- patch grouping: mirror pairs evaluated through the four-term kernel ----

struct Groups {
    std::vector<const Patch*> right; // has mirror partner; integrate four-term
    std::vector<const Patch*> lone;  // integrate two-term
};

bool same_cycle(const Polygon& a, const Polygon& b) {
    if (a.size() != b.size()) return false;
    const size_t n = a.size();
    for (size_t off = 0; off < n; ++off) {
        bool ok = true;
        for (size_t k = 0; k < n; ++k)
            if (norm2(a[(off + k) % n] - b[k]) > 1e-24) { ok = false; break; }
        if (ok) return true;
    }
    // reversed traversal
    for (size_t off = 0; off < n; ++off) {
        bool ok = true;
        for (size_t k = 0; k < n; ++k)
            if (norm2(a[(off + n - k) % n] - b[k]) > 1e-24) { ok = false; break; }
        if (ok) return true;
    }
    return false;
}

Groups group_patches(const PatchSet& w) {
    Groups g;
    std::vector<bool> used(w.patches.size(), false);
    for (size_t i = 0; i < w.patches.size(); ++i) {
        if (used[i]) continue;
        const Patch& p = w.patches[i];
        const Polygon mir = reflected_x(p.poly);
        size_t partner = w.patches.size();
        for (size_t j = i + 1; j < w.patches.size(); ++j) {
            if (used[j]) continue;
            const Patch& q = w.patches[j];
            if (std::abs(q.value + p.value) <= 1e-12 * std::max(1.0, std::abs(p.value)) &&
                same_cycle(q.poly, mir)) { partner = j; break; }
        }
        if (partner < w.patches.size()) {
            used[i] = used[partner] = true;
            double cx = 0.0;
            for (const Vec2& v : p.poly) cx += v.x;
            g.right.push_back(cx >= 0.0 ? &p : &w.patches[partner]);
        } else {
            used[i] = true;
            g.lone.push_back(&p);
        }
    }
    return g;
}

// ---- singular-aware polygon integration ----

double dist2_point_triangle(Vec2 q, const Triangle& t) {
    const double d1 = cross(t.b - t.a, q - t.a);
    const double d2 = cross(t.c - t.b, q - t.b);
    const double d3 = cross(t.a - t.c, q - t.c);
    if ((d1 >= 0 && d2 >= 0 && d3 >= 0) || (d1 <= 0 && d2 <= 0 && d3 <= 0)) return 0.0;
    return std::min({dist2_point_segment(q, t.a, t.b), dist2_point_segment(q, t.b, t.c),
                     dist2_point_segment(q, t.c, t.a)});
}

quad::Result integrate_polygon(const Polygon& poly, const std::function<double(Vec2)>& f,
                               const std::vector<Vec2>& singular, double near_r, double tol) {
    const std::vector<Triangle> tris = triangulate(poly);
    quad::Result out;
    if (tris.empty()) return out;

    // coarse pass to distribute the error budget by contribution share
    std::vector<double> coarse(tris.size());
    double total = 0.0;
    for (size_t k = 0; k < tris.size(); ++k) {
        const Vec2 cen = (1.0 / 3.0) * (tris[k].a + tris[k].b + tris[k].c);
        const double area = 0.5 * std::abs(cross(tris[k].b - tris[k].a, tris[k].c - tris[k].a));
        coarse[k] = std::abs(f(cen)) * area;
        total += coarse[k];
    }
    const double floor_share = total / (8.0 * tris.size()) + 1e-300;

    for (size_t k = 0; k < tris.size(); ++k) {
        const Triangle& t = tris[k];
        const double tol_i =
            tol * (coarse[k] + floor_share) / (total + tris.size() * floor_share);
        double dbest = std::numeric_limits<double>::max();
        Vec2 sbest{};
        for (const Vec2& s : singular) {
            const double d = dist2_point_triangle(s, t);
            if (d < dbest) { dbest = d; sbest = s; }
        }
        const double diam2 = std::max({norm2(t.b - t.a), norm2(t.c - t.b), norm2(t.a - t.c)});
        if (dbest <= 1e-20 * std::max(1.0, diam2)) {
            // singular point inside or on the triangle: split to apex triangles
            const Triangle parts[3] = {{sbest, t.a, t.b}, {sbest, t.b, t.c}, {sbest, t.c, t.a}};
            for (const Triangle& p : parts) {
                if (std::abs(cross(p.b - p.a, p.c - p.a)) < 1e-30) continue;
                const quad::Result r = quad::integrate_tri_duffy(f, p, tol_i / 3.0);
                out.value += r.value;
                out.err_est += r.err_est;
            }
        } else if (dbest < near_r * near_r) {
            const quad::Result r = quad::integrate_tri(f, t, tol_i, 16);
            out.value += r.value;
            out.err_est += r.err_est;
        } else {
            const quad::Result r = quad::integrate_tri(f, t, tol_i, 12);
            out.value += r.value;
            out.err_est += r.err_est;
        }
    }
    return out;
}

std::vector<Vec2> singular_points(Vec2 x, bool mirrored) {
    std::vector<Vec2> s{{x.x, x.y}, {x.x, -x.y}, {x.x, 2.0 - x.y}};
    if (mirrored) {
        s.push_back({-x.x, x.y});
        s.push_back({-x.x, -x.y});
        s.push_back({-x.x, 2.0 - x.y});
    }
    return s;
}

void check_target(Vec2 x) {
    if (!std::isfinite(x.x) || !std::isfinite(x.y) || x.y < 0.0 || x.y > 1.0)
        throw std::invalid_argument("kernel: evaluation point outside the closed strip");
}

// shared driver for Psi over a patch set
double psi_patches(Vec2 x, const PatchSet& w, const KernelConfig& cfg) {
    const Groups g = group_patches(w);
    const int M = cfg.image_order;
    double total = 0.0, err = 0.0;
    for (const Patch* p : g.right) {
        auto f = [&](Vec2 y) { return psi4_point(x, y, M); };
        const quad::Result r =
            integrate_polygon(p->poly, f, singular_points(x, true), cfg.near_singular_split, cfg.quad_tol);
        total += p->value * r.value;
        err += std::abs(p->value) * r.err_est;
    }
    for (const Patch* p : g.lone) {
        auto f = [&](Vec2 y) { return psi2_point(x, y, M); };
        const quad::Result r =
            integrate_polygon(p->poly, f, singular_points(x, false), cfg.near_singular_split, cfg.quad_tol);
        total += p->value * r.value;
        err += std::abs(p->value) * r.err_est;
    }
    if (err > 100.0 * cfg.quad_tol)
        throw QuadratureError("stream_function: quadrature did not converge", err);
    return total;
}

Vec2 vel_patches(Vec2 x, const PatchSet& w, const KernelConfig& cfg) {
    const Groups g = group_patches(w);
    const int M = cfg.image_order;
    Vec2 total{};
    double err = 0.0;
    for (int comp = 0; comp < 2; ++comp) {
        double acc = 0.0;
        for (const Patch* p : g.right) {
            auto f = [&](Vec2 y) {
                const Vec2 u = vel4_point(x, y, M);
                return comp == 0 ? u.x : u.y;
            };
            const quad::Result r = integrate_polygon(p->poly, f, singular_points(x, true),
                                                     cfg.near_singular_split, cfg.quad_tol);
            acc += p->value * r.value;
            err += std::abs(p->value) * r.err_est;
        }
        for (const Patch* p : g.lone) {
            auto f = [&](Vec2 y) {
                const Vec2 u = vel2_point(x, y, M);
                return comp == 0 ? u.x : u.y;
            };
            const quad::Result r = integrate_polygon(p->poly, f, singular_points(x, false),
                                                     cfg.near_singular_split, cfg.quad_tol);
            acc += p->value * r.value;
            err += std::abs(p->value) * r.err_est;
        }
        (comp == 0 ? total.x : total.y) = acc;
    }
    if (err > 100.0 * cfg.quad_tol)
        throw QuadratureError("velocity: quadrature did not converge, achieved " +
                                  std::to_string(err),
                              err);
    return total;
}

// grid fields: integrate the bilinear reconstruction cell by cell over the
// right half (four-term kernel carries the mirror half)
template <typename PointKernel>
double grid_sum(Vec2 x, const VorticityField& w, const KernelConfig& cfg, PointKernel k) {
    const int half = w.nx / 2;
    const double tol_cell = cfg.quad_tol / (static_cast<double>(half) * w.ny);
    double total = 0.0;
    const std::vector<Vec2> sing = singular_points(x, true);
    for (int j = 0; j < w.ny; ++j) {
        for (int i = half; i < w.nx; ++i) {
            const double v00 = w.at(i, j), v10 = w.at(i + 1, j), v01 = w.at(i, j + 1),
                         v11 = w.at(i + 1, j + 1);
            if (v00 == 0.0 && v10 == 0.0 && v01 == 0.0 && v11 == 0.0) continue;
            const double xa = w.x1(i), xb = w.x1(i + 1), ya = w.x2(j), yb = w.x2(j + 1);
            auto dens = [&](Vec2 y) {
                const double tx = (y.x - xa) / (xb - xa), ty = (y.y - ya) / (yb - ya);
                return (1 - tx) * (1 - ty) * v00 + tx * (1 - ty) * v10 + (1 - tx) * ty * v01 +
                       tx * ty * v11;
            };
            auto f = [&](Vec2 y) { return dens(y) * k(x, y, cfg.image_order); };
            double dmin2 = std::numeric_limits<double>::max();
            for (const Vec2& s : sing) {
                const double dx = std::clamp(s.x, xa, xb) - s.x;
                const double dy = std::clamp(s.y, ya, yb) - s.y;
                dmin2 = std::min(dmin2, dx * dx + dy * dy);
            }
            const Triangle t1{{xa, ya}, {xb, ya}, {xb, yb}};
            const Triangle t2{{xa, ya}, {xb, yb}, {xa, yb}};
            if (dmin2 < 4.0 * (xb - xa) * (yb - ya)) {
                Polygon cell{{xa, ya}, {xb, ya}, {xb, yb}, {xa, yb}};
                total += integrate_polygon(cell, f, sing, cfg.near_singular_split, tol_cell).value;
            } else {
                total += quad::integrate_tri(f, t1, 0.5 * tol_cell, 8).value;
                total += quad::integrate_tri(f, t2, 0.5 * tol_cell, 8).value;
            }
        }
    }
    return total;
}

// ---- key integral: angular sweep with exact radial integration ----

// For one polygon, integrate (4/pi) y1 y2 / |y|^4 over {|y| > r, y1 > 0, y2 > 0}.
// In polar coordinates the radial factor integrates to ln(rho_out/rho_in) per
// ray segment, so only a 1D adaptive sweep over the angle is needed.
double key_integral_polygon(const Polygon& poly, double r, double tol) {
    std::vector<double> cuts{0.0, 0.5 * PI};
    for (const Vec2& v : poly) {
        if (v.x > 0.0 && v.y > 0.0) cuts.push_back(std::atan2(v.y, v.x));
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-15; }),
               cuts.end());

    auto ray_sum = [&](double phi) {
        const Vec2 dir{std::cos(phi), std::sin(phi)};
        std::vector<double> rhos;
        const size_t n = poly.size();
        for (size_t i = 0; i < n; ++i) {
            const Vec2 p = poly[i], q = poly[(i + 1) % n];
            const Vec2 d = q - p;
            const double den = cross(dir, d);
            if (std::abs(den) < 1e-300) continue;
            // p + t d = rho dir; crossing with dir gives t
            const double t = cross(p, dir) / den;
            if (t < 0.0 || t >= 1.0) continue;
            const double rho = dot(p + t * d, dir);
            if (rho > 1e-300) rhos.push_back(rho);
        }
        std::sort(rhos.begin(), rhos.end());
        double s = 0.0;
        for (size_t k = 0; k + 1 < rhos.size(); k += 2) {
            const double rin = std::max(rhos[k], r);
            const double rout = rhos[k + 1];
            if (rout > rin) s += std::log(rout / rin);
        }
        return std::sin(phi) * std::cos(phi) * s;
    };

    double total = 0.0;
    for (size_t k = 0; k + 1 < cuts.size(); ++k) {
        total += quad::integrate_1d(ray_sum, cuts[k], cuts[k + 1],
                                    tol / static_cast<double>(cuts.size()))
                     .value;
    }
    return 4.0 / PI * total;
}

} // namespace

double stream_function(Vec2 x, const PatchSet& w, const KernelConfig& cfg) {
    check_target(x);
    cfg.validate();
    w.validate(false);
    return psi_patches(x, w, cfg);
}

double stream_function(Vec2 x, const VorticityField& w, const KernelConfig& cfg) {
    check_target(x);
    cfg.validate();
    w.validate();
    return grid_sum(x, w, cfg,
                    [](Vec2 xx, Vec2 yy, int M) { return psi4_point(xx, yy, M); });
}

Vec2 velocity(Vec2 x, const PatchSet& w, const KernelConfig& cfg) {
    check_target(x);
    cfg.validate();
    w.validate(false);
    return vel_patches(x, w, cfg);
}

Vec2 velocity(Vec2 x, const VorticityField& w, const KernelConfig& cfg) {
    check_target(x);
    cfg.validate();
    w.validate();
    const double u1 = grid_sum(x, w, cfg, [](Vec2 xx, Vec2 yy, int M) {
        return vel4_point(xx, yy, M).x;
    });
    const double u2 = grid_sum(x, w, cfg, [](Vec2 xx, Vec2 yy, int M) {
        return vel4_point(xx, yy, M).y;
    });
    return {u1, u2};
}

double key_integral(double r, const PatchSet& w, const KernelConfig& cfg) {
    if (!(r >= 0.0)) throw std::invalid_argument("key_integral: r must be >= 0");
    cfg.validate();
    w.validate(false);
    if (w.patches.empty()) return 0.0;
    if (r >= w.support_radius()) return 0.0;
    double total = 0.0;
    for (const Patch& p : w.patches) {
        const BBox b = bounding_box(p.poly);
        if (b.xmax <= 0.0) continue; // Q(r) lies in the right half-strip
        total += p.value * key_integral_polygon(p.poly, r, cfg.quad_tol / w.patches.size());
    }
    return total;
}

double key_integral(double r, const VorticityField& w, const KernelConfig& cfg) {
    if (!(r >= 0.0)) throw std::invalid_argument("key_integral: r must be >= 0");
    cfg.validate();
    w.validate();
    const int half = w.nx / 2;
    const double tol_cell = cfg.quad_tol / (static_cast<double>(half) * w.ny);
    double total = 0.0;
    for (int j = 0; j < w.ny; ++j) {
        for (int i = half; i < w.nx; ++i) {
            const double v00 = w.at(i, j), v10 = w.at(i + 1, j), v01 = w.at(i, j + 1),
                         v11 = w.at(i + 1, j + 1);
            if (v00 == 0.0 && v10 == 0.0 && v01 == 0.0 && v11 == 0.0) continue;
            const double xa = w.x1(i), xb = w.x1(i + 1), ya = w.x2(j), yb = w.x2(j + 1);
            // cell fully inside the excluded ball: skip
            const double dmax2 = std::max(xa * xa, xb * xb) + std::max(ya * ya, yb * yb);
            if (dmax2 <= r * r) continue;
            auto f = [&](Vec2 y) {
                if (y.x <= 0.0 || y.y <= 0.0) return 0.0;
                const double q2 = norm2(y);
                if (q2 <= r * r) return 0.0;
                const double tx = (y.x - xa) / (xb - xa), ty = (y.y - ya) / (yb - ya);
                const double dens = (1 - tx) * (1 - ty) * v00 + tx * (1 - ty) * v10 +
                                    (1 - tx) * ty * v01 + tx * ty * v11;
                return dens * y.x * y.y / (q2 * q2);
            };
            const double dmin2 = std::min(xa * xa, xb * xb) + std::min(ya * ya, yb * yb);
            const bool cut = dmin2 < r * r || i == half || j == 0;
            const Triangle t1{{xa, ya}, {xb, ya}, {xb, yb}};
            const Triangle t2{{xa, ya}, {xb, yb}, {xa, yb}};
            const int depth = cut ? 20 : 10;
            total += quad::integrate_tri(f, t1, 0.5 * tol_cell, depth).value;
            total += quad::integrate_tri(f, t2, 0.5 * tol_cell, depth).value;
        }
    }
    return 4.0 / PI * total;
}

double h_function(double s, const KernelConfig& cfg) {
    if (!(s > 0.0) || s >= std::exp(-4.0))
        throw std::invalid_argument("h_function: s must lie in (0, e^-4)");
    return h_function_log(std::log(s), cfg);
}

double h_function_log(double ln_s, const KernelConfig& cfg) {
    if (!(ln_s < -4.0)) throw std::invalid_argument("h_function_log: need ln s < -4");
    cfg.validate();
    const double sq = std::sqrt(-ln_s);
    // ln sqrt(s^2 + g(s)^2) = ln s + sqrt(-ln s) + 0.5*log1p(exp(-2*sqrt(-ln s)))
    const double ln_rs = ln_s + sq + 0.5 * std::log1p(std::exp(-2.0 * sq));

    // sin^2 of the envelope crossing angle at radius e^tau, solved in
    // t = -ln cos(phi):  0.5*ln(1-e^{-2t}) + t = sqrt(t - tau)
    auto sin2_phimax = [](double tau) {
        auto F = [&](double t) {
            return 0.5 * std::log1p(-std::exp(-2.0 * t)) + t - std::sqrt(t - tau);
        };
        double lo = 1e-300, hi = 2.0 + std::sqrt(-tau) + 2.0 * std::sqrt(std::sqrt(-tau));
        while (F(hi) < 0.0) hi *= 2.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (F(mid) < 0.0) lo = mid; else hi = mid;
            if (hi - lo < 1e-16 * hi) break;
        }
        const double t = 0.5 * (lo + hi);
        return -std::expm1(-2.0 * t);
    };

    const quad::Result r = quad::integrate_1d(
        [&](double tau) { return 0.5 * sin2_phimax(tau); }, ln_rs, -1.0, cfg.quad_tol);
    return 4.0 / PI * r.value / (-ln_s);
}

namespace {

template <typename W>
std::pair<double, double> b_decompose_impl(Vec2 x, const W& w, const KernelConfig& cfg) {
    if (!(x.x > 0.0) || !(x.y > 0.0))
        throw std::invalid_argument("b_decompose: requires x1 > 0 and x2 > 0");
    if (norm(x) >= 0.5)
        throw std::invalid_argument("b_decompose: requires |x| < 1/2");
    const Vec2 u = velocity(x, w, cfg);
    const double I = key_integral(norm(x), w, cfg);
    return {-u.x / x.x - I, u.y / x.y - I};
}

} // namespace

std::pair<double, double> b_decompose(Vec2 x, const PatchSet& w, const KernelConfig& cfg) {
    return b_decompose_impl(x, w, cfg);
}

std::pair<double, double> b_decompose(Vec2 x, const VorticityField& w, const KernelConfig& cfg) {
    return b_decompose_impl(x, w, cfg);
}

} // namespace stripflow::kernel
