#include "stripflow/geometry.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace stripflow {

double signed_area(const Polygon& p) {
    double a = 0.0;
    const size_t n = p.size();
    for (size_t i = 0; i < n; ++i) {
        const Vec2& u = p[i];
        const Vec2& v = p[(i + 1) % n];
        a += cross(u, v);
    }
    return 0.5 * a;
}

double perimeter(const Polygon& p) {
    double s = 0.0;
    const size_t n = p.size();
    for (size_t i = 0; i < n; ++i) s += norm(p[(i + 1) % n] - p[i]);
    return s;
}

BBox bounding_box(const Polygon& p) {
    BBox b{std::numeric_limits<double>::max(), -std::numeric_limits<double>::max(),
           std::numeric_limits<double>::max(), -std::numeric_limits<double>::max()};
    for (const Vec2& v : p) {
        b.xmin = std::min(b.xmin, v.x);
        b.xmax = std::max(b.xmax, v.x);
        b.ymin = std::min(b.ymin, v.y);
        b.ymax = std::max(b.ymax, v.y);
    }
    return b;
}

double moment_y(const Polygon& p) {
    // Green's theorem with L = -x2^2/2: integral of x2 over interior
    double m = 0.0;
    const size_t n = p.size();
    for (size_t i = 0; i < n; ++i) {
        const Vec2& u = p[i];
        const Vec2& v = p[(i + 1) % n];
        const double dx = v.x - u.x;
        m -= dx * (u.y * u.y + u.y * v.y + v.y * v.y) / 6.0;
    }
    return m;
}

void make_ccw(Polygon& p) {
    if (signed_area(p) < 0.0) std::reverse(p.begin(), p.end());
}

bool point_in_polygon(Vec2 q, const Polygon& p) {
    bool inside = false;
    const size_t n = p.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = p[i];
        const Vec2& b = p[j];
        if ((a.y > q.y) != (b.y > q.y)) {
            const double xc = a.x + (q.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (q.x < xc) inside = !inside;
        }
    }
    return inside;
}

double dist2_point_segment(Vec2 q, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len2 = norm2(ab);
    double t = len2 > 0.0 ? dot(q - a, ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return norm2(q - (a + t * ab));
}

double dist2_point_polygon_boundary(Vec2 q, const Polygon& p) {
    double d = std::numeric_limits<double>::max();
    const size_t n = p.size();
    for (size_t i = 0; i < n; ++i)
        d = std::min(d, dist2_point_segment(q, p[i], p[(i + 1) % n]));
    return d;
}

namespace {

bool ear_contains(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& q) {
    const double d1 = cross(b - a, q - a);
    const double d2 = cross(c - b, q - b);
    const double d3 = cross(a - c, q - c);
    return d1 >= 0 && d2 >= 0 && d3 >= 0;
}

} // namespace

std::vector<Triangle> triangulate(const Polygon& poly) {
    Polygon p = poly;
    make_ccw(p);
    std::vector<Triangle> out;
    if (p.size() < 3) return out;
    std::vector<size_t> idx(p.size());
    for (size_t i = 0; i < p.size(); ++i) idx[i] = i;

    size_t guard = 0;
    while (idx.size() > 3) {
        bool clipped = false;
        const size_t m = idx.size();
        for (size_t i = 0; i < m; ++i) {
            const Vec2& a = p[idx[(i + m - 1) % m]];
            const Vec2& b = p[idx[i]];
            const Vec2& c = p[idx[(i + 1) % m]];
            if (cross(b - a, c - b) <= 0) continue; // reflex or degenerate
            bool ear = true;
            for (size_t j = 0; j < m; ++j) {
                if (j == i || j == (i + m - 1) % m || j == (i + 1) % m) continue;
                if (ear_contains(a, b, c, p[idx[j]])) { ear = false; break; }
            }
            if (!ear) continue;
            out.push_back({a, b, c});
            idx.erase(idx.begin() + static_cast<long>(i));
            clipped = true;
            break;
        }
        if (!clipped) {
            // fallback for degenerate (collinear runs): drop the flattest corner
            size_t best = 0;
            double bestc = std::numeric_limits<double>::max();
            for (size_t i = 0; i < idx.size(); ++i) {
                const size_t m2 = idx.size();
                const Vec2& a = p[idx[(i + m2 - 1) % m2]];
                const Vec2& b = p[idx[i]];
                const Vec2& c = p[idx[(i + 1) % m2]];
                const double cc = std::abs(cross(b - a, c - b));
                if (cc < bestc) { bestc = cc; best = i; }
            }
            idx.erase(idx.begin() + static_cast<long>(best));
        }
        if (++guard > 4 * poly.size() * poly.size() + 64)
            throw std::runtime_error("triangulate: did not terminate (polygon not simple?)");
    }
    if (idx.size() == 3) out.push_back({p[idx[0]], p[idx[1]], p[idx[2]]});
    return out;
}

std::vector<Polygon> clip_halfplane(const Polygon& poly, Vec2 nrm, double c) {
    // Split the boundary into chains inside {dot(n,p) <= c}, then stitch the
    // chains along the cut line ordered by the tangential coordinate.
    const size_t n = poly.size();
    if (n < 3) return {};
    auto side = [&](const Vec2& v) { return dot(nrm, v) - c; };

    // gather chains of the inside part of the boundary
    struct Chain { std::vector<Vec2> pts; };
    std::vector<Chain> chains;
    // find a starting vertex that is strictly outside; if none, polygon is inside
    size_t start = n;
    for (size_t i = 0; i < n; ++i)
        if (side(poly[i]) > 0) { start = i; break; }
    if (start == n) return {poly};

    Polygon p = poly;
    make_ccw(p);
    for (size_t i = 0; i < n; ++i)
        if (side(p[i]) > 0) { start = i; break; }

    Chain cur;
    bool in_chain = false;
    for (size_t k = 0; k <= n; ++k) {
        const Vec2 a = p[(start + k) % n];
        const Vec2 b = p[(start + k + 1) % n];
        const double sa = side(a), sb = side(b);
        if (sa <= 0) {
            if (!in_chain) { cur = Chain{}; in_chain = true; }
            cur.pts.push_back(a);
        }
        if (k == n) break;
        if ((sa <= 0) != (sb <= 0)) {
            const double t = sa / (sa - sb);
            const Vec2 x = a + t * (b - a);
            if (!in_chain) { cur = Chain{}; in_chain = true; }
            cur.pts.push_back(x);
            if (sb > 0) { chains.push_back(cur); in_chain = false; }
        }
    }
    if (in_chain && !cur.pts.empty()) chains.push_back(cur);

    if (chains.empty()) return {};

    // Each chain starts and ends on the cut line. The clipped pieces close by
    // running along the cut in the +tang direction (inside on the left): from a
    // chain's exit the piece continues into the chain whose ENTRY is the
    // nearest event at t >= t_exit; when that entry belongs to the cycle's
    // first chain the piece closes.
    const Vec2 tang{-nrm.y, nrm.x};
    std::vector<double> t_entry(chains.size());
    for (size_t i = 0; i < chains.size(); ++i) t_entry[i] = dot(tang, chains[i].pts.front());
    const double span = [&] {
        double lo = t_entry[0], hi = t_entry[0];
        for (double t : t_entry) { lo = std::min(lo, t); hi = std::max(hi, t); }
        return std::max(hi - lo, 1e-30);
    }();
    const double teps = 1e-12 * span;

    std::vector<bool> used(chains.size(), false);
    std::vector<Polygon> out;
    for (size_t s = 0; s < chains.size(); ++s) {
        if (used[s]) continue;
        Polygon cyc;
        const size_t first_id = s;
        size_t cur_id = s;
        size_t guard = 0;
        while (true) {
            used[cur_id] = true;
            const auto& pts = chains[cur_id].pts;
            cyc.insert(cyc.end(), pts.begin(), pts.end());
            const double texit = dot(tang, pts.back());
            double best = std::numeric_limits<double>::max();
            size_t best_id = chains.size();
            for (size_t i = 0; i < chains.size(); ++i) {
                if (i != first_id && used[i]) continue;
                if (i == cur_id) continue;
                if (t_entry[i] >= texit - teps && t_entry[i] < best) {
                    best = t_entry[i];
                    best_id = i;
                }
            }
            if (best_id == chains.size() || best_id == first_id || used[best_id]) break;
            cur_id = best_id;
            if (++guard > chains.size() + 2) break;
        }
        // drop duplicate consecutive points and degenerate slivers
        Polygon clean;
        for (const Vec2& v : cyc) {
            if (clean.empty() || norm2(v - clean.back()) > 1e-28) clean.push_back(v);
        }
        while (clean.size() > 1 && norm2(clean.front() - clean.back()) <= 1e-28) clean.pop_back();
        const BBox bb = bounding_box(poly);
        const double scale2 = (bb.xmax - bb.xmin + bb.ymax - bb.ymin) *
                              (bb.xmax - bb.xmin + bb.ymax - bb.ymin);
        if (clean.size() >= 3 && std::abs(signed_area(clean)) > 1e-14 * std::max(scale2, 1e-30))
            out.push_back(clean);
    }
    return out;
}

Polygon translated(const Polygon& p, Vec2 d) {
    Polygon q = p;
    for (Vec2& v : q) v = v + d;
    return q;
}

Polygon reflected_y(const Polygon& p, double level) {
    Polygon q = p;
    for (Vec2& v : q) v.y = 2.0 * level - v.y;
    std::reverse(q.begin(), q.end());
    return q;
}

Polygon reflected_x(const Polygon& p) {
    Polygon q = p;
    for (Vec2& v : q) v.x = -v.x;
    std::reverse(q.begin(), q.end());
    return q;
}

} // namespace stripflow
