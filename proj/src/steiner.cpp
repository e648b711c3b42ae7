#include "stripflow/steiner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace stripflow::steiner {

using nlohmann::json;

namespace {

double trans_coord(Vec2 v, Axis a) { return a == Axis::e2 ? v.x : v.y; }
double spread_coord(Vec2 v, Axis a) { return a == Axis::e2 ? v.y : v.x; }
Vec2 compose(double t, double s, Axis a) { return a == Axis::e2 ? Vec2{t, s} : Vec2{s, t}; }

} // namespace

void PlanarRegion::validate() const {
    double total = 0.0;
    for (const Polygon& p : polygons) {
        if (p.size() < 3) throw std::invalid_argument("PlanarRegion: polygon with < 3 vertices");
        for (const Vec2& v : p)
            if (!std::isfinite(v.x) || !std::isfinite(v.y))
                throw std::invalid_argument("PlanarRegion: non-finite vertex");
        total += signed_area(p);
    }
    if (!(total > 0.0)) throw std::invalid_argument("PlanarRegion: total signed area must be > 0");
}

double PlanarRegion::area() const {
    double a = 0.0;
    for (const Polygon& p : polygons) a += signed_area(p);
    return a;
}

double PlanarRegion::perimeter() const {
    double s = 0.0;
    for (const Polygon& p : polygons) s += stripflow::perimeter(p);
    return s;
}

PlanarRegion PlanarRegion::load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    in >> j;
    PlanarRegion r;
    for (const auto& jp : j.at("polygons")) {
        Polygon p;
        for (const auto& v : jp.at("vertices"))
            p.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
        r.polygons.push_back(std::move(p));
    }
    return r;
}

void PlanarRegion::save_json(const std::string& path) const {
    json j;
    j["polygons"] = json::array();
    for (const Polygon& p : polygons) {
        json jp;
        jp["vertices"] = json::array();
        for (const Vec2& v : p) jp["vertices"].push_back({v.x, v.y});
        j["polygons"].push_back(std::move(jp));
    }
    std::ofstream out(path);
    out << j.dump(2) << "\n";
}

double slice_measure(const PlanarRegion& A, Axis axis, double c) {
    struct Ev {
        double t;
        int d;
    };
    std::vector<Ev> evs;
    for (const Polygon& p : A.polygons) {
        const int orient = signed_area(p) >= 0.0 ? 1 : -1;
        std::vector<double> cr;
        const size_t n = p.size();
        for (size_t i = 0; i < n; ++i) {
            const Vec2 u = p[i], v = p[(i + 1) % n];
            const double a = trans_coord(u, axis), b = trans_coord(v, axis);
            if ((a <= c) == (b <= c)) continue;
            const double t = (c - a) / (b - a);
            cr.push_back(spread_coord(u, axis) + t * (spread_coord(v, axis) - spread_coord(u, axis)));
        }
        std::sort(cr.begin(), cr.end());
        for (size_t k = 0; k + 1 < cr.size(); k += 2) {
            evs.push_back({cr[k], orient});
            evs.push_back({cr[k + 1], -orient});
        }
    }
    std::sort(evs.begin(), evs.end(), [](const Ev& a, const Ev& b) { return a.t < b.t; });
    double len = 0.0, last = 0.0;
    int cov = 0;
    for (const Ev& e : evs) {
        if (cov > 0) len += e.t - last;
        cov += e.d;
        last = e.t;
    }
    return len;
}

double WidthProfile::integral() const {
    double s = 0.0;
    for (size_t k = 0; k + 1 < breakpoints.size(); ++k)
        s += 0.5 * (left[k] + right[k]) * (breakpoints[k + 1] - breakpoints[k]);
    return s;
}

double WidthProfile::support_max() const {
    for (size_t k = breakpoints.size(); k-- > 1;) {
        const size_t seg = k - 1;
        if (std::max(left[seg], right[seg]) > 0.0) return breakpoints[k];
    }
    return breakpoints.empty() ? 0.0 : breakpoints.front();
}

double WidthProfile::value_at(double c) const {
    for (size_t k = 0; k + 1 < breakpoints.size(); ++k) {
        if (c >= breakpoints[k] && c <= breakpoints[k + 1]) {
            const double den = breakpoints[k + 1] - breakpoints[k];
            if (den <= 0.0) return left[k];
            const double t = (c - breakpoints[k]) / den;
            return left[k] + t * (right[k] - left[k]);
        }
    }
    return 0.0;
}

namespace {

WidthProfile make_profile(const PlanarRegion& A, Axis axis) {
    WidthProfile wp;
    wp.axis = axis;
    std::vector<double> bs;
    for (const Polygon& p : A.polygons)
        for (const Vec2& v : p) bs.push_back(trans_coord(v, axis));
    std::sort(bs.begin(), bs.end());
    if (bs.empty()) return wp;
    const double span = std::max(bs.back() - bs.front(), 1e-300);
    std::vector<double> uniq{bs.front()};
    for (double b : bs)
        if (b - uniq.back() > 1e-13 * span) uniq.push_back(b);
    wp.breakpoints = uniq;
    const size_t nseg = uniq.size() >= 1 ? uniq.size() - 1 : 0;
    wp.left.resize(nseg);
    wp.right.resize(nseg);
    for (size_t k = 0; k < nseg; ++k) {
        const double a = uniq[k], b = uniq[k + 1];
        const double c1 = a + (b - a) / 3.0, c2 = a + 2.0 * (b - a) / 3.0;
        const double w1 = slice_measure(A, axis, c1), w2 = slice_measure(A, axis, c2);
        // width is linear inside the gap: extrapolate to one-sided endpoint values
        wp.left[k] = std::max(0.0, w1 - (w2 - w1));
        wp.right[k] = std::max(0.0, w2 + (w2 - w1));
    }
    return wp;
}

PlanarRegion region_from_profile(const WidthProfile& wp) {
    PlanarRegion out;
    const size_t nseg = wp.left.size();
    const double scale = wp.integral();
    const double wtol = 1e-14 * std::max(1.0, scale);

    size_t k = 0;
    while (k < nseg) {
        if (std::max(wp.left[k], wp.right[k]) <= wtol) { ++k; continue; }
        // run of connected positive segments
        size_t end = k;
        while (end + 1 < nseg && std::max(wp.left[end + 1], wp.right[end + 1]) > wtol &&
               !(wp.right[end] <= wtol && wp.left[end + 1] <= wtol) && wp.right[end] > wtol)
            ++end;
        std::vector<Vec2> top;
        auto push_top = [&](double b, double w) {
            const Vec2 v = compose(b, 0.5 * w, wp.axis);
            if (top.empty() || norm2(v - top.back()) > 0.0) top.push_back(v);
        };
        for (size_t s = k; s <= end; ++s) {
            push_top(wp.breakpoints[s], wp.left[s]);
            push_top(wp.breakpoints[s + 1], wp.right[s]);
        }
        Polygon poly;
        for (const Vec2& v : top) poly.push_back(v);
        for (size_t i = top.size(); i-- > 0;) {
            const Vec2 m = compose(trans_coord(top[i], wp.axis),
                                   -spread_coord(top[i], wp.axis), wp.axis);
            if (norm2(m - poly.back()) > 0.0 && norm2(m - poly.front()) > 0.0) poly.push_back(m);
        }
        if (poly.size() >= 3) {
            make_ccw(poly);
            out.polygons.push_back(std::move(poly));
        }
        k = end + 1;
    }
    return out;
}

} // namespace

SymmetrizeResult steiner_symmetrize(const PlanarRegion& A, Axis axis) {
    A.validate();
    SymmetrizeResult r;
    r.profile = make_profile(A, axis);
    r.region = region_from_profile(r.profile);
    return r;
}

TildeRegions build_tilde_regions(const Polygon& fluid_in, double R) {
    if (fluid_in.size() < 3) throw std::invalid_argument("build_tilde_regions: degenerate polygon");
    const double eps = 1e-9 * R;
    for (const Vec2& v : fluid_in)
        if (std::abs(v.x) > R + eps)
            throw std::invalid_argument("build_tilde_regions: input crosses {|x1| = R}");

    Polygon fluid = fluid_in;
    make_ccw(fluid);

    // D_plus: fluid above the reference level x2 = 2
    const std::vector<Polygon> dplus = clip_halfplane(fluid, {0.0, -1.0}, -2.0);

    // air region above the interface: extract the interface chain.
    // contract: boundary = bottom run on {x2=0}, lateral runs on {x1=+-R},
    // and the free-surface chain between the lateral tops.
    const size_t n = fluid.size();
    size_t start = n;
    for (size_t i = 0; i < n; ++i) {
        const Vec2& a = fluid[i];
        const Vec2& b = fluid[(i + 1) % n];
        // bottom edge heading right ends at (R, 0)
        if (std::abs(a.y) < eps && std::abs(b.y) < eps && b.x > a.x) start = (i + 1) % n;
    }
    if (start == n)
        throw std::invalid_argument("build_tilde_regions: fluid polygon has no bottom edge");
    // walk the right lateral up, then collect the interface until the left lateral
    size_t i = start;
    while (std::abs(fluid[(i + 1) % n].x - R) < eps) i = (i + 1) % n;
    std::vector<Vec2> chain; // right -> left
    chain.push_back(fluid[i]);
    size_t guard = 0;
    size_t j = (i + 1) % n;
    while (std::abs(fluid[j].x + R) > eps) {
        chain.push_back(fluid[j]);
        j = (j + 1) % n;
        if (++guard > n) throw std::invalid_argument("build_tilde_regions: malformed boundary");
    }
    chain.push_back(fluid[j]);

    double hmax = 2.5;
    for (const Vec2& v : chain) hmax = std::max(hmax, v.y);
    Polygon air;
    for (size_t k = chain.size(); k-- > 0;) air.push_back(chain[k]); // left -> right
    air.push_back({R, hmax + 1.0});
    air.push_back({-R, hmax + 1.0});
    const std::vector<Polygon> dminus = clip_halfplane(air, {0.0, 1.0}, 2.0);

    TildeRegions out;
    for (const Polygon& p : dplus) {
        Polygon up = translated(p, {0.0, -2.0});
        make_ccw(up);
        Polygon dn = reflected_y(up, 0.0);
        make_ccw(dn);
        out.plus.polygons.push_back(std::move(up));
        out.plus.polygons.push_back(std::move(dn));
    }
    for (const Polygon& p : dminus) {
        Polygon up = reflected_y(p, 1.0); // y -> 2 - y
        make_ccw(up);
        Polygon dn = reflected_y(up, 0.0);
        make_ccw(dn);
        out.minus.polygons.push_back(std::move(up));
        out.minus.polygons.push_back(std::move(dn));
    }
    return out;
}

std::pair<double, double> potential_energy_graph(const GraphInterface& phi, double sigma,
                                                 double grav) {
    if (!(sigma > 0.0) || !(grav > 0.0))
        throw std::invalid_argument("potential_energy_graph: sigma, grav must be > 0");
    double p1 = 0.0, p2 = 0.0;
    for (size_t k = 0; k + 1 < phi.samples.size(); ++k) {
        const Vec2 a = phi.samples[k], b = phi.samples[k + 1];
        const double dx = b.x - a.x;
        if (dx <= 0.0) throw std::invalid_argument("potential_energy_graph: x must increase");
        p1 += std::hypot(dx, b.y - a.y) - dx;
        p2 += dx * (a.y * a.y + a.y * b.y + b.y * b.y) / 3.0;
    }
    return {sigma * p1, 0.5 * grav * p2};
}

Case1Report case1_chain(const GraphInterface& phi, double sigma, double grav) {
    Case1Report rep;
    const auto& s = phi.samples;
    if (s.size() < 2) throw std::invalid_argument("case1_chain: need >= 2 samples");

    double maxphi = 0.0;
    size_t imax = 0;
    for (size_t k = 0; k < s.size(); ++k)
        if (s[k].y > maxphi) { maxphi = s[k].y; imax = k; }
    rep.hypothesis_met = maxphi >= 0.5 - 1e-12;
    if (!rep.hypothesis_met) return rep;

    if (std::abs(s.front().y) > 1e-12 || std::abs(s.back().y) > 1e-12)
        throw std::invalid_argument("case1_chain: samples must start and end at phi = 0");

    // bracket [x0, x1]: from the last phi = 1/2 crossing to the next phi = 1/4
    // crossing right of the maximum; phi stays within [1/4, 1/2] on it
    auto cross_at = [&](size_t k, double level) {
        const Vec2 a = s[k], b = s[k + 1];
        return a.x + (level - a.y) / (b.y - a.y) * (b.x - a.x);
    };
    double x0 = s[imax].x, x1 = s[imax].x;
    bool found = false;
    for (size_t k = imax; k + 1 < s.size(); ++k) {
        if (s[k].y > 0.25 && s[k + 1].y <= 0.25) {
            x1 = cross_at(k, 0.25);
            for (size_t j = k + 1; j-- > 0;) {
                if (s[j].y >= 0.5) { x0 = cross_at(j, 0.5); break; }
            }
            found = true;
            break;
        }
    }
    if (!found) {
        rep.hypothesis_met = false;
        return rep;
    }
    const double Rhat = x1 - x0;

    // exact piecewise integrals over [x0, x1]
    auto seg_overlap = [&](double a, double b) {
        const double lo = std::max(a, x0), hi = std::min(b, x1);
        return std::max(0.0, hi - lo);
    };
    double int_absphip = 0.0, int_min = 0.0, int_A = 0.0, int_B = 0.0;
    double min_pointwise_slack = std::numeric_limits<double>::max();
    const double c_ineq = 1.0 / (1.0 + std::sqrt(2.0));
    for (size_t k = 0; k + 1 < s.size(); ++k) {
        const double dx = s[k + 1].x - s[k].x;
        if (dx <= 0.0) continue;
        const double q = (s[k + 1].y - s[k].y) / dx;
        const double ov = seg_overlap(s[k].x, s[k + 1].x);
        const double mn = std::min(std::abs(q), q * q);
        min_pointwise_slack = std::min(
            min_pointwise_slack, std::sqrt(1.0 + q * q) - 1.0 - c_ineq * mn);
        if (ov <= 0.0) continue;
        int_absphip += ov * std::abs(q);
        int_min += ov * mn;
        if (std::abs(q) >= 1.0) int_A += ov * std::abs(q);
        else int_B += ov * std::abs(q);
    }
    const auto [P1, P2] = potential_energy_graph(phi, sigma, grav);
    const double P = P1 + P2;

    auto add_step = [&](const std::string& name, double lhs, double rhs) {
        ChainStep st{name, lhs, rhs, lhs - rhs, lhs >= rhs - 1e-12};
        rep.steps.push_back(st);
    };
    add_step("pointwise sqrt(1+q^2)-1 >= min(|q|,q^2)/(1+sqrt2)", min_pointwise_slack, 0.0);
    add_step("drop of 1/4 across bracket: int |phi'| >= 1/4", int_absphip, 0.25);
    add_step("split bound: int_A + int_B <= int_min + sqrt(R int_min)",
             int_min + std::sqrt(std::max(0.0, Rhat * int_min)), int_A + int_B);
    add_step("AM-GM: <= (3/2) int_min + R/2",
             1.5 * int_min + 0.5 * Rhat, int_min + std::sqrt(std::max(0.0, Rhat * int_min)));
    add_step("surface energy: int_min <= (1+sqrt2)/sigma * P1",
             (1.0 + std::sqrt(2.0)) / sigma * P1, int_min);
    add_step("gravity floor: P2 >= R g/32", P2, Rhat * grav / 32.0);

    rep.final_product = P * 4.0 * std::min(3.0 * (1.0 + std::sqrt(2.0)) / (2.0 * sigma), 16.0 / grav);
    bool all = rep.final_product >= 1.0 - 1e-12;
    for (const ChainStep& st : rep.steps) all = all && st.holds;
    rep.passes = all;
    return rep;
}

namespace {

struct Excess {
    double above = 0.0; // sum over arcs above level 2 of (len - |dx|)
    double below = 0.0;
};

Excess interface_excess(const std::vector<Vec2>& curve) {
    Excess e;
    // walk segments, splitting at level-2 crossings; accumulate per-arc
    double arc_len = 0.0, arc_x0 = 0.0, arc_x1 = 0.0;
    int arc_side = 0; // +1 above, -1 below, 0 none
    auto flush = [&]() {
        if (arc_side == 0) return;
        const double ex = arc_len - std::abs(arc_x1 - arc_x0);
        if (arc_side > 0) e.above += ex;
        else e.below += ex;
        arc_side = 0;
        arc_len = 0.0;
    };
    auto feed = [&](Vec2 a, Vec2 b, int side) {
        if (side == 0 || norm2(b - a) == 0.0) return;
        if (arc_side != side) {
            flush();
            arc_side = side;
            arc_len = 0.0;
            arc_x0 = a.x;
        }
        arc_len += norm(b - a);
        arc_x1 = b.x;
    };
    for (size_t k = 0; k + 1 < curve.size(); ++k) {
        Vec2 a = curve[k], b = curve[k + 1];
        const double sa = a.y - 2.0, sb = b.y - 2.0;
        if ((sa >= 0.0) == (sb >= 0.0)) {
            feed(a, b, sa == 0.0 && sb == 0.0 ? 0 : (sa + sb > 0.0 ? 1 : -1));
        } else {
            const double t = sa / (sa - sb);
            const Vec2 m = a + t * (b - a);
            feed(a, m, sa > 0.0 ? 1 : -1);
            feed(m, b, sb > 0.0 ? 1 : -1);
        }
    }
    flush();
    return e;
}

// length and x2-moment of the upper boundary graph of a both-axes-symmetric
// profile region (vertical slice [-v/2, v/2] at x1 = b)
struct GraphEnergy {
    double excess = 0.0; // boundary length above the axis minus support width
    double moment = 0.0; // integral of x2 over the upper half
};

GraphEnergy profile_energy(const WidthProfile& wp) {
    GraphEnergy ge;
    const size_t nseg = wp.left.size();
    double len = 0.0, support = 0.0;
    double prev_h = 0.0;
    bool in_support = false;
    for (size_t k = 0; k < nseg; ++k) {
        const double hL = 0.5 * wp.left[k], hR = 0.5 * wp.right[k];
        const double db = wp.breakpoints[k + 1] - wp.breakpoints[k];
        const bool pos = std::max(hL, hR) > 0.0;
        if (pos) {
            if (!in_support) {
                len += hL; // terminal rise from the axis
                in_support = true;
            } else {
                len += std::abs(hL - prev_h); // jump
            }
            len += std::hypot(db, hR - hL);
            support += db;
            // moment of upper half: int (v/2)^2/2 db, v/2 linear from hL to hR
            ge.moment += db * (hL * hL + hL * hR + hR * hR) / 6.0;
            prev_h = hR;
        } else if (in_support) {
            len += prev_h; // terminal drop
            in_support = false;
            prev_h = 0.0;
        }
    }
    if (in_support) len += prev_h;
    ge.excess = len - support;
    return ge;
}

} // namespace

Case2Report case2_lower_bound(const std::vector<Vec2>& curve, double R, double delta,
                              double sigma, double grav) {
    Case2Report rep;
    if (curve.size() < 2) throw std::invalid_argument("case2_lower_bound: need a polyline");
    if (!(delta > 0.0) || !(sigma > 0.0) || !(grav > 0.0))
        throw std::invalid_argument("case2_lower_bound: delta, sigma, grav must be > 0");

    const double eps = 1e-9 * R;
    if (std::abs(curve.front().x + R) > eps || std::abs(curve.back().x - R) > eps) {
        rep.message = "interface must span x1 = -R .. R";
        return rep;
    }
    for (const Vec2& v : curve) {
        if (v.y <= 0.0) {
            rep.message = "interface touches the bottom";
            return rep;
        }
    }
    // lateral sections: {+-R}x(0,2-delta] inside the fluid, top within 2+delta
    if (std::abs(curve.front().y - 2.0) > delta || std::abs(curve.back().y - 2.0) > delta) {
        rep.message = "lateral sections violate {+-R}x(0,2-delta] within (0,2+delta)";
        return rep;
    }
    rep.precondition_met = true;

    // fluid polygon below the curve
    Polygon fluid;
    fluid.push_back({-R, 0.0});
    fluid.push_back({R, 0.0});
    for (size_t k = curve.size(); k-- > 0;) fluid.push_back(curve[k]);

    const TildeRegions tr = build_tilde_regions(fluid, R);

    const Excess ex = interface_excess(curve);
    double mom_plus = 0.0, mom_minus = 0.0, x2s = 0.0;
    for (const Polygon& p : tr.plus.polygons) {
        const double m = moment_y(p);
        if (m > 0.0) mom_plus += m; // upper copies carry the moment of D+ - 2
    }
    for (const Polygon& p : tr.minus.polygons) {
        const double m = moment_y(p);
        if (m > 0.0) mom_minus += m;
        for (const Vec2& v : p) x2s = std::max(x2s, v.y);
    }
    rep.x2_star_before = x2s;

    auto symmetrized_energy = [&](const PlanarRegion& reg, double& x2_after, bool track) {
        if (reg.polygons.empty()) {
            if (track) x2_after = 0.0;
            return GraphEnergy{};
        }
        const SymmetrizeResult s1 = steiner_symmetrize(reg, Axis::e1);
        if (track) x2_after = s1.profile.support_max();
        if (s1.region.polygons.empty()) return GraphEnergy{};
        const SymmetrizeResult s2 = steiner_symmetrize(s1.region, Axis::e2);
        rep.upper_boundary_is_graph = true; // vertical slices are centered intervals
        return profile_energy(s2.profile);
    };

    double x2_after = 0.0, dummy = 0.0;
    const GraphEnergy gp = symmetrized_energy(tr.plus, dummy, false);
    const GraphEnergy gm = symmetrized_energy(tr.minus, x2_after, true);
    rep.x2_star_after = x2_after;

    rep.surface_slack_plus = ex.above + 2.0 * delta - gp.excess;
    rep.surface_slack_minus = ex.below + 2.0 * delta - gm.excess;
    rep.gravity_slack_plus = mom_plus - gp.moment;
    rep.gravity_slack_minus = mom_minus - gm.moment;

    rep.lhs = sigma * (ex.above + ex.below) + grav * (mom_plus + mom_minus);
    rep.rhs = sigma * (gp.excess + gm.excess) + grav * (gp.moment + gm.moment) -
              4.0 * delta * sigma;
    rep.slack = rep.lhs - rep.rhs;
    rep.passes = rep.slack >= -1e-12;
    return rep;
}

} // namespace stripflow::steiner
