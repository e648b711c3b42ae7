#include "stripflow/quadrature.hpp"

#include <array>
#include <cmath>

namespace stripflow::quad {

namespace {

// Gauss-Legendre nodes/weights on [-1,1]
constexpr std::array<double, 4> GX8 = {0.1834346424956498, 0.5255324099163290,
                                       0.7966664774136267, 0.9602898564975363};
constexpr std::array<double, 4> GW8 = {0.3626837833783620, 0.3137066458778873,
                                       0.2223810344533745, 0.1012285362903763};
constexpr std::array<double, 8> GX16 = {0.0950125098376374, 0.2816035507792589,
                                        0.4580167776572274, 0.6178762444026438,
                                        0.7554044083550030, 0.8656312023878318,
                                        0.9445750230732326, 0.9894009349916499};
constexpr std::array<double, 8> GW16 = {0.1894506104550685, 0.1826034150449236,
                                        0.1691565193950025, 0.1495959888165767,
                                        0.1246289712555339, 0.0951585116824928,
                                        0.0622535239386479, 0.0271524594117541};

double gauss8(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < 4; ++i) s += GW8[i] * (f(c + h * GX8[i]) + f(c - h * GX8[i]));
    return s * h;
}

double gauss16(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < 8; ++i) s += GW16[i] * (f(c + h * GX16[i]) + f(c - h * GX16[i]));
    return s * h;
}

void adapt_1d(const std::function<double(double)>& f, double a, double b, double tol,
              int depth, Result& out) {
    const double i8 = gauss8(f, a, b);
    const double i16 = gauss16(f, a, b);
    const double err = std::abs(i16 - i8);
    if (err <= tol || depth <= 0) {
        out.value += i16;
        out.err_est += err;
        return;
    }
    const double m = 0.5 * (a + b);
    adapt_1d(f, a, m, 0.5 * tol, depth - 1, out);
    adapt_1d(f, m, b, 0.5 * tol, depth - 1, out);
}

// 7-point degree-5 triangle rule (barycentric)
struct TriNode { double l1, l2, l3, w; };
constexpr std::array<TriNode, 7> TRI7 = {{
    {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.2250000000000000},
    {0.0597158717897698, 0.4701420641051151, 0.4701420641051151, 0.1323941527885062},
    {0.4701420641051151, 0.0597158717897698, 0.4701420641051151, 0.1323941527885062},
    {0.4701420641051151, 0.4701420641051151, 0.0597158717897698, 0.1323941527885062},
    {0.7974269853530873, 0.1012865073234563, 0.1012865073234563, 0.1259391805448271},
    {0.1012865073234563, 0.7974269853530873, 0.1012865073234563, 0.1259391805448271},
    {0.1012865073234563, 0.1012865073234563, 0.7974269853530873, 0.1259391805448271},
}};

double tri_area(const Triangle& t) { return 0.5 * std::abs(cross(t.b - t.a, t.c - t.a)); }

double tri7(const std::function<double(Vec2)>& f, const Triangle& t) {
    double s = 0.0;
    for (const TriNode& n : TRI7) {
        const Vec2 p{n.l1 * t.a.x + n.l2 * t.b.x + n.l3 * t.c.x,
                     n.l1 * t.a.y + n.l2 * t.b.y + n.l3 * t.c.y};
        s += n.w * f(p);
    }
    return s * tri_area(t);
}

void adapt_tri(const std::function<double(Vec2)>& f, const Triangle& t, double tol,
               int depth, Result& out) {
    const double whole = tri7(f, t);
    const Vec2 mab = 0.5 * (t.a + t.b), mbc = 0.5 * (t.b + t.c), mca = 0.5 * (t.c + t.a);
    const Triangle k0{t.a, mab, mca}, k1{mab, t.b, mbc}, k2{mca, mbc, t.c}, k3{mab, mbc, mca};
    const double split = tri7(f, k0) + tri7(f, k1) + tri7(f, k2) + tri7(f, k3);
    const double err = std::abs(split - whole);
    if (err <= tol || depth <= 0) {
        out.value += split;
        out.err_est += err;
        return;
    }
    adapt_tri(f, k0, 0.25 * tol, depth - 1, out);
    adapt_tri(f, k1, 0.25 * tol, depth - 1, out);
    adapt_tri(f, k2, 0.25 * tol, depth - 1, out);
    adapt_tri(f, k3, 0.25 * tol, depth - 1, out);
}

} // namespace

Result integrate_1d(const std::function<double(double)>& f, double a, double b,
                    double tol, int max_depth) {
    Result r;
    if (a == b) return r;
    adapt_1d(f, a, b, tol, max_depth, r);
    return r;
}

Result integrate_tri(const std::function<double(Vec2)>& f, const Triangle& t,
                     double tol, int max_depth) {
    Result r;
    if (tri_area(t) == 0.0) return r;
    adapt_tri(f, t, tol, max_depth, r);
    return r;
}

Result integrate_tri_duffy(const std::function<double(Vec2)>& f, const Triangle& t,
                           double tol) {
    // p(u,v) = a + u*((1-v)(b-a) + v(c-a)), |J| = u * |cross(b-a, c-a)|
    const Vec2 e1 = t.b - t.a, e2 = t.c - t.a;
    const double jac0 = std::abs(cross(e1, e2));
    if (jac0 == 0.0) return {};
    auto inner = [&](double u, double v) {
        const Vec2 d = (1.0 - v) * e1 + v * e2;
        const Vec2 p = t.a + u * d;
        return u * jac0 * f(p);
    };
    auto outer = [&](double v) {
        Result rv;
        adapt_1d([&](double u) { return inner(u, v); }, 0.0, 1.0, tol, 20, rv);
        return rv.value;
    };
    Result r;
    adapt_1d(outer, 0.0, 1.0, tol, 16, r);
    return r;
}

} // namespace stripflow::quad
