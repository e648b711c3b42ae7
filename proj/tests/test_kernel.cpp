#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "stripflow/envelope.hpp"
#include "stripflow/fixtures.hpp"
#include "stripflow/kernel.hpp"
#include "stripflow/quadrature.hpp"

using namespace stripflow;
namespace sk = stripflow::kernel;

namespace {

constexpr double PI = std::numbers::pi;

// independent brute-force oracle: tensor Gauss quadrature of the truncated
// log-kernel image sum over both square patches (M = 200, paired +-m)
double psi_bruteforce(Vec2 x) {
    constexpr int M = 200;
    constexpr int NG = 24;
    static const auto nodes = [] {
        std::array<std::pair<double, double>, NG> nw{};
        for (int i = 0; i < NG; ++i) {
            double t = std::cos(PI * (i + 0.75) / (NG + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = t;
                for (int k = 2; k <= NG; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                const double dp = NG * (t * p1 - p0) / (t * t - 1.0);
                const double dt = p1 / dp;
                t -= dt;
                if (std::abs(dt) < 1e-15) break;
            }
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= NG; ++k) {
                const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = NG * (t * p1 - p0) / (t * t - 1.0);
            nw[i] = {0.5 * (1.0 - t), 1.0 / ((1.0 - t * t) * dp * dp)};
        }
        return nw;
    }();

    auto kern = [&](double y1, double y2, double val) {
        double s = 0.0;
        const double p2 = (x.x - y1) * (x.x - y1);
        for (int m = 0; m <= M; ++m) {
            const double a = x.y - y2 + 2.0 * m, b = x.y + y2 + 2.0 * m;
            s += std::log(p2 + a * a) - std::log(p2 + b * b);
            if (m > 0) {
                const double am = x.y - y2 - 2.0 * m, bm = x.y + y2 - 2.0 * m;
                s += std::log(p2 + am * am) - std::log(p2 + bm * bm);
            }
        }
        return val * s / (4.0 * PI);
    };
    double total = 0.0;
    for (const auto [u, wu] : nodes)
        for (const auto [v, wv] : nodes) {
            const double y1 = 0.2 + 0.2 * u, y2 = 0.4 + 0.2 * v;
            total += wu * wv * 0.04 * (kern(y1, y2, 1.0) + kern(-y1, y2, -1.0));
        }
    return total;
}

} // namespace

TEST_CASE("stream function: boundary, oddness, brute-force oracle") {
    const PatchSet w = fixtures::mirrored_square_patch();
    KernelConfig kc;
    kc.quad_tol = 1e-11;

    for (double x1 : {-1.5, -0.3, 0.0, 0.25, 1.1})
        CHECK(std::abs(sk::stream_function({x1, 0.0}, w, kc)) < 1e-13);
    for (double x2 : {0.2, 0.5, 0.9})
        CHECK(std::abs(sk::stream_function({0.0, x2}, w, kc)) < 1e-14);

    // frozen independent value (closed-form strip Green's function, M -> inf)
    const double frozen = -0.0031653595499297012;
    KernelConfig hi = kc;
    hi.image_order = 200;
    const double val = sk::stream_function({0.3, 0.2}, w, hi);
    CHECK(std::abs(val - frozen) < 1e-8);
    CHECK(std::abs(psi_bruteforce({0.3, 0.2}) - frozen) < 1e-8);
    CHECK(std::abs(val - psi_bruteforce({0.3, 0.2})) < 1e-8);
}

TEST_CASE("velocity: symmetry, wall tangency, curl oracle, frozen value") {
    const PatchSet w = fixtures::mirrored_square_patch();
    KernelConfig kc;
    kc.quad_tol = 1e-11;

    for (double x2 : {0.1, 0.4, 0.77}) CHECK(std::abs(sk::velocity({0.0, x2}, w, kc).x) < 1e-13);
    for (double x1 : {-0.8, 0.15, 0.6}) CHECK(std::abs(sk::velocity({x1, 0.0}, w, kc).y) < 1e-13);

    // antisymmetry of u1, symmetry of u2
    const Vec2 up = sk::velocity({0.21, 0.33}, w, kc);
    const Vec2 um = sk::velocity({-0.21, 0.33}, w, kc);
    CHECK(std::abs(up.x + um.x) < 1e-11);
    CHECK(std::abs(up.y - um.y) < 1e-11);

    // finite-difference curl oracle on the stream function
    const Vec2 x{0.05, 0.05};
    const double h = 1e-5;
    const Vec2 u = sk::velocity(x, w, kc);
    const double u1fd = (sk::stream_function({x.x, x.y + h}, w, kc) -
                         sk::stream_function({x.x, x.y - h}, w, kc)) / (2.0 * h);
    const double u2fd = -(sk::stream_function({x.x + h, x.y}, w, kc) -
                          sk::stream_function({x.x - h, x.y}, w, kc)) / (2.0 * h);
    CHECK(std::abs(u.x - u1fd) < 1e-6);
    CHECK(std::abs(u.y - u2fd) < 1e-6);

    // frozen high-precision values at (0.05, 0.05); u1 < 0, u2 > 0 for this data
    KernelConfig hi = kc;
    hi.image_order = 256;
    const Vec2 uhi = sk::velocity(x, w, hi);
    CHECK(std::abs(uhi.x - (-0.0031762690734601937)) < 1e-9);
    CHECK(std::abs(uhi.y - 0.0030854827864806331) < 1e-9);
}

TEST_CASE("velocity: divergence-free at second order") {
    const PatchSet w = fixtures::mirrored_square_patch();
    KernelConfig kc;
    kc.quad_tol = 1e-12;
    const Vec2 x{0.12, 0.3};
    auto div_at = [&](double h) {
        const double dudx = (sk::velocity({x.x + h, x.y}, w, kc).x -
                             sk::velocity({x.x - h, x.y}, w, kc).x) / (2.0 * h);
        const double dvdy = (sk::velocity({x.x, x.y + h}, w, kc).y -
                             sk::velocity({x.x, x.y - h}, w, kc).y) / (2.0 * h);
        return std::abs(dudx + dvdy);
    };
    // residual is pure stencil truncation: small and O(h^2)
    const double d1 = div_at(1e-3), d2 = div_at(5e-4);
    CHECK(d1 < 1e-5);
    CHECK(d1 / d2 > 3.0);
    CHECK(d1 / d2 < 5.5);
}

TEST_CASE("image-sum tail: C/M bound for mirrored data, ~1/M probe decay") {
    const PatchSet w = fixtures::mirrored_square_patch();
    const PatchSet probe = fixtures::lone_square_patch();
    KernelConfig kc;
    kc.quad_tol = 1e-12;
    const std::vector<Vec2> pts{{0.3, 0.37}, {0.1, 0.8}, {0.45, 0.15}};

    std::vector<double> lm, ld;
    for (int M : {4, 8, 16, 32}) {
        KernelConfig a = kc, b = kc;
        a.image_order = M;
        b.image_order = 2 * M;
        double dprobe = 0.0, dmirror = 0.0;
        for (const Vec2& x : pts) {
            dprobe = std::max(dprobe, norm(sk::velocity(x, probe, a) - sk::velocity(x, probe, b)));
            dmirror = std::max(dmirror, norm(sk::velocity(x, w, a) - sk::velocity(x, w, b)));
        }
        lm.push_back(std::log(M));
        ld.push_back(std::log(dprobe));
        // the mirror-closed field cancels image orders faster than the probe
        CHECK(dmirror <= dprobe + 1e-15);
    }
    const size_t n = lm.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += lm[i];
        sy += ld[i];
        sxx += lm[i] * lm[i];
        sxy += lm[i] * ld[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope > -1.3);
    CHECK(slope < -0.8);
}

TEST_CASE("key integral: trivial cases, closed form, mesh-independent oracle") {
    KernelConfig kc;
    kc.quad_tol = 1e-12;

    PatchSet empty;
    CHECK(sk::key_integral(0.1, empty, kc) == 0.0);

    PatchSet near;
    Polygon sq{{0.1, 0.1}, {0.5, 0.1}, {0.5, 0.5}, {0.1, 0.5}};
    near.patches.push_back({sq, 1.0});
    near.patches.push_back({reflected_x(sq), -1.0});
    // support entirely inside the excluded ball
    CHECK(sk::key_integral(std::sqrt(2.0), near, kc) == 0.0);

    // closed form for the unit-value square, r below the support distance:
    // I = (4/pi) (1/4) [ln(0.26/0.50) - ln(0.02/0.26)] = 0.6082974786279853
    const double frozen = 0.6082974786279853;
    const double got = sk::key_integral(0.05, near, kc);
    CHECK(std::abs(got - frozen) < 1e-10);

    // composite-Gauss oracle with the ball indicator, two independent meshes
    auto oracle = [&](double r, int n) {
        double s = 0.0;
        const double gx[2] = {0.2113248654051871, 0.7886751345948129};
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (double a : gx)
                    for (double b : gx) {
                        const double y1 = 0.1 + 0.4 * (i + a) / n;
                        const double y2 = 0.1 + 0.4 * (j + b) / n;
                        const double q2 = y1 * y1 + y2 * y2;
                        if (q2 > r * r) s += y1 * y2 / (q2 * q2);
                    }
        return 4.0 / PI * s * 0.16 / (n * n) / 4.0;
    };
    // smooth case (ball misses the support): meshes agree to 1e-8
    const double s1 = oracle(0.05, 100), s2 = oracle(0.05, 150);
    CHECK(std::abs(s1 - s2) < 1e-8);
    CHECK(std::abs(got - s1) < 1e-8);
    // cutting radius: indicator limits the oracle mesh accuracy to O(1/n)
    const double r = 0.3;
    const double i1 = oracle(r, 800), i2 = oracle(r, 1200);
    CHECK(std::abs(i1 - i2) < 4e-6);
    const double gotr = sk::key_integral(r, near, kc);
    CHECK(std::abs(gotr - i2) < 4e-6);

    CHECK(sk::key_integral(0.2, near, kc) >= sk::key_integral(0.3, near, kc));
    // r = 0 allowed: Q(0) is the whole right half-strip
    CHECK(std::abs(sk::key_integral(0.0, near, kc) - frozen) < 1e-10);
}

TEST_CASE("h function: frozen oracle values, identity with key integral") {
    KernelConfig kc;
    kc.quad_tol = 1e-12;
    // frozen extended-precision oracle values of (4/pi) int_{D_s} y1 y2/|y|^4 / |ln s|
    CHECK(std::abs(sk::h_function(1e-3, kc) - 0.29752445351557856) < 1e-8);
    CHECK(std::abs(sk::h_function(1e-5, kc) - 0.39043969928794855) < 1e-8);
    CHECK(std::abs(sk::h_function(1e-7, kc) - 0.43613906718316090) < 1e-8);
    // log-space evaluation far below double underflow of s
    const double hdeep = sk::h_function_log(-1750.0, kc);
    CHECK(hdeep > 0.6);
    CHECK(hdeep < 2.0 / PI);

    CHECK_THROWS(sk::h_function(0.02, kc)); // above e^-4

    // identity: h(s) |ln s| equals the key integral of the D_s indicator
    const double s = 1e-3;
    const double g = envelope::g_env(s);
    const double rs = std::hypot(s, g);
    const double EI = std::exp(-1.0);
    Polygon ds;
    const int N = 600;
    ds.push_back({rs, 0.0});
    ds.push_back({EI, 0.0});
    auto phimax = [&](double rho) {
        double lo = 1e-9, hi = PI / 2 - 1e-12;
        for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double y1 = rho * std::cos(mid);
            (rho * std::sin(mid) < envelope::g_env(y1) ? lo : hi) = mid;
        }
        return lo;
    };
    const double phi_out = phimax(EI), phi_in = phimax(rs);
    for (int k = 1; k <= N; ++k)
        ds.push_back({EI * std::cos(phi_out * k / N), EI * std::sin(phi_out * k / N)});
    const double y1o = EI * std::cos(phi_out), y1i = rs * std::cos(phi_in);
    for (int k = 1; k < N; ++k) {
        const double y1 = std::exp(std::log(y1o) + (std::log(y1i) - std::log(y1o)) * k / N);
        ds.push_back({y1, envelope::g_env(y1)});
    }
    for (int k = N; k-- > 1;)
        ds.push_back({rs * std::cos(phi_in * k / N), rs * std::sin(phi_in * k / N)});
    PatchSet dsp;
    dsp.patches.push_back({ds, 1.0});
    const double viaI = sk::key_integral(0.0, dsp, kc);
    const double viaH = sk::h_function(s, kc) * (-std::log(s));
    CHECK(std::abs(viaI - viaH) / viaH < 2e-4); // polygonization-limited
}

TEST_CASE("b decomposition: reconstruction identity, empty field, domain checks") {
    const PatchSet w = fixtures::mirrored_square_patch();
    KernelConfig kc;
    kc.quad_tol = 1e-12;
    const Vec2 x{0.1, 0.1};
    const auto [b1, b2] = sk::b_decompose(x, w, kc);
    const double I = sk::key_integral(norm(x), w, kc);
    const Vec2 u = sk::velocity(x, w, kc);
    CHECK(std::abs(u.x + (I + b1) * x.x) < 1e-12);
    CHECK(std::abs(u.y - (I + b2) * x.y) < 1e-12);

    PatchSet empty;
    const auto [z1, z2] = sk::b_decompose({0.1, 0.2}, empty, kc);
    CHECK(z1 == 0.0);
    CHECK(z2 == 0.0);

    CHECK_THROWS(sk::b_decompose({0.0, 0.1}, w, kc));
    CHECK_THROWS(sk::b_decompose({0.45, 0.45}, w, kc)); // |x| >= 1/2
}

TEST_CASE("grid-field kernel path: symmetry and boundary values") {
    VorticityField f;
    f.L = 1.0;
    f.nx = 64;
    f.ny = 32;
    f.eps = 1.0;
    f.values.assign(static_cast<size_t>(f.nx + 1) * (f.ny + 1), 0.0);
    for (int j = 0; j <= f.ny; ++j)
        for (int i = f.nx / 2; i <= f.nx; ++i) {
            const double x = f.x1(i), y = f.x2(j);
            const double d = std::hypot(x - 0.4, y - 0.5);
            const double v = d < 0.2 ? std::exp(1.0 - 1.0 / (1.0 - (d / 0.2) * (d / 0.2))) : 0.0;
            f.at(i, j) = v;
            f.at(f.nx - i, j) = -v;
        }
    KernelConfig kc;
    kc.image_order = 24;
    kc.quad_tol = 1e-8;
    CHECK(std::abs(sk::velocity({0.0, 0.3}, f, kc).x) < 1e-10);
    CHECK(std::abs(sk::stream_function({0.3, 0.0}, f, kc)) < 1e-10);
    const Vec2 up = sk::velocity({0.2, 0.4}, f, kc);
    const Vec2 um = sk::velocity({-0.2, 0.4}, f, kc);
    CHECK(std::abs(up.x + um.x) < 1e-9);
    CHECK(std::abs(up.y - um.y) < 1e-9);
}

TEST_CASE("input validation") {
    const PatchSet w = fixtures::mirrored_square_patch();
    KernelConfig kc;
    CHECK_THROWS(sk::stream_function({0.1, -0.2}, w, kc)); // outside the strip
    CHECK_THROWS(sk::stream_function({0.1, 1.2}, w, kc));
    PatchSet bad = w;
    bad.patches[0].value = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS(sk::stream_function({0.1, 0.2}, bad, kc));
    KernelConfig badk;
    badk.image_order = 0;
    CHECK_THROWS(sk::velocity({0.1, 0.2}, w, badk));
}
