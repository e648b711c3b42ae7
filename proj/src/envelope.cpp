#include "stripflow/envelope.hpp"

#include <cmath>
#include <stdexcept>

namespace stripflow::envelope {

namespace {
const double E_INV = std::exp(-1.0);
const double E_M4 = std::exp(-4.0);
} // namespace

void EnvelopeParams::validate() const {
    if (!(eps > 0.0)) throw std::invalid_argument("EnvelopeParams: eps must be > 0");
    if (!(s0 > 0.0) || !(s0 < E_M4))
        throw std::invalid_argument("EnvelopeParams: s0 must lie in (0, e^-4)");
    if (!(theta > 0.0) || !(theta <= s0))
        throw std::invalid_argument("EnvelopeParams: theta must lie in (0, s0]");
    if (!(alpha > 0.0) || !(alpha <= 1.0 / 3.0))
        throw std::invalid_argument("EnvelopeParams: alpha must lie in (0, 1/3]");
}

double g_env(double s) {
    if (!(s > 0.0) || !(s < 1.0)) throw std::invalid_argument("g_env: s must lie in (0,1)");
    return s * std::exp(std::sqrt(-std::log(s)));
}

double g_prime(double s) {
    if (!(s > 0.0) || !(s < 1.0)) throw std::invalid_argument("g_prime: s must lie in (0,1)");
    const double q = std::sqrt(-std::log(s));
    return std::exp(q) * (1.0 - 0.5 / q);
}

bool contains(Vec2 x, const EnvelopeParams& p) {
    p.validate();
    const double s = x.x / p.alpha;
    if (!(s > p.theta) || !(s < E_INV)) return false;
    if (!(x.y > 0.0)) return false;
    return x.y < p.alpha * g_env(s);
}

BoundaryPoint upper_boundary(double s, const EnvelopeParams& p) {
    p.validate();
    if (!(s >= p.theta) || !(s <= E_INV))
        throw std::invalid_argument("upper_boundary: s must lie in [theta, 1/e]");
    return {{s * p.alpha, g_env(s) * p.alpha}, {-1.0, 1.0 / g_prime(s)}};
}

double rho0(double s0) {
    if (!(s0 > 0.0) || !(s0 < E_M4)) throw std::invalid_argument("rho0: s0 must lie in (0, e^-4)");
    return s0 / (2.0 * std::sqrt(-std::log(s0)));
}

double margin_min(double s0, int samples) {
    if (!(s0 > 0.0) || !(s0 < E_M4))
        throw std::invalid_argument("margin_min: s0 must lie in (0, e^-4)");
    const double la = std::log(s0), lb = -1.0;
    double best = std::numeric_limits<double>::max();
    for (int k = 0; k <= samples; ++k) {
        const double s = std::exp(la + (lb - la) * k / samples);
        const double v = g_env(s) / g_prime(s) - s;
        best = std::min(best, v);
    }
    return std::min(best, g_env(s0) / g_prime(s0) - s0);
}

Polygon polygonize(const EnvelopeParams& p, int segments) {
    p.validate();
    if (segments < 2) throw std::invalid_argument("polygonize: need >= 2 segments");
    Polygon poly;
    const double la = std::log(p.theta), lb = -1.0;
    // bottom edge left->right, then right edge up, then envelope right->left
    poly.push_back({p.theta * p.alpha, 0.0});
    poly.push_back({E_INV * p.alpha, 0.0});
    for (int k = segments; k >= 0; --k) {
        const double s = std::exp(la + (lb - la) * k / segments);
        poly.push_back({s * p.alpha, g_env(s) * p.alpha});
    }
    return poly;
}

} // namespace stripflow::envelope
