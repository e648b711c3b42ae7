#include "stripflow/growth_ode.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace stripflow::ode {

namespace {
constexpr double PI = std::numbers::pi;
const double E_INV = std::exp(-1.0);
const double E_M4 = std::exp(-4.0);
} // namespace

void Constants::validate() const {
    if (!(eps >= 0.0)) throw std::invalid_argument("Constants: eps must be >= 0");
    if (C0 < 0.0 || C1 < 0.0 || Cprime < 0.0)
        throw std::invalid_argument("Constants: C0, C1, C' must be >= 0");
    if (!(s0 > 0.0) || !(s0 < E_M4))
        throw std::invalid_argument("Constants: s0 must lie in (0, e^-4)");
    if (c1 < 0.0) throw std::invalid_argument("Constants: c1 must be >= 0");
}

double Constants::rho0() const { return s0 / (2.0 * std::sqrt(-std::log(s0))); }

double Constants::alpha_damping() const {
    return 2.0 * Cprime * E_INV / rho0() + C0 * (3.0 + std::sqrt(C1));
}

double Constants::u1_extreme(double alpha) const {
    return C0 * eps * (3.0 + std::sqrt(C1)) * E_INV * alpha;
}

double Constants::f_of_theta_log(double abs_ln_theta) const {
    return 5.0 + 2.0 * std::sqrt(C1) + std::sqrt(abs_ln_theta);
}

double GrowthState::theta() const { return std::exp(-std::exp(eta)); }
double GrowthState::abs_ln_theta() const { return std::exp(eta); }

double alpha_rhs(double t, double alpha, double u1_inf, const Constants& k) {
    (void)t;
    return -k.eps * k.alpha_damping() * alpha + std::exp(1.0) * u1_inf;
}

std::pair<double, double> theta_closed_form(double t, const Constants& k) {
    if (!(t >= 0.0)) throw std::invalid_argument("theta_closed_form: t must be >= 0");
    if (!(k.c1 > 0.0)) throw std::invalid_argument("theta_closed_form: c1 must be set");
    const double eta = k.eps * t / PI + std::log(k.c1);
    return {std::exp(-std::exp(eta)), eta};
}

GradientBound gradient_lower_bound(double t, const Constants& k) {
    if (!(t >= 0.0)) throw std::invalid_argument("gradient_lower_bound: t must be >= 0");
    GradientBound b;
    b.exponent_c1 = k.c1;
    b.exponent_rate_t = k.eps * t / PI;
    const double inner = k.c1 * std::exp(b.exponent_rate_t);
    if (inner > 700.0) { // exp would overflow double
        b.value = std::numeric_limits<double>::infinity();
        b.overflow = true;
        return b;
    }
    b.value = k.eps * std::exp(inner);
    return b;
}

ThetaInequalityReport check_theta_inequality(const std::vector<double>& t_grid,
                                             const Constants& k,
                                             const std::function<double(double)>& h_provider) {
    k.validate();
    ThetaInequalityReport rep;
    if (!(k.c1 > 0.0)) {
        rep.message = "c1 not set";
        return rep;
    }
    // theta(0) = exp(-c1) <= s0, compared in log space
    if (-k.c1 > std::log(k.s0)) {
        rep.message = "constraint violation: theta(0) > s0";
        return rep;
    }
    rep.constraint_ok = true;
    const double etap = k.eps / PI; // eta'(t)
    rep.max_slack = -std::numeric_limits<double>::infinity();
    for (double t : t_grid) {
        const double eta = etap * t + std::log(k.c1);
        const double E = std::exp(eta); // |ln theta|
        const double h = h_provider(E);
        const double rhs = k.eps * h -
                           k.eps * std::exp(-eta) * (k.C0 * k.f_of_theta_log(E) + k.alpha_damping());
        const double slack = etap - rhs;
        rep.points.push_back({t, slack});
        rep.max_slack = std::max(rep.max_slack, slack);
    }
    rep.passes = rep.max_slack <= 0.0;
    return rep;
}

double select_c1(const std::vector<double>& t_grid, const Constants& k,
                 const std::function<double(double)>& h_provider) {
    Constants kk = k;
    double c1 = std::max(8.0, -std::log(k.s0));
    for (int it = 0; it < 400; ++it) {
        kk.c1 = c1;
        const ThetaInequalityReport rep = check_theta_inequality(t_grid, kk, h_provider);
        if (rep.constraint_ok && rep.passes) return c1;
        c1 *= 1.05;
    }
    throw std::runtime_error("select_c1: no passing c1 found on the geometric grid");
}

GrowthState integrate(const GrowthState& state, double dt,
                      const std::function<double(double, double)>& u1_provider,
                      const Constants& k, double alpha_floor) {
    if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be > 0");
    const auto rhs = [&](double t, double a) { return alpha_rhs(t, a, u1_provider(t, a), k); };
    const double t = state.t, a = state.alpha;
    const double k1 = rhs(t, a);
    const double k2 = rhs(t + 0.5 * dt, a + 0.5 * dt * k1);
    const double k3 = rhs(t + 0.5 * dt, a + 0.5 * dt * k2);
    const double k4 = rhs(t + dt, a + dt * k3);
    GrowthState next;
    next.t = t + dt;
    next.alpha = a + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    next.eta = state.eta + k.eps * dt / PI;
    if (!(next.alpha > alpha_floor))
        throw std::runtime_error("integrate: alpha underflow below the configured floor");
    return next;
}

} // namespace stripflow::ode
