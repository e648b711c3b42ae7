#ifndef STRIPFLOW_GROWTH_ODE_HPP
#define STRIPFLOW_GROWTH_ODE_HPP

#include <functional>
#include <string>
#include <vector>

namespace stripflow::ode {

// Named constants of the growth estimate. rho0 is derived from s0.
struct Constants {
    double eps = 1e-3;
    double C0 = 1.0;
    double C1 = 1.0;
    double Cprime = 1.0;
    double c1 = 0.0;   // 0 means: auto-select (smallest passing value)
    double c2 = 0.0;   // achieved rate; 1/pi for the closed-form theta
    double s0 = 6.737946999085467e-3; // e^-5

    void validate() const;
    double rho0() const; // s0 / (2 sqrt(|ln s0|))
    // damping coefficient of the alpha equation: 2 C' e^-1 rho0^-1 + C0 (3 + sqrt(C1))
    double alpha_damping() const;
    // extreme allowed inflow term: C0 eps (3 + sqrt(C1)) e^-1 alpha
    double u1_extreme(double alpha) const;
    double f_of_theta_log(double abs_ln_theta) const; // 5 + 2 sqrt(C1) + sqrt(|ln theta|)
};

struct GrowthState {
    double t = 0.0;
    double alpha = 1.0 / 3.0;
    double eta = 0.0;   // theta = exp(-exp(eta)); eta is the primary variable
    double theta() const;          // may underflow to 0 for large eta
    double abs_ln_theta() const;   // exp(eta), always representable
};

// right-hand side of the alpha equation
double alpha_rhs(double t, double alpha, double u1_inf, const Constants& k);

// closed-form theta(t) = exp(-exp(eta(t))), eta(t) = (eps/pi) t + ln c1
std::pair<double, double> theta_closed_form(double t, const Constants& k); // (theta, eta)

// lower bound eps * exp(c1 exp(eps t / pi)) = eps / theta(t); +inf on overflow
struct GradientBound {
    double value = 0.0;       // +inf marker when overflowed
    bool overflow = false;
    double exponent_c1 = 0.0; // the pair (c1, eps t/pi) characterizing the bound
    double exponent_rate_t = 0.0;
};
GradientBound gradient_lower_bound(double t, const Constants& k);

// verifier of the differential inequality satisfied by the closed-form theta:
// eta'(t) <= eps h(theta) - eps e^-eta [C0 f(theta) + alpha_damping]
struct SlackPoint {
    double t = 0.0;
    double slack = 0.0; // eta' - rhs; must be <= 0
};
struct ThetaInequalityReport {
    bool constraint_ok = false; // theta(0) <= s0
    std::string message;
    std::vector<SlackPoint> points;
    double max_slack = 0.0;
    bool passes = false;
};
// h_provider maps |ln theta| -> h; e.g. kernel::h_function_log or the
// asymptotic 2/pi (flagged by the caller)
ThetaInequalityReport check_theta_inequality(const std::vector<double>& t_grid,
                                             const Constants& k,
                                             const std::function<double(double)>& h_provider);

// smallest c1 on a geometric grid such that theta(0) <= s0 and the
// inequality passes on the grid
double select_c1(const std::vector<double>& t_grid, const Constants& k,
                 const std::function<double(double)>& h_provider);

// one RK4 step of alpha; theta/eta advance by closed form.
// u1_provider(t, alpha) returns inf over the right lateral segment of u1.
GrowthState integrate(const GrowthState& state, double dt,
                      const std::function<double(double, double)>& u1_provider,
                      const Constants& k, double alpha_floor = 1e-300);

} // namespace stripflow::ode

#endif
