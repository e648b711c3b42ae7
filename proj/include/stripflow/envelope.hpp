#ifndef STRIPFLOW_ENVELOPE_HPP
#define STRIPFLOW_ENVELOPE_HPP

#include <utility>

#include "stripflow/geometry.hpp"

namespace stripflow::envelope {

// Scaled envelope region alpha * Omega_theta.
struct EnvelopeParams {
    double eps = 1e-3;   // vorticity amplitude
    double theta = 1e-6; // left truncation, in (0, s0]
    double alpha = 1.0 / 3.0;
    double s0 = 1e-4;    // in (0, e^-4)

    void validate() const;
};

// g(s) = s * exp(sqrt(-ln s)), s in (0,1)
double g_env(double s);
// closed-form derivative g'(s) = exp(sqrt(-ln s)) * (1 - 1/(2 sqrt(-ln s)))
double g_prime(double s);

// x in alpha*Omega_theta, i.e. x1/alpha in (theta, 1/e), 0 < x2 < alpha*g(x1/alpha)
bool contains(Vec2 x, const EnvelopeParams& p);

struct BoundaryPoint {
    Vec2 point;
    Vec2 normal; // outward, unnormalized: (-1, 1/g'(s))
};
// upper curved boundary, parametrized by s in [theta, 1/e]
BoundaryPoint upper_boundary(double s, const EnvelopeParams& p);

// rho0 = s0 / (2 sqrt(|ln s0|)), a lower bound for min over [s0, 1/e] of g/g' - s
double rho0(double s0);
// the sampled minimum itself (log-spaced sampling + local refinement)
double margin_min(double s0, int samples = 10000);

// Polygonal approximation of alpha*Omega_theta with log-spaced envelope
// vertices; mirror=true appends the x1-reflection for mirror-closed data.
Polygon polygonize(const EnvelopeParams& p, int segments);

} // namespace stripflow::envelope

#endif
