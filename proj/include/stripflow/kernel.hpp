#ifndef STRIPFLOW_KERNEL_HPP
#define STRIPFLOW_KERNEL_HPP

#include <stdexcept>
#include <utility>

#include "stripflow/field.hpp"
#include "stripflow/geometry.hpp"

namespace stripflow::kernel {

// Thrown when adaptive quadrature cannot meet the requested tolerance.
struct QuadratureError : std::runtime_error {
    double achieved;
    QuadratureError(const std::string& what, double ach)
        : std::runtime_error(what), achieved(ach) {}
};

// Stream function of the zero-Dirichlet strip problem, evaluated by the
// truncated mirror-image sum (|m| <= cfg.image_order).
double stream_function(Vec2 x, const PatchSet& w, const KernelConfig& cfg);
double stream_function(Vec2 x, const VorticityField& w, const KernelConfig& cfg);

// Velocity u = (d2 Psi, -d1 Psi).
Vec2 velocity(Vec2 x, const PatchSet& w, const KernelConfig& cfg);
Vec2 velocity(Vec2 x, const VorticityField& w, const KernelConfig& cfg);

// I(r) = (4/pi) * integral over Q(r) = Lambda_+ \ B_r(0) of y1*y2/|y|^4 * w(y).
// r = 0 is allowed (Q(0) = Lambda_+).
double key_integral(double r, const PatchSet& w, const KernelConfig& cfg);
double key_integral(double r, const VorticityField& w, const KernelConfig& cfg);

// h(s) = (4/pi) int_{D_s} y1*y2/|y|^4 dy / |ln s| with
// D_s = Omega_0 ∩ Q(sqrt(s^2+g(s)^2)) ∩ B_{1/e}(0); s in (0, e^-4).
double h_function(double s, const KernelConfig& cfg);
// same quantity parametrized by ln s; usable far below double underflow of s
double h_function_log(double ln_s, const KernelConfig& cfg);

// b_j(x) = (-1)^j u_j(x)/x_j - I(|x|), so that u_j = (-1)^j (I + b_j) x_j.
std::pair<double, double> b_decompose(Vec2 x, const PatchSet& w, const KernelConfig& cfg);
std::pair<double, double> b_decompose(Vec2 x, const VorticityField& w, const KernelConfig& cfg);

} // namespace stripflow::kernel

#endif
