#ifndef STRIPFLOW_QUADRATURE_HPP
#define STRIPFLOW_QUADRATURE_HPP

#include <functional>

#include "stripflow/geometry.hpp"

namespace stripflow::quad {

struct Result {
    double value = 0.0;
    double err_est = 0.0; // accumulated error estimate of accepted panels
};

// Adaptive 1D integration on [a,b]: nested Gauss 8/16, bisect until the panel
// estimate meets its share of tol (absolute).
Result integrate_1d(const std::function<double(double)>& f, double a, double b,
                    double tol, int max_depth = 38);

// Adaptive integration over a triangle: degree-5 rule vs 4-way split.
Result integrate_tri(const std::function<double(Vec2)>& f, const Triangle& t,
                     double tol, int max_depth = 22);

// Integration over a triangle with an integrable singularity at vertex `apex`
// (must be t.a): Duffy transform to [0,1]^2 which removes 1/r and ln r.
Result integrate_tri_duffy(const std::function<double(Vec2)>& f, const Triangle& t,
                           double tol);

} // namespace stripflow::quad

#endif
