#ifndef STRIPFLOW_STEINER_HPP
#define STRIPFLOW_STEINER_HPP

#include <string>
#include <vector>

#include "stripflow/geometry.hpp"

namespace stripflow::steiner {

enum class Axis { e1, e2 }; // symmetrization direction

// Polygonal region; orientation +1 for outer boundaries, -1 for holes
// (encoded by winding: CCW outer, CW hole).
struct PlanarRegion {
    std::vector<Polygon> polygons;

    void validate() const; // pairwise non-crossing not rechecked; area > 0
    double area() const;
    double perimeter() const;

    static PlanarRegion load_json(const std::string& path);
    void save_json(const std::string& path) const;
};

// Piecewise-linear slice-measure function of the transverse coordinate.
// Possibly discontinuous at breakpoints; segment k spans
// [breakpoints[k], breakpoints[k+1]] with endpoint values (left[k], right[k]).
struct WidthProfile {
    Axis axis = Axis::e2;
    std::vector<double> breakpoints;
    std::vector<double> left;  // value at segment start (one-sided)
    std::vector<double> right; // value at segment end (one-sided)

    double integral() const;        // == area of the source region
    double support_max() const;     // sup of {c : width(c) > 0} relative coordinate
    double value_at(double c) const; // midpoint-convention evaluation
};

// Total length of the slice A ∩ {line in direction `axis` at transverse
// coordinate c}. For axis=e2 the lines are vertical, c is the x1 coordinate.
double slice_measure(const PlanarRegion& A, Axis axis, double c);

struct SymmetrizeResult {
    PlanarRegion region; // centered region {b + t a : |t| <= w(b)/2}
    WidthProfile profile;
};
SymmetrizeResult steiner_symmetrize(const PlanarRegion& A, Axis axis);

// Doubled reflected regions of the free-surface decomposition relative to the
// reference level x2 = 2, re-centered so the level maps to x2 = 0. The input
// fluid polygon must contain the bottom edge and have lateral sides on
// {x1 = +-R}.
struct TildeRegions {
    PlanarRegion plus;  // from the part of the fluid above the level
    PlanarRegion minus; // from the air pockets below the level
};
TildeRegions build_tilde_regions(const Polygon& fluid, double R);

// Piecewise-linear compactly-supported interface elevation phi(x1).
struct GraphInterface {
    std::vector<Vec2> samples; // sorted by x; phi = 0 outside [first.x, last.x]
};

// P1 = sigma * int sqrt(1 + phi'^2) - 1, P2 = (g/2) * int phi^2
std::pair<double, double> potential_energy_graph(const GraphInterface& phi, double sigma,
                                                 double grav);

struct ChainStep {
    std::string name;
    double lhs = 0.0, rhs = 0.0; // inequality lhs >= rhs
    double slack = 0.0;          // lhs - rhs
    bool holds = false;
};

struct Case1Report {
    bool hypothesis_met = false; // max phi >= 1/2
    std::vector<ChainStep> steps;
    double final_product = 0.0; // P * 4 min{3(1+sqrt2)/(2 sigma), 16/g}
    bool passes = false;
};
Case1Report case1_chain(const GraphInterface& phi, double sigma, double grav);

struct Case2Report {
    bool precondition_met = false;
    std::string message;
    double lhs = 0.0;             // P_R(t)
    double rhs = 0.0;             // symmetrized sum - 4 delta sigma
    double slack = 0.0;           // lhs - rhs
    double surface_slack_plus = 0.0;  // excess(Gamma+) + 2 delta - excess*(D+*)
    double surface_slack_minus = 0.0;
    double gravity_slack_plus = 0.0;  // mom(D+) - mom*(D+*)
    double gravity_slack_minus = 0.0;
    bool upper_boundary_is_graph = false;
    double x2_star_before = 0.0, x2_star_after = 0.0; // D~- sup, before/after S_e1
    bool passes = false;
};
// interface: polyline from x1=-R to x1=+R (not necessarily a graph),
// heights within (0, 2+delta); fluid = region below it down to the bottom.
Case2Report case2_lower_bound(const std::vector<Vec2>& interface_curve, double R, double delta,
                              double sigma, double grav);

} // namespace stripflow::steiner

#endif
