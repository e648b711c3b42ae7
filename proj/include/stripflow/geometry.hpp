#ifndef STRIPFLOW_GEOMETRY_HPP
#define STRIPFLOW_GEOMETRY_HPP

#include <array>
#include <cmath>
#include <vector>

namespace stripflow {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm2(Vec2 a) { return a.x * a.x + a.y * a.y; }
inline double norm(Vec2 a) { return std::sqrt(norm2(a)); }

// Closed polyline; last vertex connects back to the first implicitly.
using Polygon = std::vector<Vec2>;

struct Triangle {
    Vec2 a, b, c;
};

struct BBox {
    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
};

double signed_area(const Polygon& p);
double perimeter(const Polygon& p);
BBox bounding_box(const Polygon& p);
// integral of x2 over the polygon interior (orientation-signed)
double moment_y(const Polygon& p);

// force counterclockwise orientation (positive signed area)
void make_ccw(Polygon& p);

bool point_in_polygon(Vec2 q, const Polygon& p);

// squared distance from point to segment [a,b]
double dist2_point_segment(Vec2 q, Vec2 a, Vec2 b);
double dist2_point_polygon_boundary(Vec2 q, const Polygon& p);

// ear-clipping triangulation of a simple polygon (any orientation)
std::vector<Triangle> triangulate(const Polygon& p);

// Clip a simple polygon against the half-plane {dot(n,p) <= c}.
// May return several disjoint simple polygons.
std::vector<Polygon> clip_halfplane(const Polygon& poly, Vec2 n, double c);

Polygon translated(const Polygon& p, Vec2 d);
// reflect across the horizontal line {x2 = level}; reverses orientation sense
Polygon reflected_y(const Polygon& p, double level);
Polygon reflected_x(const Polygon& p); // across {x1 = 0}

} // namespace stripflow

#endif
