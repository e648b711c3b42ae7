#ifndef STRIPFLOW_FIELD_HPP
#define STRIPFLOW_FIELD_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "stripflow/geometry.hpp"

namespace stripflow {

// Truncation / accuracy knobs of the image-sum kernel.
struct KernelConfig {
    int image_order = 64;            // truncate the m-sum to |m| <= image_order
    double quad_tol = 1e-10;         // absolute tolerance of returned integrals
    double near_singular_split = 0.05; // polar (Duffy) subdivision radius

    void validate() const;
};

// Polygonal patches of constant vorticity. Physical fields are mirror-closed:
// for each (P, v) the x1-reflection (-P, -v) is present.
struct Patch {
    Polygon poly;
    double value = 0.0;
};

struct PatchSet {
    std::vector<Patch> patches;

    // invariants: simple disjoint polygons inside the strip, mirror-closure
    void validate(bool require_mirror = true) const;
    double max_abs_value() const;
    double support_radius() const; // max |y| over vertices with y1 >= 0

    static PatchSet load_json(const std::string& path);
    void save_json(const std::string& path) const;
};

// Node-centered scalar field on [-L,L] x [0,1]; nx, ny are interval counts
// (nx even so x1 = 0 is a node column). Odd in x1 on mirror pairs.
struct VorticityField {
    double L = 1.0;
    int nx = 0; // intervals across [-L, L]
    int ny = 0; // intervals across [0, 1]
    double eps = 0.0;
    std::vector<double> values; // (ny+1) rows x (nx+1) cols, row-major

    double& at(int i, int j) { return values[static_cast<size_t>(j) * (nx + 1) + i]; }
    double at(int i, int j) const { return values[static_cast<size_t>(j) * (nx + 1) + i]; }
    double x1(int i) const { return -L + 2.0 * L * i / nx; }
    double x2(int j) const { return static_cast<double>(j) / ny; }
    double hx() const { return 2.0 * L / nx; }
    double hy() const { return 1.0 / ny; }

    // bilinear reconstruction; zero outside the grid
    double sample(double x, double y) const;

    void validate() const;
    double max_mirror_defect() const; // max |w(-x1) + w(x1)| over node pairs

    // header JSON + flat little-endian binary, row-major
    static VorticityField load(const std::string& header_path);
    void save(const std::string& header_path, const std::string& bin_path) const;
};

} // namespace stripflow

#endif
