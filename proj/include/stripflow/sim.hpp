#ifndef STRIPFLOW_SIM_HPP
#define STRIPFLOW_SIM_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "stripflow/envelope.hpp"
#include "stripflow/field.hpp"
#include "stripflow/growth_ode.hpp"

namespace stripflow::sim {

enum class SolverKind { grid_semilagrangian, patch_contour };

struct SimConfig {
    double L = 2.5;
    int nx = 512;
    int ny = 128;
    double dt = 0.25;
    double t_end = 100.0;
    double mollify_width = 0.0; // 0: one grid cell (max(hx, hy))
    SolverKind solver = SolverKind::grid_semilagrangian;
    KernelConfig kernel;

    void validate() const;
    double hx() const { return 2.0 * L / nx; }
    double hy() const { return 1.0 / ny; }
};

struct Diagnostics {
    double K = 0.0;
    double max_grad = 0.0;
    double min_x1_level = 0.0;   // NaN when not applicable
    double bound_ratio = 0.0;
    double mirror_drift = 0.0;   // pre-projection odd-symmetry defect of the last step
    int dt_halvings = 0;         // CFL interventions in the last step
};

struct SimState {
    double t = 0.0;
    SolverKind solver = SolverKind::grid_semilagrangian;
    VorticityField field;          // grid path
    PatchSet patches;              // contour path
    envelope::EnvelopeParams env;  // initial-data parameters
    Diagnostics diag;
};

// Fast Dirichlet Poisson solve on the right half [0,L]x[0,1] by sine-sine
// expansion (odd continuation across x1 = 0, mirrored periodic in x1).
class StripPoisson {
  public:
    StripPoisson(double L, int nx, int ny);
    ~StripPoisson();
    StripPoisson(const StripPoisson&) = delete;
    StripPoisson& operator=(const StripPoisson&) = delete;

    // psi over the full (nx+1)x(ny+1) grid from the full vorticity grid
    void solve(const VorticityField& w, std::vector<double>& psi) const;
    // velocity u = (d2 psi, -d1 psi) by second-order differences
    void velocity(const VorticityField& w, std::vector<double>& u1,
                  std::vector<double>& u2) const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl;
};

// omega0 = eps on the mollified (alpha)Omega_theta, odd-extended
SimState init_patch(const envelope::EnvelopeParams& p, const SimConfig& c);

SimState step(const SimState& s, const SimConfig& c);

struct GrowthMeasure {
    double max_grad = 0.0;
    double min_x1_level = 0.0;
    double bound_ratio = 0.0;
    bool applicable = false; // level set found inside the band
};
GrowthMeasure measure_growth(const SimState& s);

double kinetic_energy(const SimState& s, const SimConfig& c);
double right_half_integral(const VorticityField& w);

// kernel-path spot verification of the grid velocity
Vec2 kernel_velocity_at(const SimState& s, Vec2 x, const KernelConfig& cfg);

struct BoundarySample {
    double s = 0.0;
    double u1 = 0.0, u2 = 0.0;
    bool ok = false;
};

struct BoundaryReport {
    bool hypothesis_ok = false;
    double hypothesis_violation_measure = 0.0;
    std::string verdict;
    std::vector<BoundarySample> inner;   // sign checks on s in [theta, s0]
    std::vector<BoundarySample> outer;   // penetration bound on s in [s0, 1/e]
    double fitted_Cprime = 0.0;
    double left_sup_scaled = 0.0;  // (1/theta alpha) sup u1(theta alpha, .)
    double left_rhs = 0.0;         // eps(-h |ln theta| + C0 f) + (e/alpha) inf u1(alpha/e, .)
    double fitted_C0 = 0.0;
    double alpha_prime_used = 0.0;
    double min_normal_gap = 0.0;   // min over samples of u.n - V0.n
    bool inner_pass = false, outer_pass = false, left_pass = false;
};
BoundaryReport verify_boundary_conditions(const SimState& s, const envelope::EnvelopeParams& p,
                                          const ode::Constants& k);

} // namespace stripflow::sim

#endif
