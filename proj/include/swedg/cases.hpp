#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "swedg/limiting.hpp"
#include "swedg/mesh.hpp"
#include "swedg/physics.hpp"
#include "swedg/semidiscretization.hpp"
#include "swedg/time_integration.hpp"

namespace swedg {

// Which blending-weight strategy drives the hybrid assembly.
enum class LimiterKind {
    none,          // pure high-order scheme
    fct,           // per-stage flux-corrected weights bounding the water height
    element,       // per-element modal indicator, spread to face neighbors
    frozen_random, // seed-keyed nodal draws, fixed for the whole run
};

// Everything needed to reproduce one experiment: the realized mesh, pointwise
// initial data, scheme selections, time controls, and requested outputs. The
// pointwise functions are evaluable anywhere in the domain; the bottom never
// depends on time.
struct CaseDefinition {
    std::string name;
    CurvedQuadMesh mesh;
    std::function<double(double, double)> surface;  // H at t = 0
    std::function<Vec2(double, double)> velocity0;  // velocity at t = 0
    std::function<double(double, double)> bottom;
    PhysicsParams physics;
    StaggeredFormula formula = StaggeredFormula::pairwise;
    FluxVariant variant = FluxVariant::ersing_jump;
    LimiterKind limiter = LimiterKind::none;
    std::uint64_t seed = 1;
    TimeControls time;
    bool wet_dry = false; // desingularize momenta, force low order near dry
    bool verify_bounds = false; // count fct stage updates that leave their bounds
    std::function<State(double, double, double)> forcing; // (x, y, t); may be empty
    std::function<State(double, double, double)> exact;   // (x, y, t); may be empty
    std::vector<Vec2> gauges;
    long snapshot_step = 0; // extra field snapshot after this many steps
};

// Nodal bottom/initial data realized on the definition's mesh.
std::vector<double> nodal_bottom(const CaseDefinition& def);
std::vector<State> nodal_initial(const CaseDefinition& def);

// Smoothly forced periodic flow on a warped square whose exact solution is
// known in closed form: cosine surface waves over a cosine bottom carried at
// constant velocity 0.5 in both directions. cells_per_side sets the square
// grid the warp is applied to; 4 is the coarsest rung of the refinement
// ladder (16 elements), and doubling it refines by 2x.
CaseDefinition manufactured_case(int cells_per_side = 4);

// Lake at rest over a cosine bump on a curved 96-element mesh with slip
// walls, driven with frozen random nodal blending weights drawn from the
// seed. Any surface motion is discretization error.
CaseDefinition well_balanced_case(std::uint64_t seed);

// Quarter-disk dam break in the corner of [0,4]^2 over a cosine bottom with
// flux-corrected blending on the water height. The formula must be pairwise
// or alternative; the initial state is symmetric under swapping x and y.
CaseDefinition circular_dam_break_case(StaggeredFormula formula);

// Reservoir released through a gate into a shallow channel with an oblique
// obstacle, banked side walls, Manning friction, and wet/dry handling.
// degree must be 3 or 5. The mesh is read from mesh_path; a missing file is
// an error.
CaseDefinition channel_case(int degree, double t_end, const std::string& mesh_path);

// Corner-node description of the 462-element channel mesh: 13x10 reservoir
// columns, a two-column gate band between wall pylons, a 24x10 downstream
// grid, and an 18x6 ring fitted around the rotated obstacle. All validated
// strictly convex. The committed copy lives in data/.
QuadMeshSpec build_channel_mesh();

// Drives one case: assembles the blended right side with the case's limiter,
// forcing, and friction, and advances it in time with the strong-stability
// Runge-Kutta scheme. The most recent blending weights are kept for output.
class CaseEngine {
  public:
    explicit CaseEngine(CaseDefinition def);

    const CaseDefinition& def() const { return def_; }
    const std::vector<double>& bottom() const { return b_; }
    const std::vector<State>& state() const { return u_; }
    const BlendField& last_alpha() const { return alpha_; }
    double time() const { return t_; }

    // Stage updates whose height left the limiter's bounds by more than the
    // roundoff slack. Counted only when the definition asks for it.
    long bound_violations() const { return bound_violations_; }

    // Right side at (u, t). dt is the step the stage belongs to; it must be
    // positive when the limiter is fct, whose bounds look one step ahead.
    std::vector<State> rhs(const std::vector<State>& u, double t, double dt);

    // Advance to the case's end time; after_step (when set) runs after every
    // accepted step with the step count and the new time.
    void run(const std::function<void(long, double)>& after_step = {});

  private:
    CaseDefinition def_;
    std::vector<double> b_;
    std::vector<State> u_;
    BlendField alpha_;
    BlendField frozen_;
    double t_ = 0.0;
    double dt_ = 0.0;
    long bound_violations_ = 0;
};

// Discrete L2 errors (h, hv1, hv2) against the exact solution at time t.
// Solution and geometry interpolants are sampled on a dense per-element
// Gauss rule (twice the nodal resolution) so the norm is not aliased by the
// collocation points; the result is normalized by the measured domain area
// and square-rooted. The exact solution is evaluated at the interpolated
// node positions, i.e. on the geometry the solver actually discretizes.
std::array<double, 3> l2_error(const std::vector<State>& u, const CurvedQuadMesh& mesh,
                               const std::function<State(double, double, double)>& exact,
                               double t);

// Error rows of a 2x-refinement sequence plus observed orders between
// consecutive rows. eoc[0] and any entry whose errors vanish are NaN,
// printed as a dash.
struct ErrorTable {
    std::vector<std::array<double, 3>> error;
    std::vector<std::array<double, 3>> eoc;
};
ErrorTable l2_error_and_eoc(const std::vector<const CurvedQuadMesh*>& meshes,
                            const std::vector<std::vector<State>>& states,
                            const std::function<State(double, double, double)>& exact,
                            double t);

// Water-surface probes at fixed physical points. Reference coordinates are
// found once at construction by Newton inversion of the element mappings;
// sampling interpolates H = h + b with the element's full tensor basis.
// Construction fails when a point lies outside every element.
class GaugeSet {
  public:
    GaugeSet(const CurvedQuadMesh& mesh, const std::vector<Vec2>& points);

    int size() const { return static_cast<int>(at_.size()); }
    std::vector<double> sample(const std::vector<State>& u,
                               const std::vector<double>& b) const;

  private:
    const CurvedQuadMesh* mesh_;
    std::vector<LocatedPoint> at_;
};

// Quadrature-weighted totals of the conserved quantities over the mesh.
State conserved_totals(const std::vector<State>& u, const CurvedQuadMesh& mesh);

} // namespace swedg
