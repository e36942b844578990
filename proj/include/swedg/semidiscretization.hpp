#pragma once

#include <vector>

#include "swedg/mesh.hpp"
#include "swedg/physics.hpp"

namespace swedg {

// How the per-interface staggered fluxes are built from the two-point terms.
//
//   pairwise     prefix sums plus a correction tied to the entry's own node,
//                present in every interior entry; both orientations of an
//                interface follow the same expression (config name "new")
//   alternative  the same prefix sums, but the correction appears only in the
//                last minus-oriented entry; interface orientations disagree
//   symmetric    prefix sums of local-times-symmetric two-point terms with no
//                correction; the only construction available for
//                FluxVariant::wintermeyer_symmetric
//
// pairwise/alternative require a flux variant whose non-conservative term
// factors into local times jump; symmetric requires the symmetric variant.
// Incompatible pairings raise an unsupported-formulation error.
enum class StaggeredFormula {
    pairwise,
    alternative,
    symmetric,
};

// Exterior state and bathymetry seen across each face, stored in the owning
// side's node order. Filled from the neighbor for interior/periodic faces and
// from the boundary rule otherwise (wall: mirrored normal velocity; outflow:
// copy). Gathering is the only phase that reads other elements' data.
struct FaceTraces {
    int N = 0;
    std::vector<State> u;
    std::vector<double> b;

    std::size_t idx(int e, int side, int k) const {
        return (static_cast<std::size_t>(e) * 4 + side) * (N + 1) + k;
    }
};

FaceTraces gather_traces(const std::vector<State>& u, const std::vector<double>& b,
                         const CurvedQuadMesh& mesh);

// Staggered fluxes of one assembly. For each node line both orientations are
// kept: g1_minus[nidx(e,i,j)] faces the interface at i-1/2 from node i and
// g1_plus[nidx(e,i,j)] the one at i+1/2; entries at i=0 (minus) and i=N (plus)
// are the element surface terms. g2_* mirror this in the second direction
// with the roles of i and j exchanged.
struct StaggeredFluxField {
    int N = 0;
    std::vector<State> g1_minus, g1_plus, g2_minus, g2_plus;
};

// Per-interface blending weights in [0,1]: a1 holds the weight of interface
// (i-1/2, j) at idx1(e,i,j) for i = 0..N+1, a2 the weight of (i, j-1/2) at
// idx2(e,i,j) for j = 0..N+1.
struct BlendField {
    int N = 0;
    std::vector<double> a1, a2;

    std::size_t idx1(int e, int i, int j) const {
        return (static_cast<std::size_t>(e) * (N + 1) + j) * (N + 2) + i;
    }
    std::size_t idx2(int e, int i, int j) const {
        return (static_cast<std::size_t>(e) * (N + 1) + i) * (N + 2) + j;
    }
};

BlendField uniform_blend(const CurvedQuadMesh& mesh, double alpha);

// A shared interface takes the larger of the two nodal weights.
inline double interface_alpha(double aL, double aR) { return aL < aR ? aR : aL; }

// Reference assembly: volume two-point sums with S and surface terms with
// node-local metrics, divided by the nodal mass J*w_i*w_j. Serves as the
// oracle the staggered paths are tested against. Throws on non-finite input.
std::vector<State> dg_rhs_direct(const std::vector<State>& u, const std::vector<double>& b,
                                 const FaceTraces& traces, const CurvedQuadMesh& mesh,
                                 FluxVariant variant, const PhysicsParams& p);

// High-order staggered fluxes for the requested formula.
StaggeredFluxField staggered_fluxes(StaggeredFormula formula, const std::vector<State>& u,
                                    const std::vector<double>& b, const FaceTraces& traces,
                                    const CurvedQuadMesh& mesh, FluxVariant variant,
                                    const PhysicsParams& p);

// First-order subcell fluxes: the surface-term recipe applied at interior
// node pairs with each side's own state and node-local metric; entries at the
// element boundary equal the high-order surface terms.
StaggeredFluxField fv_fluxes(const std::vector<State>& u, const std::vector<double>& b,
                             const FaceTraces& traces, const CurvedQuadMesh& mesh,
                             FluxVariant variant, const PhysicsParams& p);

// Convex per-interface combination of the two flux fields followed by the
// difference/weight step. Throws if any blending weight leaves [0,1].
std::vector<State> blend_assemble(const StaggeredFluxField& dg, const StaggeredFluxField& fv,
                                  const BlendField& alpha, const CurvedQuadMesh& mesh);

// One reference-direction line of the staggered construction, exposed for
// property tests (index relabeling, orientation checks). u, b, ja hold the
// N+1 nodal values along the line; (u_left, b_left) and (u_right, b_right)
// are the exterior traces across the line's start and end. Writes N+1
// minus- and plus-oriented entries.
void staggered_line(StaggeredFormula formula, FluxVariant variant, const SbpOperators& ops,
                    const State* u, const double* b, const Vec2* ja, const State& u_left,
                    double b_left, const State& u_right, double b_right, const PhysicsParams& p,
                    State* minus, State* plus);

} // namespace swedg
