#pragma once

#include <cstdint>
#include <vector>

#include "swedg/mesh.hpp"
#include "swedg/operators.hpp"
#include "swedg/semidiscretization.hpp"
#include "swedg/state.hpp"

namespace swedg {

// Local admissible range of the total water height H = h + b per node.
struct NodalBounds {
    std::vector<double> H_min, H_max;
};

// Runs the low-order update one forward-Euler stage ahead and takes the
// extrema of its H over the node's axis neighbors inside the element, the
// node itself, and the matching node across each element face the node
// touches. Physical boundaries truncate the stencil.
NodalBounds fv_predictor_bounds(const std::vector<State>& u, const std::vector<double>& b,
                                const StaggeredFluxField& fv, const CurvedQuadMesh& mesh,
                                double dt);

// Zalesak-style flux correction on the water height: the antidiffusive part
// of each interior interface (high-order minus low-order, per adjacent node)
// is scaled so the stage update stays inside the given bounds, with slack
// 1e-12*(1+|H|) against roundoff. Element-boundary interface weights stay 0;
// blending is a no-op there. Bounds the low-order update itself violates
// beyond the slack are an error.
BlendField zalesak_fct(const StaggeredFluxField& dg, const StaggeredFluxField& fv,
                       const NodalBounds& bounds, const std::vector<State>& u,
                       const std::vector<double>& b, const CurvedQuadMesh& mesh, double dt);

// Smooth ramp of the top-mode energy fraction of one element's h values into
// [0, 0.5]: modal energy with max(k,l) = N over total energy, mapped through
// a logistic centered at the degree-dependent threshold, zeroed below 1e-3.
// h holds the (N+1)^2 nodal values in element storage order.
double modal_indicator(const double* h, const SbpOperators& ops, const ModalTransform& mt);

// Per-element weights: modal indicator, then each element takes at least
// half of its largest face neighbor's raw value, then any element with a
// node under h_partial_dry is forced to 1.
std::vector<double> element_alphas(const std::vector<State>& u, const CurvedQuadMesh& mesh,
                                   const PhysicsParams& p);

// Spreads per-element weights onto every interface slot; a shared face takes
// the larger of the two element values.
BlendField element_blend(const std::vector<double>& alpha_e, const CurvedQuadMesh& mesh);

// Forces every interface weight of an element to 1 when any of its nodes is
// under h_partial_dry. Applied after any limiter so near-dry elements always
// run the low-order update.
void apply_dry_override(const std::vector<State>& u, const CurvedQuadMesh& mesh,
                        const PhysicsParams& p, BlendField& alpha);

// Deterministic weights in [0,1) from a counter-based hash of
// (seed, direction, interface slot); identical across runs and platforms.
BlendField frozen_random_blend(const CurvedQuadMesh& mesh, std::uint64_t seed);

} // namespace swedg
