#pragma once

#include <array>

#include "swedg/state.hpp"

namespace swedg {

// Flux/non-conservative-term pairings selectable at run time. The first is
// the well-balanced default; the other two reproduce known non-balanced
// schemes and serve as controls.
enum class FluxVariant {
    ersing_jump,           // pressure-free flux, local-times-jump of h+b
    wintermeyer_jump,      // flux with pressure, local-times-jump of b
    wintermeyer_symmetric, // flux with pressure, local-times-symmetric in b
};

// Velocity via desingularized division. Exactly zero when h <= 5*eps_dry.
Vec2 velocity(const State& u, const PhysicsParams& p);

// Rewrites the momenta as h times the desingularized velocity; h unchanged.
State desingularize(const State& u, const PhysicsParams& p);

// Pointwise advective fluxes of the pressure-free formulation.
BlockFlux physical_flux(const State& u, const PhysicsParams& p);

// Symmetric two-point volume fluxes. Both directions at once; returns zero
// when either argument is dry.
BlockFlux volume_flux(FluxVariant variant, const State& uL, const State& uR,
                      const PhysicsParams& p);

// Local factor of the split non-conservative term for the two jump variants,
// already contracted with a metric vector: (0, g/2 h a1, g/2 h a2).
State noncons_local(const State& u, Vec2 Ja, const PhysicsParams& p);

// Jump factor of the split non-conservative term, ordered (own, ext):
// (0, j, j) with j the jump of h+b (ersing_jump) or of b (wintermeyer_jump).
State noncons_jump(FluxVariant variant, const State& u_own, double b_own,
                   const State& u_ext, double b_ext);

// Local and symmetric factors of the local-times-symmetric variant:
// (0, g h, g h) and (0, avg(a1) avg(b), avg(a2) avg(b)).
State noncons_local_sym(const State& u, const PhysicsParams& p);
State noncons_sym(Vec2 JaL, double bL, Vec2 JaR, double bR);

// Entropy variables (g(h+b) - |v|^2/2, v1, v2) with desingularized velocity.
std::array<double, 3> entropy_vars(const State& u, double b, const PhysicsParams& p);

// Symmetric positive semi-definite matrix turning entropy-variable jumps into
// conserved-variable jumps; exact when the bottom is continuous across the
// interface. Degenerate (all zero, flagged) when avg(h) <= 0.
struct DissipationMatrixH {
    std::array<double, 9> m{}; // row-major 3x3
    bool degenerate = false;
};
DissipationMatrixH dissipation_matrix(const State& uL, const State& uR,
                                      const PhysicsParams& p);
State apply(const DissipationMatrixH& H, const std::array<double, 3>& w);

// Largest |v.n| + sqrt(g max(h,0)) over the two sides; n must be unit length.
double max_wavespeed(const State& uL, const State& uR, Vec2 n_unit,
                     const PhysicsParams& p);

// Full surface term seen by the owning node: two-point flux and the
// non-conservative product evaluated with the owner's metric, plus
// entropy-stable dissipation. sigma is +1 when the exterior lies in the
// positive reference direction and -1 otherwise.
State surface_flux(FluxVariant variant, const State& u_own, double b_own,
                   const State& u_ext, double b_ext, Vec2 Ja_own, int sigma,
                   const PhysicsParams& p);

// Explicit Manning bottom friction acting on the momenta.
State manning_source(const State& u, const PhysicsParams& p);

// Entropy production of one pair of nodes under metric aliasing; vanishes
// whenever the metric vector, or h+b together with the momentum, agree.
double entropy_residual(const State& u_i, double b_i, Vec2 Ja_i,
                        const State& u_m, double b_m, Vec2 Ja_m,
                        const PhysicsParams& p);

} // namespace swedg
