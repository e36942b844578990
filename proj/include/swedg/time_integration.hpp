#pragma once

#include <functional>
#include <vector>

#include "swedg/mesh.hpp"
#include "swedg/state.hpp"

namespace swedg {

// Step-size policy and stopping point of a run. Either a fixed dt or a CFL
// number drives the step; max_steps is a safety net against stalls.
struct TimeControls {
    bool fixed_dt = false;
    double dt = 0.0;
    double cfl = 0.0;
    double t_end = 0.0;
    long max_steps = 100000000;
};

using RhsFn = std::function<std::vector<State>(const std::vector<State>&, double)>;

// One three-stage third-order strong-stability-preserving Runge-Kutta step
// in convex Shu-Osher form. Throws when a stage yields a non-finite value,
// naming the stage.
std::vector<State> ssprk33_step(const RhsFn& rhs, const std::vector<State>& u, double t,
                                double dt);

// CFL times the smallest nodal crossing time: per direction, the subcell
// width (Jacobian times quadrature weight over the metric length) divided by
// the directional wavespeed. The wavespeed is floored at the gravity-wave
// speed of h_partial_dry so dry regions never stall the clock.
double compute_dt(const std::vector<State>& u, const CurvedQuadMesh& mesh, double cfl,
                  const PhysicsParams& p);

// Advances u to t_end with ssprk33_step, clipping the final step to land on
// t_end exactly; after_step (when set) sees (step count, new time, state)
// after every accepted step, and before_step sees (upcoming step count, old
// time, chosen dt) once the step size is fixed, ahead of the stages.
std::vector<State> advance(const RhsFn& rhs, std::vector<State> u, const TimeControls& tc,
                           const CurvedQuadMesh& mesh, const PhysicsParams& p,
                           const std::function<void(long, double, const std::vector<State>&)>&
                               after_step = {},
                           const std::function<void(long, double, double)>& before_step = {});

} // namespace swedg
