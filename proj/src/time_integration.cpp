#include "swedg/time_integration.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "swedg/physics.hpp"

namespace swedg {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

bool finite(const State& u) {
    return std::isfinite(u.h) && std::isfinite(u.hv1) && std::isfinite(u.hv2);
}

void check_stage(const std::vector<State>& u, int stage) {
    for (const State& s : u)
        if (!finite(s))
            fail("non-finite state in Runge-Kutta stage " + std::to_string(stage));
}

} // namespace

std::vector<State> ssprk33_step(const RhsFn& rhs, const std::vector<State>& u, double t,
                                double dt) {
    const std::size_t n = u.size();

    std::vector<State> k = rhs(u, t);
    std::vector<State> u1(n);
    for (std::size_t m = 0; m < n; ++m) u1[m] = u[m] + dt * k[m];
    check_stage(u1, 1);

    k = rhs(u1, t + dt);
    std::vector<State> u2(n);
    for (std::size_t m = 0; m < n; ++m)
        u2[m] = 0.75 * u[m] + 0.25 * (u1[m] + dt * k[m]);
    check_stage(u2, 2);

    k = rhs(u2, t + 0.5 * dt);
    std::vector<State> out(n);
    for (std::size_t m = 0; m < n; ++m)
        out[m] = (1.0 / 3.0) * u[m] + (2.0 / 3.0) * (u2[m] + dt * k[m]);
    check_stage(out, 3);
    return out;
}

double compute_dt(const std::vector<State>& u, const CurvedQuadMesh& mesh, double cfl,
                  const PhysicsParams& p) {
    if (!(cfl > 0.0)) fail("CFL number must be positive, got " + std::to_string(cfl));
    const int np = mesh.np();
    const std::vector<double>& wq = mesh.ops.weights;
    const double floor_speed = std::sqrt(p.gravity * p.h_partial_dry);

    double smallest = std::numeric_limits<double>::infinity();
    for (int e = 0; e < mesh.n_elements; ++e) {
        for (int j = 0; j < np; ++j) {
            for (int i = 0; i < np; ++i) {
                const int n = mesh.nidx(e, i, j);
                const Vec2 vel = velocity(u[n], p);
                const double wave = std::sqrt(p.gravity * std::max(u[n].h, 0.0));
                for (int dir = 0; dir < 2; ++dir) {
                    const Vec2 a = mesh.metric(dir, e, i, j);
                    const double len = norm(a);
                    const double width = mesh.jac[n] * wq[dir == 0 ? i : j] / len;
                    const double speed =
                        std::max(std::abs(dot(vel, a)) / len + wave, floor_speed);
                    smallest = std::min(smallest, width / speed);
                }
            }
        }
    }
    return cfl * smallest;
}

std::vector<State> advance(const RhsFn& rhs, std::vector<State> u, const TimeControls& tc,
                           const CurvedQuadMesh& mesh, const PhysicsParams& p,
                           const std::function<void(long, double, const std::vector<State>&)>&
                               after_step,
                           const std::function<void(long, double, double)>& before_step) {
    if (!(tc.t_end >= 0.0)) fail("t_end must be non-negative");
    if (tc.fixed_dt && !(tc.dt > 0.0)) fail("fixed time step must be positive");

    double t = 0.0;
    long step = 0;
    while (t < tc.t_end) {
        if (step >= tc.max_steps)
            fail("step limit " + std::to_string(tc.max_steps) + " reached at t = " +
                 std::to_string(t));
        double dt = tc.fixed_dt ? tc.dt : compute_dt(u, mesh, tc.cfl, p);
        if (!(dt > 0.0) || !std::isfinite(dt))
            fail("time step degenerated to " + std::to_string(dt));
        bool last = false;
        if (dt >= tc.t_end - t) {
            dt = tc.t_end - t;
            last = true;
        }
        if (before_step) before_step(step + 1, t, dt);
        u = ssprk33_step(rhs, u, t, dt);
        t = last ? tc.t_end : t + dt;
        ++step;
        if (after_step) after_step(step, t, u);
    }
    return u;
}

} // namespace swedg
