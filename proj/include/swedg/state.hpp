#pragma once

#include <cmath>

namespace swedg {

// Conserved variables of the shallow water system: water column height h and
// the two momentum components hv1, hv2. Bottom topography b is carried
// separately (it is constant in time).
struct State {
    double h = 0.0;
    double hv1 = 0.0;
    double hv2 = 0.0;

    State& operator+=(const State& o) {
        h += o.h;
        hv1 += o.hv1;
        hv2 += o.hv2;
        return *this;
    }
    State& operator-=(const State& o) {
        h -= o.h;
        hv1 -= o.hv1;
        hv2 -= o.hv2;
        return *this;
    }
    State& operator*=(double a) {
        h *= a;
        hv1 *= a;
        hv2 *= a;
        return *this;
    }
};

inline State operator+(State a, const State& b) { return a += b; }
inline State operator-(State a, const State& b) { return a -= b; }
inline State operator*(double a, State u) { return u *= a; }
inline State operator*(State u, double a) { return u *= a; }
inline State operator-(const State& u) { return {-u.h, -u.hv1, -u.hv2}; }

// Componentwise product, used for assembling split non-conservative terms.
inline State hadamard(const State& a, const State& b) {
    return {a.h * b.h, a.hv1 * b.hv1, a.hv2 * b.hv2};
}

inline double max_abs(const State& u) {
    return std::max(std::abs(u.h), std::max(std::abs(u.hv1), std::abs(u.hv2)));
}

// A plane vector, used for metric terms and normals.
struct Vec2 {
    double x1 = 0.0;
    double x2 = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x1 + b.x1, a.x2 + b.x2}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x1 - b.x1, a.x2 - b.x2}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x1, s * a.x2}; }
inline double dot(Vec2 a, Vec2 b) { return a.x1 * b.x1 + a.x2 * b.x2; }
inline double norm(Vec2 a) { return std::hypot(a.x1, a.x2); }

// Pair of directional fluxes (f1, f2); a contraction with a metric vector
// yields the flux through the corresponding reference direction.
struct BlockFlux {
    State f1;
    State f2;
};

inline State contract(const BlockFlux& f, Vec2 a) {
    return a.x1 * f.f1 + a.x2 * f.f2;
}

struct PhysicsParams {
    double gravity = 9.81;
    // Below 5*eps_dry a node counts as dry: velocities are zero and two-point
    // volume fluxes vanish.
    double eps_dry = 1e-13;
    // Velocity desingularization threshold; damping sets in around
    // h ~ sqrt(tau_vel).
    double tau_vel = 1e-8;
    // Elements containing a node below this height are treated as partially
    // dry and are advanced with the pure subcell scheme.
    double h_partial_dry = 1e-4;
    // Manning roughness coefficient; zero disables bottom friction.
    double manning_n = 0.0;
};

} // namespace swedg
