#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "swedg/limiting.hpp"
#include "swedg/mesh.hpp"
#include "swedg/physics.hpp"
#include "swedg/semidiscretization.hpp"

using namespace swedg;

namespace {

constexpr double kPi = 3.14159265358979323846;

PhysicsParams params(double g) {
    PhysicsParams p;
    p.gravity = g;
    return p;
}

// Smooth warp of [-1,1]^2 that leaves the domain boundary in place.
Vec2 sine_warp(double px, double py) {
    return {px + 0.1 * std::sin(kPi * py) * std::cos(0.5 * kPi * px),
            py + 0.1 * std::sin(kPi * px) * std::cos(0.5 * kPi * py)};
}

CurvedQuadMesh warped_mesh(const BoundarySpec& bc) {
    return warp_mesh(build_cartesian(-1.0, 1.0, -1.0, 1.0, 3, 3, 3, bc), sine_warp, 3);
}

BoundarySpec all_walls() {
    BoundarySpec bc;
    bc.left = bc.right = bc.bottom = bc.top = BoundaryTag::wall;
    return bc;
}

double bump(double px, double py) {
    const double r = std::sqrt(px * px + py * py);
    return r <= 0.4 ? 0.2 * (1.0 + std::cos(2.5 * kPi * r)) : 0.0;
}

std::vector<double> nodal_bottom(const CurvedQuadMesh& mesh, double (*f)(double, double)) {
    std::vector<double> b(mesh.x.size());
    for (std::size_t n = 0; n < b.size(); ++n) b[n] = f(mesh.x[n], mesh.y[n]);
    return b;
}

std::vector<State> still_water(const std::vector<double>& b, double H0) {
    std::vector<State> u(b.size());
    for (std::size_t n = 0; n < b.size(); ++n) u[n] = {H0 - b[n], 0.0, 0.0};
    return u;
}

struct FluxFields {
    StaggeredFluxField dg, fv;
};

FluxFields fields(StaggeredFormula formula, FluxVariant variant, const std::vector<State>& u,
                  const std::vector<double>& b, const CurvedQuadMesh& mesh,
                  const PhysicsParams& p) {
    const FaceTraces traces = gather_traces(u, b, mesh);
    return {staggered_fluxes(formula, u, b, traces, mesh, variant, p),
            fv_fluxes(u, b, traces, mesh, variant, p)};
}

std::vector<double> height_after(const std::vector<State>& u, const std::vector<double>& b,
                                 const std::vector<State>& rhs, double dt) {
    std::vector<double> H(u.size());
    for (std::size_t n = 0; n < u.size(); ++n) H[n] = u[n].h + dt * rhs[n].h + b[n];
    return H;
}

// Nodal values of a 2D modal coefficient array c[l*(N+1)+k].
std::vector<double> nodal_from_modal(const ModalTransform& mt, const std::vector<double>& c) {
    const int np = mt.N + 1;
    std::vector<double> tmp(c.size(), 0.0), h(c.size(), 0.0);
    for (int l = 0; l < np; ++l)
        for (int i = 0; i < np; ++i) {
            double acc = 0.0;
            for (int k = 0; k < np; ++k) acc += mt.from_modal[i * np + k] * c[l * np + k];
            tmp[l * np + i] = acc;
        }
    for (int j = 0; j < np; ++j)
        for (int i = 0; i < np; ++i) {
            double acc = 0.0;
            for (int l = 0; l < np; ++l) acc += mt.from_modal[j * np + l] * tmp[l * np + i];
            h[j * np + i] = acc;
        }
    return h;
}

} // namespace

TEST_CASE("uniform states collapse the predictor bounds") {
    const CurvedQuadMesh mesh = warped_mesh(BoundarySpec{});
    const PhysicsParams p = params(9.81);
    const std::vector<State> u(mesh.x.size(), State{1.7, 0.9, -0.4});
    const std::vector<double> b(mesh.x.size(), 0.3);

    const FluxFields f = fields(StaggeredFormula::pairwise, FluxVariant::ersing_jump, u, b,
                                mesh, p);
    const NodalBounds bounds = fv_predictor_bounds(u, b, f.fv, mesh, 1e-3);

    for (std::size_t n = 0; n < u.size(); ++n) {
        REQUIRE(bounds.H_min[n] == bounds.H_max[n]);
        REQUIRE(bounds.H_min[n] == 1.7 + 0.3);
    }
}

TEST_CASE("still water pins the predictor bounds to the surface level") {
    const CurvedQuadMesh mesh = warped_mesh(all_walls());
    const PhysicsParams p = params(9.81);
    const std::vector<double> b = nodal_bottom(mesh, bump);
    const std::vector<State> u = still_water(b, 0.45);

    const FluxFields f = fields(StaggeredFormula::pairwise, FluxVariant::ersing_jump, u, b,
                                mesh, p);
    const NodalBounds bounds = fv_predictor_bounds(u, b, f.fv, mesh, 1e-3);

    for (std::size_t n = 0; n < u.size(); ++n) {
        REQUIRE(bounds.H_min[n] <= bounds.H_max[n]);
        REQUIRE(std::abs(bounds.H_min[n] - 0.45) <= 1e-12);
        REQUIRE(std::abs(bounds.H_max[n] - 0.45) <= 1e-12);
    }
}

TEST_CASE("a depth step widens the bounds across the interface") {
    const int N = 2;
    const CurvedQuadMesh mesh =
        build_interval(0.0, 2.0, 2, N, BoundaryTag::wall, BoundaryTag::wall);
    const PhysicsParams p = params(9.81);
    std::vector<State> u(mesh.x.size());
    for (int e = 0; e < 2; ++e)
        for (int n = 0; n < mesh.nodes_per_element(); ++n)
            u[mesh.nidx(e, 0, 0) + n] = {e == 0 ? 2.0 : 4.0, 0.0, 0.0};
    const std::vector<double> b(mesh.x.size(), 0.0);

    const FluxFields f = fields(StaggeredFormula::pairwise, FluxVariant::ersing_jump, u, b,
                                mesh, p);
    const NodalBounds bounds = fv_predictor_bounds(u, b, f.fv, mesh, 1e-4);

    // Nodes touching the shared face see both depths; nodes away from it
    // stay near their own element's level.
    const int touch_left = mesh.nidx(0, N, 0);
    const int touch_right = mesh.nidx(1, 0, 0);
    REQUIRE(bounds.H_max[touch_left] >= 3.5);
    REQUIRE(bounds.H_min[touch_left] <= 2.1);
    REQUIRE(bounds.H_max[touch_right] >= 3.9);
    REQUIRE(bounds.H_min[touch_right] <= 2.1);

    const int far_left = mesh.nidx(0, 0, 0);
    REQUIRE(bounds.H_max[far_left] <= 2.5);
    REQUIRE(bounds.H_min[far_left] >= 1.5);
    for (std::size_t n = 0; n < u.size(); ++n) {
        REQUIRE(bounds.H_min[n] >= 1.5);
        REQUIRE(bounds.H_max[n] <= 4.5);
    }
}

TEST_CASE("flux correction stays inactive on uniform flow") {
    const BoundarySpec bc;
    const CurvedQuadMesh mesh = build_cartesian(0.0, 2.0, 0.0, 1.0, 3, 2, 3, bc);
    const PhysicsParams p = params(9.81);
    const std::vector<State> u(mesh.x.size(), State{1.5, 0.6, -0.3});
    const std::vector<double> b(mesh.x.size(), 0.2);
    const double dt = 1e-3;

    const FluxFields f = fields(StaggeredFormula::pairwise, FluxVariant::ersing_jump, u, b,
                                mesh, p);
    const NodalBounds bounds = fv_predictor_bounds(u, b, f.fv, mesh, dt);
    const BlendField alpha = zalesak_fct(f.dg, f.fv, bounds, u, b, mesh, dt);

    for (double a : alpha.a1) REQUIRE(a == 0.0);
    for (double a : alpha.a2) REQUIRE(a == 0.0);

    const std::vector<State> limited = blend_assemble(f.dg, f.fv, alpha, mesh);
    const std::vector<State> plain = blend_assemble(f.dg, f.fv, uniform_blend(mesh, 0.0), mesh);
    for (std::size_t n = 0; n < limited.size(); ++n) {
        REQUIRE(limited[n].h == plain[n].h);
        REQUIRE(limited[n].hv1 == plain[n].hv1);
        REQUIRE(limited[n].hv2 == plain[n].hv2);
    }
}

TEST_CASE("flux correction keeps a dam break inside its bounds") {
    const BoundarySpec bc;
    const CurvedQuadMesh mesh = build_cartesian(0.0, 4.0, 0.0, 4.0, 6, 6, 3, bc);
    const PhysicsParams p = params(1.0);
    std::vector<double> b(mesh.x.size());
    std::vector<State> u(mesh.x.size());
    for (std::size_t n = 0; n < u.size(); ++n) {
        const double px = mesh.x[n], py = mesh.y[n];
        b[n] = 0.2 + 0.1 * std::sin(0.5 * kPi * px) * std::sin(0.5 * kPi * py);
        const double r = std::hypot(px - 2.0, py - 2.0);
        u[n] = {(r <= 1.0 ? 4.0 : 2.0) - b[n], 0.0, 0.0};
    }
    const double dt = 1e-3;

    const FluxFields f = fields(StaggeredFormula::pairwise, FluxVariant::ersing_jump, u, b,
                                mesh, p);
    const NodalBounds bounds = fv_predictor_bounds(u, b, f.fv, mesh, dt);
    const BlendField alpha = zalesak_fct(f.dg, f.fv, bounds, u, b, mesh, dt);

    double peak = 0.0;
    for (double a : alpha.a1) peak = std::max(peak, a);
    for (double a : alpha.a2) peak = std::max(peak, a);
    REQUIRE(peak > 0.01);

    auto check_bounds = [&](const BlendField& field) {
        const std::vector<double> H =
            height_after(u, b, blend_assemble(f.dg, f.fv, field, mesh), dt);
        for (std::size_t n = 0; n < H.size(); ++n) {
            const double slack = 1e-12 * (1.0 + std::abs(H[n]));
            REQUIRE(H[n] >= bounds.H_min[n] - slack);
            REQUIRE(H[n] <= bounds.H_max[n] + slack);
        }
    };
    check_bounds(alpha);

    // Pushing every weight further toward the low-order scheme must keep the
    // update inside the same envelope.
    BlendField firmer = alpha;
    for (double& a : firmer.a1) a = std::min(1.0, a + 0.3);
    for (double& a : firmer.a2) a = std::min(1.0, a + 0.3);
    check_bounds(firmer);
    check_bounds(uniform_blend(mesh, 1.0));

    // And the unlimited update must actually leave the envelope somewhere,
    // otherwise this case exercises nothing.
    const std::vector<double> raw =
        height_after(u, b, blend_assemble(f.dg, f.fv, uniform_blend(mesh, 0.0), mesh), dt);
    bool violated = false;
    for (std::size_t n = 0; n < raw.size() && !violated; ++n)
        violated = raw[n] > bounds.H_max[n] + 1e-9 || raw[n] < bounds.H_min[n] - 1e-9;
    REQUIRE(violated);
}

TEST_CASE("bad inputs to the flux correction are rejected") {
    const BoundarySpec bc;
    const CurvedQuadMesh mesh = build_cartesian(0.0, 1.0, 0.0, 1.0, 2, 2, 2, bc);
    const PhysicsParams p = params(9.81);
    std::vector<State> u(mesh.x.size());
    for (std::size_t n = 0; n < u.size(); ++n)
        u[n] = {2.0 + 0.5 * std::sin(2.0 * kPi * mesh.x[n]), 0.3, -0.1};
    const std::vector<double> b(mesh.x.size(), 0.0);
    const double dt = 1e-3;

    const FluxFields f = fields(StaggeredFormula::pairwise, FluxVariant::ersing_jump, u, b,
                                mesh, p);
    NodalBounds bounds = fv_predictor_bounds(u, b, f.fv, mesh, dt);

    REQUIRE_THROWS_AS(fv_predictor_bounds(u, b, f.fv, mesh, 0.0), std::runtime_error);
    REQUIRE_THROWS_AS(zalesak_fct(f.dg, f.fv, bounds, u, b, mesh, -1.0), std::runtime_error);

    // Bounds the low-order update cannot satisfy are a hard error.
    bounds.H_max[7] = bounds.H_min[7] - 1.0;
    REQUIRE_THROWS_AS(zalesak_fct(f.dg, f.fv, bounds, u, b, mesh, dt), std::runtime_error);
}

TEST_CASE("the modal indicator flags high-frequency content") {
    const SbpOperators ops = build_lgl_operators(3);
    const ModalTransform mt = build_modal_transform(ops);
    const int np = ops.np();
    const double threshold = 0.5 * std::pow(10.0, -1.8 * std::pow(ops.N + 1.0, 0.25));

    std::vector<double> h(static_cast<std::size_t>(np) * np, 1.3);
    REQUIRE(modal_indicator(h.data(), ops, mt) == 0.0);

    std::vector<double> c(h.size(), 0.0);
    c[ops.N] = 1.0; // top mode in the first direction
    h = nodal_from_modal(mt, c);
    REQUIRE(modal_indicator(h.data(), ops, mt) == Catch::Approx(0.5).margin(1e-12));

    // Energy split exactly at the threshold lands halfway up the ramp.
    c.assign(h.size(), 0.0);
    c[0] = std::sqrt(1.0 - threshold);
    c[ops.N] = std::sqrt(threshold);
    h = nodal_from_modal(mt, c);
    REQUIRE(modal_indicator(h.data(), ops, mt) == Catch::Approx(0.25).margin(1e-12));

    std::mt19937_64 rng(91);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        for (double& v : h) v = 2.0 + dist(rng);
        const double a = modal_indicator(h.data(), ops, mt);
        REQUIRE(a >= 0.0);
        REQUIRE(a <= 0.5);
    }
}

TEST_CASE("element weights spread to neighbors and force dry cells") {
    const int N = 3;
    const CurvedQuadMesh mesh =
        build_interval(0.0, 3.0, 3, N, BoundaryTag::wall, BoundaryTag::wall);
    const PhysicsParams p = params(9.81);
    const SbpOperators& ops = mesh.ops;

    std::vector<State> u(mesh.x.size(), State{1.0, 0.0, 0.0});
    for (int j = 0; j < ops.np(); ++j)
        for (int i = 0; i < ops.np(); ++i)
            u[mesh.nidx(1, i, j)].h = 2.0 + 0.5 * legendre(N, ops.nodes[i]).p;

    std::vector<double> alpha = element_alphas(u, mesh, p);
    REQUIRE(alpha[1] == Catch::Approx(0.5).margin(1e-12));
    REQUIRE(alpha[0] == Catch::Approx(0.25).margin(1e-12));
    REQUIRE(alpha[2] == Catch::Approx(0.25).margin(1e-12));

    u[mesh.nidx(2, 1, 1)].h = 5e-5;
    alpha = element_alphas(u, mesh, p);
    REQUIRE(alpha[2] == 1.0);
    REQUIRE(alpha[1] == Catch::Approx(0.5).margin(1e-12));

    const BlendField field = element_blend(alpha, mesh);
    REQUIRE(field.a1[field.idx1(1, 2, 0)] == Catch::Approx(0.5).margin(1e-12));
    // The face shared with the dry element takes the larger value.
    REQUIRE(field.a1[field.idx1(1, ops.np(), 0)] == 1.0);
    REQUIRE(field.a1[field.idx1(2, 0, 0)] == 1.0);

    REQUIRE_THROWS_AS(element_blend({0.5, 1.5, 0.0}, mesh), std::runtime_error);

    BlendField base = uniform_blend(mesh, 0.3);
    apply_dry_override(u, mesh, p, base);
    REQUIRE(base.a1[base.idx1(2, 1, 0)] == 1.0);
    REQUIRE(base.a2[base.idx2(2, 1, 1)] == 1.0);
    REQUIRE(base.a1[base.idx1(0, 1, 0)] == 0.3);
}

TEST_CASE("frozen random weights are reproducible") {
    const BoundarySpec bc;
    const CurvedQuadMesh mesh = build_cartesian(0.0, 1.0, 0.0, 1.0, 3, 2, 3, bc);

    const BlendField a = frozen_random_blend(mesh, 2024);
    const BlendField again = frozen_random_blend(mesh, 2024);
    const BlendField other = frozen_random_blend(mesh, 7);

    REQUIRE(a.a1 == again.a1);
    REQUIRE(a.a2 == again.a2);
    REQUIRE(a.a1 != other.a1);

    double lo = 1.0, hi = 0.0;
    for (double v : a.a1) {
        REQUIRE(v >= 0.0);
        REQUIRE(v < 1.0);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    REQUIRE(lo < 0.35);
    REQUIRE(hi > 0.8);

    // The two owners of a shared face must agree on its weights, and the
    // weight there can only grow past either side's interior neighbor value
    // by taking the max across the face.
    const int np = mesh.np();
    for (int e = 0; e < mesh.n_elements; ++e) {
        const FaceLink& f = mesh.faces[e][1];
        REQUIRE(f.neighbor >= 0);
        for (int k = 0; k < np; ++k) {
            const int kn = f.reversed ? mesh.N - k : k;
            REQUIRE(a.a1[a.idx1(e, np, k)] == a.a1[a.idx1(f.neighbor, 0, kn)]);
        }
    }
}

TEST_CASE("still water survives the full correction pipeline") {
    const CurvedQuadMesh mesh = warped_mesh(all_walls());
    const PhysicsParams p = params(9.81);
    const std::vector<double> b = nodal_bottom(mesh, bump);
    const std::vector<State> u = still_water(b, 0.45);
    const double dt = 1e-3;

    const FluxFields f = fields(StaggeredFormula::pairwise, FluxVariant::ersing_jump, u, b,
                                mesh, p);
    const NodalBounds bounds = fv_predictor_bounds(u, b, f.fv, mesh, dt);
    const BlendField alpha = zalesak_fct(f.dg, f.fv, bounds, u, b, mesh, dt);
    const std::vector<State> rhs = blend_assemble(f.dg, f.fv, alpha, mesh);

    double rest = 0.0;
    for (const State& s : rhs) rest = std::max(rest, max_abs(s));
    REQUIRE(rest <= 1e-11);
}
