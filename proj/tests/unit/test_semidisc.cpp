#include <array>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

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

std::vector<State> random_field(const CurvedQuadMesh& mesh, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> h_dist(0.6, 2.4);
    std::uniform_real_distribution<double> hv_dist(-1.2, 1.2);
    std::vector<State> u(mesh.n_elements * mesh.nodes_per_element());
    for (auto& s : u) {
        s = {h_dist(rng), hv_dist(rng), hv_dist(rng)};
    }
    return u;
}

std::vector<double> random_bottom(const CurvedQuadMesh& mesh, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> b_dist(0.0, 0.3);
    std::vector<double> b(mesh.n_elements * mesh.nodes_per_element());
    for (auto& v : b) {
        v = b_dist(rng);
    }
    return b;
}

// Still-water bathymetry bump, compactly supported around the origin.
double bump(double px, double py) {
    const double r = std::hypot(px, py);
    return r <= 0.4 ? 0.2 * (1.0 + std::cos(2.5 * kPi * r)) : 0.0;
}

std::vector<double> nodal_bottom(const CurvedQuadMesh& mesh, double (*f)(double, double)) {
    std::vector<double> b(mesh.n_elements * mesh.nodes_per_element());
    for (std::size_t n = 0; n < b.size(); ++n) {
        b[n] = f(mesh.x[n], mesh.y[n]);
    }
    return b;
}

std::vector<State> still_water(const std::vector<double>& b, double H0) {
    std::vector<State> u(b.size());
    for (std::size_t n = 0; n < b.size(); ++n) {
        u[n] = {H0 - b[n], 0.0, 0.0};
    }
    return u;
}

void require_close(const State& a, const State& b, double tol) {
    REQUIRE(std::abs(a.h - b.h) <= tol);
    REQUIRE(std::abs(a.hv1 - b.hv1) <= tol);
    REQUIRE(std::abs(a.hv2 - b.hv2) <= tol);
}

void require_equal(const State& a, const State& b) {
    REQUIRE(a.h == b.h);
    REQUIRE(a.hv1 == b.hv1);
    REQUIRE(a.hv2 == b.hv2);
}

double rel_inf(const std::vector<State>& a, const std::vector<State>& ref) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) {
        num = std::max(num, max_abs(a[n] - ref[n]));
        den = std::max(den, max_abs(ref[n]));
    }
    return num / std::max(den, 1e-300);
}

double max_node(const std::vector<State>& u) {
    double m = 0.0;
    for (const auto& s : u) {
        m = std::max(m, max_abs(s));
    }
    return m;
}

double max_entry(const StaggeredFluxField& f) {
    double m = 0.0;
    for (const auto* v : {&f.g1_minus, &f.g1_plus, &f.g2_minus, &f.g2_plus}) {
        for (const auto& s : *v) {
            m = std::max(m, max_abs(s));
        }
    }
    return m;
}

std::vector<State> assemble(StaggeredFormula formula, FluxVariant variant,
                            const std::vector<State>& u, const std::vector<double>& b,
                            const CurvedQuadMesh& mesh, const PhysicsParams& p, double alpha) {
    const FaceTraces traces = gather_traces(u, b, mesh);
    const StaggeredFluxField dg = staggered_fluxes(formula, u, b, traces, mesh, variant, p);
    const StaggeredFluxField fv = fv_fluxes(u, b, traces, mesh, variant, p);
    return blend_assemble(dg, fv, uniform_blend(mesh, alpha), mesh);
}

// One reference line of moving-water data for the staggered-flux property
// tests: nothing constant, nothing aligned, nonzero bathymetry jumps.
struct LineCase {
    SbpOperators ops;
    std::array<State, 4> u;
    std::array<double, 4> b;
    std::array<Vec2, 4> ja;
    State u_left, u_right;
    double b_left, b_right;
};

LineCase moving_line() {
    return {build_lgl_operators(3),
            {State{1.3, 0.4, -0.2}, State{0.9, -0.7, 0.3}, State{1.7, 0.2, 0.5},
             State{1.1, 0.6, -0.4}},
            {0.10, 0.35, 0.05, 0.25},
            {Vec2{0.8, 0.1}, Vec2{0.9, -0.2}, Vec2{1.1, 0.15}, Vec2{0.7, -0.05}},
            State{1.5, 0.3, 0.1},
            State{0.8, -0.2, 0.6},
            0.2,
            0.15};
}

} // namespace

TEST_CASE("face traces copy neighbors and apply boundary rules") {
    std::mt19937_64 rng(91);

    const CurvedQuadMesh per = build_cartesian(0.0, 2.0, 0.0, 1.0, 3, 2, 2, {});
    const std::vector<State> u = random_field(per, rng);
    const std::vector<double> b = random_bottom(per, rng);
    const FaceTraces tr = gather_traces(u, b, per);
    const int N = per.N;
    for (int e = 0; e < per.n_elements; ++e) {
        for (int side = 0; side < 4; ++side) {
            const FaceLink& f = per.faces[e][side];
            REQUIRE(f.neighbor >= 0);
            for (int k = 0; k <= N; ++k) {
                const int kn = f.reversed ? N - k : k;
                const auto nn = face_node(f.neighbor_side, kn, N);
                const std::size_t src = per.nidx(f.neighbor, nn[0], nn[1]);
                require_equal(tr.u[tr.idx(e, side, k)], u[src]);
                REQUIRE(tr.b[tr.idx(e, side, k)] == b[src]);
            }
        }
    }

    // Walls mirror the normal momentum component and keep the tangential one.
    const CurvedQuadMesh box = build_cartesian(0.0, 2.0, 0.0, 1.0, 2, 1, 2, all_walls());
    const std::size_t total = box.n_elements * box.nodes_per_element();
    const std::vector<State> flow(total, State{1.0, 2.0, 3.0});
    const std::vector<double> flat(total, 0.25);
    const FaceTraces wtr = gather_traces(flow, flat, box);
    for (int k = 0; k <= box.N; ++k) {
        require_close(wtr.u[wtr.idx(0, 0, k)], {1.0, -2.0, 3.0}, 1e-15);
        require_close(wtr.u[wtr.idx(1, 1, k)], {1.0, -2.0, 3.0}, 1e-15);
        require_close(wtr.u[wtr.idx(0, 2, k)], {1.0, 2.0, -3.0}, 1e-15);
        require_close(wtr.u[wtr.idx(0, 3, k)], {1.0, 2.0, -3.0}, 1e-15);
        REQUIRE(wtr.b[wtr.idx(0, 0, k)] == 0.25);
    }

    // At rest the wall ghost state equals the interior state exactly.
    const std::vector<State> rest = still_water(flat, 2.0);
    const FaceTraces rtr = gather_traces(rest, flat, box);
    for (int k = 0; k <= box.N; ++k) {
        require_equal(rtr.u[rtr.idx(0, 0, k)], rest[box.nidx(0, 0, k)]);
    }

    // Outflow copies the interior values.
    const CurvedQuadMesh duct =
        build_interval(0.0, 10.0, 2, 2, BoundaryTag::wall, BoundaryTag::outflow);
    const std::vector<State> du = random_field(duct, rng);
    const std::vector<double> db = random_bottom(duct, rng);
    const FaceTraces dtr = gather_traces(du, db, duct);
    for (int k = 0; k <= duct.N; ++k) {
        require_equal(dtr.u[dtr.idx(1, 1, k)], du[duct.nidx(1, duct.N, k)]);
        REQUIRE(dtr.b[dtr.idx(1, 1, k)] == db[duct.nidx(1, duct.N, k)]);
    }

    // A face with neither a neighbor nor a boundary rule is an error.
    CurvedQuadMesh broken = box;
    broken.faces[0][0] = FaceLink{};
    REQUIRE_THROWS_AS(gather_traces(flow, flat, broken), std::runtime_error);
}

TEST_CASE("direct assembly reproduces the frozen two-node reference") {
    // Independently derived single-element periodic case on [0, 2] at N = 1
    // with g = 2; all inputs and results are exact in binary floating point.
    const PhysicsParams p = params(2.0);
    const CurvedQuadMesh mesh =
        build_interval(0.0, 2.0, 1, 1, BoundaryTag::periodic, BoundaryTag::periodic);
    std::vector<State> u(mesh.nodes_per_element());
    std::vector<double> b(u.size());
    for (int j = 0; j < mesh.np(); ++j) {
        u[mesh.nidx(0, 0, j)] = {1.0, 0.5, -0.25};
        u[mesh.nidx(0, 1, j)] = {2.0, -1.0, 0.75};
        b[mesh.nidx(0, 0, j)] = 0.5;
        b[mesh.nidx(0, 1, j)] = 0.25;
    }
    const FaceTraces tr = gather_traces(u, b, mesh);
    const std::vector<State> rhs = dg_rhs_direct(u, b, tr, mesh, FluxVariant::ersing_jump, p);
    const State e0{0.9375, -1.875, 1.23046875};
    const State e1{-0.9375, 1.875, -1.23046875};
    for (int j = 0; j < mesh.np(); ++j) {
        require_close(rhs[mesh.nidx(0, 0, j)], e0, 1e-13);
        require_close(rhs[mesh.nidx(0, 1, j)], e1, 1e-13);
    }

    // Both staggered routes hit the same frozen values at alpha = 0.
    for (const StaggeredFormula f : {StaggeredFormula::pairwise, StaggeredFormula::alternative}) {
        const std::vector<State> r2 = assemble(f, FluxVariant::ersing_jump, u, b, mesh, p, 0.0);
        for (int j = 0; j < mesh.np(); ++j) {
            require_close(r2[mesh.nidx(0, 0, j)], e0, 1e-13);
            require_close(r2[mesh.nidx(0, 1, j)], e1, 1e-13);
        }
    }
}

TEST_CASE("staggered assemblies at alpha zero match the direct form") {
    std::mt19937_64 rng(7);
    const PhysicsParams p = params(9.81);

    std::vector<CurvedQuadMesh> meshes;
    meshes.push_back(build_interval(0.0, 2.3, 3, 1, BoundaryTag::periodic, BoundaryTag::periodic));
    meshes.push_back(build_interval(0.0, 2.3, 3, 3, BoundaryTag::periodic, BoundaryTag::periodic));
    meshes.push_back(build_interval(0.0, 2.3, 3, 5, BoundaryTag::periodic, BoundaryTag::periodic));
    meshes.push_back(build_cartesian(0.0, 2.0, 0.0, 1.0, 3, 2, 3, {}));
    meshes.push_back(warped_mesh({}));

    for (const CurvedQuadMesh& mesh : meshes) {
        for (int trial = 0; trial < 6; ++trial) {
            const std::vector<State> u = random_field(mesh, rng);
            const std::vector<double> b = random_bottom(mesh, rng);
            const FaceTraces tr = gather_traces(u, b, mesh);
            const FluxVariant v =
                trial % 2 == 0 ? FluxVariant::ersing_jump : FluxVariant::wintermeyer_jump;
            const std::vector<State> ref = dg_rhs_direct(u, b, tr, mesh, v, p);
            const StaggeredFluxField fv = fv_fluxes(u, b, tr, mesh, v, p);
            for (const StaggeredFormula f :
                 {StaggeredFormula::pairwise, StaggeredFormula::alternative}) {
                const StaggeredFluxField dg = staggered_fluxes(f, u, b, tr, mesh, v, p);
                const std::vector<State> rhs =
                    blend_assemble(dg, fv, uniform_blend(mesh, 0.0), mesh);
                REQUIRE(rel_inf(rhs, ref) <= 1e-12);
            }
        }
    }

    // The symmetric-form pairing has its own staggered route.
    const CurvedQuadMesh& warped = meshes.back();
    for (int trial = 0; trial < 4; ++trial) {
        const std::vector<State> u = random_field(warped, rng);
        const std::vector<double> b = random_bottom(warped, rng);
        const FaceTraces tr = gather_traces(u, b, warped);
        const std::vector<State> ref =
            dg_rhs_direct(u, b, tr, warped, FluxVariant::wintermeyer_symmetric, p);
        const std::vector<State> rhs = assemble(
            StaggeredFormula::symmetric, FluxVariant::wintermeyer_symmetric, u, b, warped, p, 0.0);
        REQUIRE(rel_inf(rhs, ref) <= 1e-12);
    }
}

TEST_CASE("incompatible formula and flux pairings are rejected") {
    const PhysicsParams p = params(9.81);
    const CurvedQuadMesh mesh = build_cartesian(0.0, 1.0, 0.0, 1.0, 1, 1, 1, {});
    std::mt19937_64 rng(3);
    const std::vector<State> u = random_field(mesh, rng);
    const std::vector<double> b = random_bottom(mesh, rng);
    const FaceTraces tr = gather_traces(u, b, mesh);

    REQUIRE_THROWS_AS(staggered_fluxes(StaggeredFormula::pairwise, u, b, tr, mesh,
                                       FluxVariant::wintermeyer_symmetric, p),
                      std::runtime_error);
    REQUIRE_THROWS_AS(staggered_fluxes(StaggeredFormula::alternative, u, b, tr, mesh,
                                       FluxVariant::wintermeyer_symmetric, p),
                      std::runtime_error);
    REQUIRE_THROWS_AS(
        staggered_fluxes(StaggeredFormula::symmetric, u, b, tr, mesh, FluxVariant::ersing_jump, p),
        std::runtime_error);
    REQUIRE_THROWS_AS(staggered_fluxes(StaggeredFormula::symmetric, u, b, tr, mesh,
                                       FluxVariant::wintermeyer_jump, p),
                      std::runtime_error);
}

TEST_CASE("staggered line entries follow the prefix construction") {
    const PhysicsParams p = params(9.81);
    const LineCase c = moving_line();
    const int N = 3;
    const FluxVariant v = FluxVariant::ersing_jump;

    // Row sums of the two-point terms and their running prefixes, accumulated
    // independently of the implementation's single-pass order.
    std::array<State, 4> P{};
    std::array<double, 4> w{};
    for (int l = 0; l <= N; ++l) {
        for (int m = 0; m <= N; ++m) {
            const double s = c.ops.s(l, m);
            if (s == 0.0) {
                continue;
            }
            P[l] += s * contract(volume_flux(v, c.u[l], c.u[m], p), 0.5 * (c.ja[l] + c.ja[m]));
            w[l] += s * noncons_jump(v, c.u[l], c.b[l], c.u[m], c.b[m]).hv1;
        }
    }
    std::array<State, 4> PS{};
    std::array<double, 4> WS{};
    PS[0] = P[0];
    WS[0] = w[0];
    for (int l = 1; l <= N; ++l) {
        PS[l] = PS[l - 1] + P[l];
        WS[l] = WS[l - 1] + w[l];
    }

    // The shared template: prefix sums keyed to the entry's own node, with or
    // without the first-node correction.
    const auto entry = [&](int own, const State& f, double jsum, bool corrected) {
        const State loc = noncons_local(c.u[own], c.ja[own], p);
        const double j0 = noncons_jump(v, c.u[own], c.b[own], c.u[0], c.b[0]).hv1;
        const double wsum = jsum + (corrected ? 2.0 * j0 : 0.0);
        return State{f.h, f.hv1 + loc.hv1 * wsum, f.hv2 + loc.hv2 * wsum};
    };

    std::array<State, 4> minus, plus, minusA, plusA;
    staggered_line(StaggeredFormula::pairwise, v, c.ops, c.u.data(), c.b.data(), c.ja.data(),
                   c.u_left, c.b_left, c.u_right, c.b_right, p, minus.data(), plus.data());
    staggered_line(StaggeredFormula::alternative, v, c.ops, c.u.data(), c.b.data(), c.ja.data(),
                   c.u_left, c.b_left, c.u_right, c.b_right, p, minusA.data(), plusA.data());

    // Surface entries come straight from the surface recipe.
    require_equal(minus[0],
                  surface_flux(v, c.u[0], c.b[0], c.u_left, c.b_left, c.ja[0], -1, p));
    require_equal(plus[N],
                  surface_flux(v, c.u[N], c.b[N], c.u_right, c.b_right, c.ja[N], 1, p));
    require_equal(minusA[0], minus[0]);
    require_equal(plusA[N], plus[N]);

    const double tol = 1e-12;
    for (int i = 1; i <= N; ++i) {
        require_close(minus[i], entry(i, PS[i - 1], WS[i - 1], true), tol);
    }
    for (int i = 0; i < N; ++i) {
        require_close(plus[i], entry(i, PS[i], WS[i], true), tol);
    }

    // The alternative keeps the correction only in its final minus-oriented
    // entry and uses the plain prefix value everywhere else.
    for (int i = 1; i < N; ++i) {
        require_close(minusA[i], entry(i, PS[i - 1], WS[i - 1], false), tol);
    }
    require_close(minusA[N], entry(N, PS[N - 1], WS[N - 1], true), tol);
    for (int i = 0; i < N; ++i) {
        require_close(plusA[i], entry(i, PS[i], WS[i], false), tol);
    }
    require_close(minusA[N], minus[N], tol);

    // Applying the alternative's uncorrected template at the last
    // minus-oriented entry misses the stored value by the full correction, so
    // its two orientations cannot come from one shared expression.
    const State probe = entry(N, PS[N - 1], WS[N - 1], false);
    REQUIRE(max_abs(minusA[N] - probe) > 1e-6);
}

TEST_CASE("index relabeling flips and mirrors the staggered line") {
    const PhysicsParams p = params(9.81);
    const LineCase c = moving_line();
    const int N = 3;

    std::array<State, 4> ur;
    std::array<double, 4> br;
    std::array<Vec2, 4> jr;
    for (int k = 0; k <= N; ++k) {
        ur[k] = c.u[N - k];
        br[k] = c.b[N - k];
        jr[k] = {-c.ja[N - k].x1, -c.ja[N - k].x2};
    }

    for (const FluxVariant v : {FluxVariant::ersing_jump, FluxVariant::wintermeyer_jump}) {
        std::array<State, 4> minus, plus, rminus, rplus;
        staggered_line(StaggeredFormula::pairwise, v, c.ops, c.u.data(), c.b.data(), c.ja.data(),
                       c.u_left, c.b_left, c.u_right, c.b_right, p, minus.data(), plus.data());
        staggered_line(StaggeredFormula::pairwise, v, c.ops, ur.data(), br.data(), jr.data(),
                       c.u_right, c.b_right, c.u_left, c.b_left, p, rminus.data(), rplus.data());
        double scale = 0.0;
        for (int k = 0; k <= N; ++k) {
            scale = std::max({scale, max_abs(minus[k]), max_abs(plus[k])});
        }
        const double tol = 1e-13 * (1.0 + scale);
        for (int k = 0; k <= N; ++k) {
            require_close(rminus[k], -plus[N - k], tol);
            require_close(rplus[k], -minus[N - k], tol);
        }
    }

    // The alternative preserves the node-wise flux differences and the two
    // entries its single correction lands on, but not the other interior
    // entries, which pick up a constant offset.
    {
        const FluxVariant v = FluxVariant::ersing_jump;
        std::array<State, 4> minus, plus, rminus, rplus;
        staggered_line(StaggeredFormula::alternative, v, c.ops, c.u.data(), c.b.data(),
                       c.ja.data(), c.u_left, c.b_left, c.u_right, c.b_right, p, minus.data(),
                       plus.data());
        staggered_line(StaggeredFormula::alternative, v, c.ops, ur.data(), br.data(), jr.data(),
                       c.u_right, c.b_right, c.u_left, c.b_left, p, rminus.data(), rplus.data());
        double scale = 0.0;
        for (int k = 0; k <= N; ++k) {
            scale = std::max({scale, max_abs(minus[k]), max_abs(plus[k])});
        }
        const double tol = 1e-13 * (1.0 + scale);
        require_close(rminus[0], -plus[N], tol);
        require_close(rplus[N], -minus[0], tol);
        require_close(rminus[N], -plus[0], tol);
        require_close(rplus[0], -minus[N], tol);
        for (int k = 0; k <= N; ++k) {
            require_close(rminus[k] - rplus[k], minus[N - k] - plus[N - k], tol);
        }
        REQUIRE(max_abs(rminus[1] + plus[N - 1]) > 1e-6);
    }
}

TEST_CASE("flat bottom and constant depth align the two orientations exactly") {
    std::mt19937_64 rng(23);
    const PhysicsParams p = params(9.81);
    const CurvedQuadMesh mesh = warped_mesh({});
    const std::size_t total = mesh.n_elements * mesh.nodes_per_element();
    std::uniform_real_distribution<double> hv_dist(-1.5, 1.5);
    std::vector<State> u(total);
    for (auto& s : u) {
        s = {1.4, hv_dist(rng), hv_dist(rng)};
    }
    const std::vector<double> b(total, 0.3);
    const FaceTraces tr = gather_traces(u, b, mesh);
    const int N = mesh.N;

    for (const StaggeredFormula f : {StaggeredFormula::pairwise, StaggeredFormula::alternative}) {
        const StaggeredFluxField dg =
            staggered_fluxes(f, u, b, tr, mesh, FluxVariant::ersing_jump, p);
        for (int e = 0; e < mesh.n_elements; ++e) {
            for (int j = 0; j <= N; ++j) {
                for (int i = 1; i <= N; ++i) {
                    require_equal(dg.g1_minus[mesh.nidx(e, i, j)],
                                  dg.g1_plus[mesh.nidx(e, i - 1, j)]);
                    require_equal(dg.g2_minus[mesh.nidx(e, j, i)],
                                  dg.g2_plus[mesh.nidx(e, j, i - 1)]);
                }
            }
        }
        REQUIRE(max_entry(dg) > 0.1);
    }
}

TEST_CASE("still water zeroes every flux entry for the depth-jump pairing") {
    const PhysicsParams p = params(9.81);
    const CurvedQuadMesh mesh = warped_mesh(all_walls());
    const std::vector<double> b = nodal_bottom(mesh, bump);
    const std::vector<State> u = still_water(b, 0.45);
    const FaceTraces tr = gather_traces(u, b, mesh);

    for (const StaggeredFormula f : {StaggeredFormula::pairwise, StaggeredFormula::alternative}) {
        REQUIRE(max_entry(staggered_fluxes(f, u, b, tr, mesh, FluxVariant::ersing_jump, p)) <=
                1e-13);
    }
    REQUIRE(max_entry(fv_fluxes(u, b, tr, mesh, FluxVariant::ersing_jump, p)) <= 1e-13);

    // The bathymetry-jump pairing balances only after assembly; its entries
    // stay far from zero on the same data.
    REQUIRE(max_entry(staggered_fluxes(StaggeredFormula::pairwise, u, b, tr, mesh,
                                       FluxVariant::wintermeyer_jump, p)) > 1e-6);
}

TEST_CASE("still water is preserved on straight meshes by every pairing") {
    const PhysicsParams p = params(9.81);
    const CurvedQuadMesh mesh = build_cartesian(0.0, 1.0, 0.0, 1.0, 2, 2, 3, {});
    const std::size_t total = mesh.n_elements * mesh.nodes_per_element();
    std::vector<double> b(total);
    for (std::size_t n = 0; n < total; ++n) {
        b[n] = 0.1 + 0.05 * std::sin(2.0 * kPi * mesh.x[n]) * std::sin(2.0 * kPi * mesh.y[n]);
    }
    const std::vector<State> u = still_water(b, 0.45);
    const FaceTraces tr = gather_traces(u, b, mesh);

    REQUIRE(max_node(dg_rhs_direct(u, b, tr, mesh, FluxVariant::ersing_jump, p)) <= 1e-12);
    REQUIRE(max_node(dg_rhs_direct(u, b, tr, mesh, FluxVariant::wintermeyer_jump, p)) <= 1e-11);
    REQUIRE(max_node(dg_rhs_direct(u, b, tr, mesh, FluxVariant::wintermeyer_symmetric, p)) <=
            1e-11);
    for (const double alpha : {0.0, 1.0}) {
        REQUIRE(max_node(assemble(StaggeredFormula::pairwise, FluxVariant::wintermeyer_jump, u, b,
                                  mesh, p, alpha)) <= 1e-11);
        REQUIRE(max_node(assemble(StaggeredFormula::symmetric, FluxVariant::wintermeyer_symmetric,
                                  u, b, mesh, p, alpha)) <= 1e-11);
    }
}

TEST_CASE("uniform flow over a flat bottom is preserved on curved meshes") {
    const PhysicsParams p = params(9.81);
    const CurvedQuadMesh mesh = warped_mesh({});
    const std::size_t total = mesh.n_elements * mesh.nodes_per_element();
    const std::vector<State> u(total, State{1.3, 0.6, -0.4});
    const std::vector<double> b(total, 0.25);

    REQUIRE(max_node(assemble(StaggeredFormula::pairwise, FluxVariant::ersing_jump, u, b, mesh, p,
                              0.0)) <= 1e-9);
    REQUIRE(max_node(assemble(StaggeredFormula::pairwise, FluxVariant::ersing_jump, u, b, mesh, p,
                              1.0)) <= 1e-14);
}

TEST_CASE("subcell fluxes reuse one mass value per interface on straight meshes") {
    std::mt19937_64 rng(57);
    const PhysicsParams p = params(9.81);
    const CurvedQuadMesh mesh = build_cartesian(0.0, 2.0, 0.0, 1.0, 3, 2, 3, {});
    const std::vector<State> u = random_field(mesh, rng);
    const std::vector<double> b = random_bottom(mesh, rng);
    const FaceTraces tr = gather_traces(u, b, mesh);
    const StaggeredFluxField fv = fv_fluxes(u, b, tr, mesh, FluxVariant::ersing_jump, p);
    const int N = mesh.N;

    // The two sides use their own nodal metric values, which agree only up
    // to the rounding of the metric evaluation, so the comparison allows a
    // dozen ulps.
    double momentum_gap = 0.0;
    for (int e = 0; e < mesh.n_elements; ++e) {
        for (int j = 0; j <= N; ++j) {
            for (int i = 1; i <= N; ++i) {
                const State a = fv.g1_minus[mesh.nidx(e, i, j)];
                const State bb = fv.g1_plus[mesh.nidx(e, i - 1, j)];
                REQUIRE(std::abs(a.h - bb.h) <= 1e-14 * (1.0 + std::abs(a.h)));
                momentum_gap = std::max(momentum_gap, std::abs(a.hv1 - bb.hv1));
                const State a2 = fv.g2_minus[mesh.nidx(e, j, i)];
                const State b2 = fv.g2_plus[mesh.nidx(e, j, i - 1)];
                REQUIRE(std::abs(a2.h - b2.h) <= 1e-14 * (1.0 + std::abs(a2.h)));
            }
        }
    }
    // The two sides of one interface disagree in the momenta: each carries
    // its own non-conservative share.
    REQUIRE(momentum_gap > 1e-6);
}

TEST_CASE("blend weights are validated and the endpoints recover each field") {
    std::mt19937_64 rng(11);
    const PhysicsParams p = params(9.81);
    const CurvedQuadMesh mesh = build_cartesian(0.0, 2.0, 0.0, 1.0, 2, 2, 3, {});
    const std::vector<State> u = random_field(mesh, rng);
    const std::vector<double> b = random_bottom(mesh, rng);
    const FaceTraces tr = gather_traces(u, b, mesh);
    const StaggeredFluxField dg =
        staggered_fluxes(StaggeredFormula::pairwise, u, b, tr, mesh, FluxVariant::ersing_jump, p);
    const StaggeredFluxField fv = fv_fluxes(u, b, tr, mesh, FluxVariant::ersing_jump, p);

    REQUIRE_THROWS_AS(blend_assemble(dg, fv, uniform_blend(mesh, 1.5), mesh), std::runtime_error);
    REQUIRE_THROWS_AS(blend_assemble(dg, fv, uniform_blend(mesh, -0.25), mesh),
                      std::runtime_error);

    const std::vector<State> at_one = blend_assemble(dg, fv, uniform_blend(mesh, 1.0), mesh);
    const int N = mesh.N;
    const std::vector<double>& wq = mesh.ops.weights;
    for (int e = 0; e < mesh.n_elements; ++e) {
        for (int j = 0; j <= N; ++j) {
            for (int i = 0; i <= N; ++i) {
                const std::size_t n = mesh.nidx(e, i, j);
                const State d1 = fv.g1_minus[n] - fv.g1_plus[n];
                const State d2 = fv.g2_minus[n] - fv.g2_plus[n];
                const State want =
                    (1.0 / mesh.jac[n]) * ((1.0 / wq[i]) * d1 + (1.0 / wq[j]) * d2);
                require_close(at_one[n], want, 1e-12 * (1.0 + max_abs(want)));
            }
        }
    }
}

TEST_CASE("still water stays at rest under arbitrary blending") {
    const PhysicsParams p = params(9.81);
    const CurvedQuadMesh mesh = warped_mesh(all_walls());
    const std::vector<double> b = nodal_bottom(mesh, bump);
    const std::vector<State> u = still_water(b, 0.45);
    const FaceTraces tr = gather_traces(u, b, mesh);
    const StaggeredFluxField dg =
        staggered_fluxes(StaggeredFormula::pairwise, u, b, tr, mesh, FluxVariant::ersing_jump, p);
    const StaggeredFluxField fv = fv_fluxes(u, b, tr, mesh, FluxVariant::ersing_jump, p);

    BlendField a = uniform_blend(mesh, 0.0);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (auto& v : a.a1) {
        v = dist(rng);
    }
    for (auto& v : a.a2) {
        v = dist(rng);
    }
    REQUIRE(max_node(blend_assemble(dg, fv, a, mesh)) <= 1e-11);
}

TEST_CASE("periodic flat-bottom assemblies conserve the weighted totals") {
    std::mt19937_64 rng(41);
    const PhysicsParams p = params(9.81);
    const CurvedQuadMesh mesh = build_cartesian(0.0, 2.0, 0.0, 1.0, 3, 2, 3, {});
    const std::size_t total = mesh.n_elements * mesh.nodes_per_element();
    const std::vector<State> u = random_field(mesh, rng);
    const std::vector<double> b(total, 0.7);
    const FaceTraces tr = gather_traces(u, b, mesh);
    const int N = mesh.N;
    const std::vector<double>& wq = mesh.ops.weights;

    // Largest ratio of a weighted component total to its absolute sum.
    const auto drift = [&](const std::vector<State>& rhs, bool mass_only) {
        double num[3] = {0.0, 0.0, 0.0};
        double den[3] = {0.0, 0.0, 0.0};
        for (int e = 0; e < mesh.n_elements; ++e) {
            for (int j = 0; j <= N; ++j) {
                for (int i = 0; i <= N; ++i) {
                    const std::size_t n = mesh.nidx(e, i, j);
                    const double m = mesh.jac[n] * wq[i] * wq[j];
                    const double c[3] = {rhs[n].h, rhs[n].hv1, rhs[n].hv2};
                    for (int k = 0; k < 3; ++k) {
                        num[k] += m * c[k];
                        den[k] += m * std::abs(c[k]);
                    }
                }
            }
        }
        double r = 0.0;
        for (int k = 0; k < (mass_only ? 1 : 3); ++k) {
            r = std::max(r, std::abs(num[k]) / std::max(den[k], 1e-300));
        }
        return r;
    };

    for (const FluxVariant v : {FluxVariant::ersing_jump, FluxVariant::wintermeyer_jump}) {
        const StaggeredFluxField fv = fv_fluxes(u, b, tr, mesh, v, p);
        for (const StaggeredFormula f :
             {StaggeredFormula::pairwise, StaggeredFormula::alternative}) {
            const StaggeredFluxField dg = staggered_fluxes(f, u, b, tr, mesh, v, p);
            REQUIRE(drift(blend_assemble(dg, fv, uniform_blend(mesh, 0.0), mesh), false) <=
                    1e-12);
            REQUIRE(drift(blend_assemble(dg, fv, uniform_blend(mesh, 1.0), mesh), false) <=
                    1e-12);
        }
    }

    // Mixed weights still conserve mass exactly; the momenta may drift.
    const StaggeredFluxField dg =
        staggered_fluxes(StaggeredFormula::pairwise, u, b, tr, mesh, FluxVariant::ersing_jump, p);
    const StaggeredFluxField fv = fv_fluxes(u, b, tr, mesh, FluxVariant::ersing_jump, p);
    BlendField a = uniform_blend(mesh, 0.0);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (auto& v : a.a1) {
        v = dist(rng);
    }
    for (auto& v : a.a2) {
        v = dist(rng);
    }
    REQUIRE(drift(blend_assemble(dg, fv, a, mesh), true) <= 1e-12);
}

TEST_CASE("staggered and subcell fields share the element surface entries") {
    std::mt19937_64 rng(67);
    const PhysicsParams p = params(9.81);
    const CurvedQuadMesh mesh = warped_mesh({});
    const std::vector<State> u = random_field(mesh, rng);
    const std::vector<double> b = random_bottom(mesh, rng);
    const FaceTraces tr = gather_traces(u, b, mesh);
    const int N = mesh.N;

    for (const StaggeredFormula f : {StaggeredFormula::pairwise, StaggeredFormula::alternative}) {
        const StaggeredFluxField dg =
            staggered_fluxes(f, u, b, tr, mesh, FluxVariant::ersing_jump, p);
        const StaggeredFluxField fv = fv_fluxes(u, b, tr, mesh, FluxVariant::ersing_jump, p);
        for (int e = 0; e < mesh.n_elements; ++e) {
            for (int k = 0; k <= N; ++k) {
                require_equal(dg.g1_minus[mesh.nidx(e, 0, k)], fv.g1_minus[mesh.nidx(e, 0, k)]);
                require_equal(dg.g1_plus[mesh.nidx(e, N, k)], fv.g1_plus[mesh.nidx(e, N, k)]);
                require_equal(dg.g2_minus[mesh.nidx(e, k, 0)], fv.g2_minus[mesh.nidx(e, k, 0)]);
                require_equal(dg.g2_plus[mesh.nidx(e, k, N)], fv.g2_plus[mesh.nidx(e, k, N)]);
            }
        }
    }
}
