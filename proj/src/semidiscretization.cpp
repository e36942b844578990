#include "swedg/semidiscretization.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace swedg {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

void check_compatible(StaggeredFormula formula, FluxVariant variant) {
    const bool jump_variant = variant != FluxVariant::wintermeyer_symmetric;
    const bool jump_formula = formula != StaggeredFormula::symmetric;
    if (jump_formula && !jump_variant)
        fail("unsupported formulation: wintermeyer-symmetric has no local-times-jump "
             "factorization required by the new/alternative staggered fluxes");
    if (!jump_formula && jump_variant)
        fail("unsupported formulation: the symmetric staggered fluxes need a "
             "local-times-symmetric non-conservative term (wintermeyer-symmetric)");
}

// Two-point volume term of the direct assembly: conservative flux contracted
// with the averaged metric plus the split non-conservative product, which
// keeps the evaluating node's own state and metric in the local factor.
State volume_two_point(FluxVariant variant, const State& u_own, double b_own, Vec2 ja_own,
                       const State& u_oth, double b_oth, Vec2 ja_oth, const PhysicsParams& p) {
    const Vec2 ja_avg = 0.5 * (ja_own + ja_oth);
    State r = contract(volume_flux(variant, u_own, u_oth, p), ja_avg);
    if (variant == FluxVariant::wintermeyer_symmetric)
        r += hadamard(noncons_local_sym(u_own, p), noncons_sym(ja_own, b_own, ja_oth, b_oth));
    else
        r += hadamard(noncons_local(u_own, ja_own, p), noncons_jump(variant, u_own, b_own, u_oth, b_oth));
    return r;
}

struct LineBuffers {
    std::vector<State> u;
    std::vector<Vec2> ja;
    std::vector<double> b;
    std::vector<State> minus, plus;

    explicit LineBuffers(int np) : u(np), ja(np), b(np), minus(np), plus(np) {}
};

// Copies line l of direction dir (0: j = l fixed, running over i; 1: i = l
// fixed, running over j) into the contiguous buffers.
void load_line(const std::vector<State>& u, const std::vector<double>& b,
               const CurvedQuadMesh& mesh, int e, int dir, int l, LineBuffers& buf) {
    const int np = mesh.np();
    for (int k = 0; k < np; ++k) {
        const int i = dir == 0 ? k : l;
        const int j = dir == 0 ? l : k;
        const int n = mesh.nidx(e, i, j);
        buf.u[k] = u[n];
        buf.b[k] = b[n];
        buf.ja[k] = mesh.metric(dir, e, i, j);
    }
}

void store_line(const LineBuffers& buf, const CurvedQuadMesh& mesh, int e, int dir, int l,
                std::vector<State>& minus, std::vector<State>& plus) {
    const int np = mesh.np();
    for (int k = 0; k < np; ++k) {
        const int i = dir == 0 ? k : l;
        const int j = dir == 0 ? l : k;
        const int n = mesh.nidx(e, i, j);
        minus[n] = buf.minus[k];
        plus[n] = buf.plus[k];
    }
}

StaggeredFluxField allocate_field(const CurvedQuadMesh& mesh) {
    StaggeredFluxField f;
    f.N = mesh.N;
    const std::size_t total = static_cast<std::size_t>(mesh.n_elements) * mesh.nodes_per_element();
    f.g1_minus.resize(total);
    f.g1_plus.resize(total);
    f.g2_minus.resize(total);
    f.g2_plus.resize(total);
    return f;
}

void fv_line(FluxVariant variant, int N, const State* u, const double* b, const Vec2* ja,
             const State& u_left, double b_left, const State& u_right, double b_right,
             const PhysicsParams& p, State* minus, State* plus) {
    minus[0] = surface_flux(variant, u[0], b[0], u_left, b_left, ja[0], -1, p);
    plus[N] = surface_flux(variant, u[N], b[N], u_right, b_right, ja[N], +1, p);
    for (int i = 1; i <= N; ++i) {
        minus[i] = surface_flux(variant, u[i], b[i], u[i - 1], b[i - 1], ja[i], -1, p);
        plus[i - 1] = surface_flux(variant, u[i - 1], b[i - 1], u[i], b[i], ja[i - 1], +1, p);
    }
}

} // namespace

FaceTraces gather_traces(const std::vector<State>& u, const std::vector<double>& b,
                         const CurvedQuadMesh& mesh) {
    FaceTraces tr;
    tr.N = mesh.N;
    const int np = mesh.np();
    tr.u.resize(static_cast<std::size_t>(mesh.n_elements) * 4 * np);
    tr.b.resize(tr.u.size());

    for (int e = 0; e < mesh.n_elements; ++e) {
        for (int side = 0; side < 4; ++side) {
            const FaceLink& f = mesh.faces[e][side];
            for (int k = 0; k < np; ++k) {
                const std::size_t t = tr.idx(e, side, k);
                if (f.neighbor >= 0) {
                    const int kn = f.reversed ? mesh.N - k : k;
                    const auto [ni, nj] = face_node(f.neighbor_side, kn, mesh.N);
                    const int n = mesh.nidx(f.neighbor, ni, nj);
                    tr.u[t] = u[n];
                    tr.b[t] = b[n];
                    continue;
                }
                const auto [i, j] = face_node(side, k, mesh.N);
                const int n = mesh.nidx(e, i, j);
                switch (f.tag) {
                case BoundaryTag::outflow:
                    tr.u[t] = u[n];
                    tr.b[t] = b[n];
                    break;
                case BoundaryTag::wall: {
                    const Vec2 a = mesh.metric(side_axis(side), e, i, j);
                    const Vec2 nrm = (side_sign(side) / norm(a)) * a;
                    const double un = u[n].hv1 * nrm.x1 + u[n].hv2 * nrm.x2;
                    tr.u[t] = {u[n].h, u[n].hv1 - 2.0 * un * nrm.x1, u[n].hv2 - 2.0 * un * nrm.x2};
                    tr.b[t] = b[n];
                    break;
                }
                default:
                    fail("element " + std::to_string(e) + " side " + std::to_string(side) +
                         ": face has neither a neighbor nor a boundary tag");
                }
            }
        }
    }
    return tr;
}

std::vector<State> dg_rhs_direct(const std::vector<State>& u, const std::vector<double>& b,
                                 const FaceTraces& traces, const CurvedQuadMesh& mesh,
                                 FluxVariant variant, const PhysicsParams& p) {
    const int np = mesh.np();
    const int N = mesh.N;
    const SbpOperators& ops = mesh.ops;

    for (std::size_t n = 0; n < u.size(); ++n)
        if (!std::isfinite(u[n].h) || !std::isfinite(u[n].hv1) || !std::isfinite(u[n].hv2))
            fail("non-finite state at node " + std::to_string(n));

    std::vector<State> rhs(u.size());
    for (int e = 0; e < mesh.n_elements; ++e) {
        for (int j = 0; j < np; ++j) {
            for (int i = 0; i < np; ++i) {
                const int n = mesh.nidx(e, i, j);
                const Vec2 ja1 = mesh.metric(0, e, i, j);
                const Vec2 ja2 = mesh.metric(1, e, i, j);

                State sum1{};
                for (int m = 0; m < np; ++m)
                    sum1 += ops.s(i, m) * volume_two_point(variant, u[n], b[n], ja1,
                                                           u[mesh.nidx(e, m, j)], b[mesh.nidx(e, m, j)],
                                                           mesh.metric(0, e, m, j), p);
                if (i == 0) {
                    const std::size_t t = traces.idx(e, 0, j);
                    sum1 -= surface_flux(variant, u[n], b[n], traces.u[t], traces.b[t], ja1, -1, p);
                }
                if (i == N) {
                    const std::size_t t = traces.idx(e, 1, j);
                    sum1 += surface_flux(variant, u[n], b[n], traces.u[t], traces.b[t], ja1, +1, p);
                }

                State sum2{};
                for (int m = 0; m < np; ++m)
                    sum2 += ops.s(j, m) * volume_two_point(variant, u[n], b[n], ja2,
                                                           u[mesh.nidx(e, i, m)], b[mesh.nidx(e, i, m)],
                                                           mesh.metric(1, e, i, m), p);
                if (j == 0) {
                    const std::size_t t = traces.idx(e, 2, i);
                    sum2 -= surface_flux(variant, u[n], b[n], traces.u[t], traces.b[t], ja2, -1, p);
                }
                if (j == N) {
                    const std::size_t t = traces.idx(e, 3, i);
                    sum2 += surface_flux(variant, u[n], b[n], traces.u[t], traces.b[t], ja2, +1, p);
                }

                const double mass = mesh.jac[n] * ops.weights[i] * ops.weights[j];
                rhs[n] = (-1.0 / mass) * (ops.weights[j] * sum1 + ops.weights[i] * sum2);
            }
        }
    }
    return rhs;
}

void staggered_line(StaggeredFormula formula, FluxVariant variant, const SbpOperators& ops,
                    const State* u, const double* b, const Vec2* ja, const State& u_left,
                    double b_left, const State& u_right, double b_right, const PhysicsParams& p,
                    State* minus, State* plus) {
    check_compatible(formula, variant);
    const int N = ops.N;

    minus[0] = surface_flux(variant, u[0], b[0], u_left, b_left, ja[0], -1, p);
    plus[N] = surface_flux(variant, u[N], b[N], u_right, b_right, ja[N], +1, p);

    const bool symmetric = formula == StaggeredFormula::symmetric;

    // Interior entry at node i with the running prefixes of the two-point
    // terms over rows 0..min of the entry's index pair.
    auto entry = [&](int i, const State& pre_f, double pre_w, const State& pre_sym, bool is_last_minus) {
        if (symmetric)
            return pre_f + hadamard(noncons_local_sym(u[i], p), pre_sym);
        double w = pre_w;
        if (formula == StaggeredFormula::pairwise || is_last_minus)
            w += 2.0 * noncons_jump(variant, u[i], b[i], u[0], b[0]).hv1;
        const State loc = noncons_local(u[i], ja[i], p);
        return State{pre_f.h, pre_f.hv1 + loc.hv1 * w, pre_f.hv2 + loc.hv2 * w};
    };

    State pre_f{};
    double pre_w = 0.0;
    State pre_sym{};
    for (int l = 0; l <= N; ++l) {
        if (l >= 1)
            minus[l] = entry(l, pre_f, pre_w, pre_sym, l == N);

        for (int m = 0; m <= N; ++m) {
            const double s = ops.s(l, m);
            if (s == 0.0)
                continue;
            const Vec2 ja_avg = 0.5 * (ja[l] + ja[m]);
            pre_f += s * contract(volume_flux(variant, u[l], u[m], p), ja_avg);
            if (symmetric)
                pre_sym += s * noncons_sym(ja[l], b[l], ja[m], b[m]);
            else
                pre_w += s * noncons_jump(variant, u[l], b[l], u[m], b[m]).hv1;
        }

        if (l <= N - 1)
            plus[l] = entry(l, pre_f, pre_w, pre_sym, false);
    }
}

StaggeredFluxField staggered_fluxes(StaggeredFormula formula, const std::vector<State>& u,
                                    const std::vector<double>& b, const FaceTraces& traces,
                                    const CurvedQuadMesh& mesh, FluxVariant variant,
                                    const PhysicsParams& p) {
    check_compatible(formula, variant);
    StaggeredFluxField f = allocate_field(mesh);
    const int np = mesh.np();
    LineBuffers buf(np);

    for (int e = 0; e < mesh.n_elements; ++e) {
        for (int dir = 0; dir < 2; ++dir) {
            const int start_side = dir == 0 ? 0 : 2;
            const int end_side = dir == 0 ? 1 : 3;
            for (int l = 0; l < np; ++l) {
                load_line(u, b, mesh, e, dir, l, buf);
                const std::size_t ts = traces.idx(e, start_side, l);
                const std::size_t te = traces.idx(e, end_side, l);
                staggered_line(formula, variant, mesh.ops, buf.u.data(), buf.b.data(), buf.ja.data(),
                               traces.u[ts], traces.b[ts], traces.u[te], traces.b[te], p,
                               buf.minus.data(), buf.plus.data());
                store_line(buf, mesh, e, dir, l, dir == 0 ? f.g1_minus : f.g2_minus,
                           dir == 0 ? f.g1_plus : f.g2_plus);
            }
        }
    }
    return f;
}

StaggeredFluxField fv_fluxes(const std::vector<State>& u, const std::vector<double>& b,
                             const FaceTraces& traces, const CurvedQuadMesh& mesh,
                             FluxVariant variant, const PhysicsParams& p) {
    StaggeredFluxField f = allocate_field(mesh);
    const int np = mesh.np();
    LineBuffers buf(np);

    for (int e = 0; e < mesh.n_elements; ++e) {
        for (int dir = 0; dir < 2; ++dir) {
            const int start_side = dir == 0 ? 0 : 2;
            const int end_side = dir == 0 ? 1 : 3;
            for (int l = 0; l < np; ++l) {
                load_line(u, b, mesh, e, dir, l, buf);
                const std::size_t ts = traces.idx(e, start_side, l);
                const std::size_t te = traces.idx(e, end_side, l);
                fv_line(variant, mesh.N, buf.u.data(), buf.b.data(), buf.ja.data(), traces.u[ts],
                        traces.b[ts], traces.u[te], traces.b[te], p, buf.minus.data(),
                        buf.plus.data());
                store_line(buf, mesh, e, dir, l, dir == 0 ? f.g1_minus : f.g2_minus,
                           dir == 0 ? f.g1_plus : f.g2_plus);
            }
        }
    }
    return f;
}

BlendField uniform_blend(const CurvedQuadMesh& mesh, double alpha) {
    BlendField a;
    a.N = mesh.N;
    const std::size_t per_dir =
        static_cast<std::size_t>(mesh.n_elements) * (mesh.N + 1) * (mesh.N + 2);
    a.a1.assign(per_dir, alpha);
    a.a2.assign(per_dir, alpha);
    return a;
}

std::vector<State> blend_assemble(const StaggeredFluxField& dg, const StaggeredFluxField& fv,
                                  const BlendField& alpha, const CurvedQuadMesh& mesh) {
    for (double a : alpha.a1)
        if (!(a >= 0.0 && a <= 1.0))
            fail("blending weight outside [0,1]: " + std::to_string(a));
    for (double a : alpha.a2)
        if (!(a >= 0.0 && a <= 1.0))
            fail("blending weight outside [0,1]: " + std::to_string(a));

    const int np = mesh.np();
    const SbpOperators& ops = mesh.ops;
    std::vector<State> rhs(dg.g1_minus.size());
    for (int e = 0; e < mesh.n_elements; ++e) {
        for (int j = 0; j < np; ++j) {
            for (int i = 0; i < np; ++i) {
                const int n = mesh.nidx(e, i, j);
                const double am1 = alpha.a1[alpha.idx1(e, i, j)];
                const double ap1 = alpha.a1[alpha.idx1(e, i + 1, j)];
                const double am2 = alpha.a2[alpha.idx2(e, i, j)];
                const double ap2 = alpha.a2[alpha.idx2(e, i, j + 1)];

                const State m1 = (1.0 - am1) * dg.g1_minus[n] + am1 * fv.g1_minus[n];
                const State p1 = (1.0 - ap1) * dg.g1_plus[n] + ap1 * fv.g1_plus[n];
                const State m2 = (1.0 - am2) * dg.g2_minus[n] + am2 * fv.g2_minus[n];
                const State p2 = (1.0 - ap2) * dg.g2_plus[n] + ap2 * fv.g2_plus[n];

                rhs[n] = (1.0 / mesh.jac[n]) *
                         ((1.0 / ops.weights[i]) * (m1 - p1) + (1.0 / ops.weights[j]) * (m2 - p2));
            }
        }
    }
    return rhs;
}

} // namespace swedg
