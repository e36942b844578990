#include "swedg/limiting.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace swedg {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

constexpr double kAlphaMax = 0.5;
constexpr double kAlphaFloor = 1e-3;
constexpr double kIndicatorSharpness = 9.21024;

// One forward-Euler stage of the pure low-order scheme, reported as the
// resulting total water height per node.
std::vector<double> low_order_height(const std::vector<State>& u, const std::vector<double>& b,
                                     const StaggeredFluxField& fv, const CurvedQuadMesh& mesh,
                                     double dt) {
    const std::vector<State> rhs = blend_assemble(fv, fv, uniform_blend(mesh, 1.0), mesh);
    std::vector<double> H(rhs.size());
    for (std::size_t n = 0; n < rhs.size(); ++n)
        H[n] = u[n].h + dt * rhs[n].h + b[n];
    return H;
}

std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Top 53 bits as a double in [0,1).
double unit_double(std::uint64_t x) { return static_cast<double>(x >> 11) * 0x1.0p-53; }

} // namespace

NodalBounds fv_predictor_bounds(const std::vector<State>& u, const std::vector<double>& b,
                                const StaggeredFluxField& fv, const CurvedQuadMesh& mesh,
                                double dt) {
    if (!(dt > 0.0))
        fail("bounds predictor needs a positive dt, got " + std::to_string(dt));
    const std::vector<double> H = low_order_height(u, b, fv, mesh, dt);
    const int np = mesh.np();
    const int N = mesh.N;

    NodalBounds out;
    out.H_min.resize(H.size());
    out.H_max.resize(H.size());
    for (int e = 0; e < mesh.n_elements; ++e) {
        for (int j = 0; j < np; ++j) {
            for (int i = 0; i < np; ++i) {
                const int n = mesh.nidx(e, i, j);
                double lo = H[n], hi = H[n];
                auto take = [&](int m) {
                    lo = std::min(lo, H[m]);
                    hi = std::max(hi, H[m]);
                };
                if (i > 0) take(mesh.nidx(e, i - 1, j));
                if (i < N) take(mesh.nidx(e, i + 1, j));
                if (j > 0) take(mesh.nidx(e, i, j - 1));
                if (j < N) take(mesh.nidx(e, i, j + 1));
                auto across = [&](int side, int k) {
                    const FaceLink& f = mesh.faces[e][side];
                    if (f.neighbor < 0) return;
                    const int kn = f.reversed ? N - k : k;
                    const std::array<int, 2> nn = face_node(f.neighbor_side, kn, N);
                    take(mesh.nidx(f.neighbor, nn[0], nn[1]));
                };
                if (i == 0) across(0, j);
                if (i == N) across(1, j);
                if (j == 0) across(2, i);
                if (j == N) across(3, i);
                out.H_min[n] = lo;
                out.H_max[n] = hi;
            }
        }
    }
    return out;
}

BlendField zalesak_fct(const StaggeredFluxField& dg, const StaggeredFluxField& fv,
                       const NodalBounds& bounds, const std::vector<State>& u,
                       const std::vector<double>& b, const CurvedQuadMesh& mesh, double dt) {
    if (!(dt > 0.0))
        fail("flux correction needs a positive dt, got " + std::to_string(dt));
    const std::vector<double> H = low_order_height(u, b, fv, mesh, dt);
    if (bounds.H_min.size() != H.size() || bounds.H_max.size() != H.size())
        fail("water-height bounds do not match the mesh node count");

    const int np = mesh.np();
    const int N = mesh.N;
    const std::vector<double>& wq = mesh.ops.weights;

    // Room to rise/drop around the low-order height, padded by the roundoff
    // slack the post-state check uses. The low-order height itself sits in
    // every stencil, so violating its own bounds means the inputs are bad.
    std::vector<double> qp(H.size()), qm(H.size());
    std::vector<double> pp(H.size(), 0.0), pm(H.size(), 0.0);
    for (std::size_t n = 0; n < H.size(); ++n) {
        const double slack = 1e-12 * (1.0 + std::abs(H[n]));
        const double up = bounds.H_max[n] - H[n];
        const double dn = bounds.H_min[n] - H[n];
        if (up < -slack || dn > slack)
            fail("infeasible water-height bounds at node " + std::to_string(n));
        qp[n] = std::max(up, 0.0) + slack;
        qm[n] = std::min(dn, 0.0) - slack;
    }

    BlendField alpha = uniform_blend(mesh, 0.0);
    std::vector<double> into_r1(alpha.a1.size(), 0.0), into_l1(alpha.a1.size(), 0.0);
    std::vector<double> into_r2(alpha.a2.size(), 0.0), into_l2(alpha.a2.size(), 0.0);

    // Antidiffusive H increment each interior interface sends into its two
    // nodes over one stage, mirroring the blended assembly's weighting.
    for (int e = 0; e < mesh.n_elements; ++e) {
        for (int j = 0; j < np; ++j) {
            for (int i = 1; i <= N; ++i) {
                const int nr = mesh.nidx(e, i, j);
                const int nl = mesh.nidx(e, i - 1, j);
                const double ar =
                    dt * (dg.g1_minus[nr].h - fv.g1_minus[nr].h) / (mesh.jac[nr] * wq[i]);
                const double al =
                    -dt * (dg.g1_plus[nl].h - fv.g1_plus[nl].h) / (mesh.jac[nl] * wq[i - 1]);
                const std::size_t s = alpha.idx1(e, i, j);
                into_r1[s] = ar;
                into_l1[s] = al;
                if (ar >= 0.0) pp[nr] += ar; else pm[nr] += ar;
                if (al >= 0.0) pp[nl] += al; else pm[nl] += al;
            }
        }
        for (int i = 0; i < np; ++i) {
            for (int j = 1; j <= N; ++j) {
                const int nu = mesh.nidx(e, i, j);
                const int nd = mesh.nidx(e, i, j - 1);
                const double au =
                    dt * (dg.g2_minus[nu].h - fv.g2_minus[nu].h) / (mesh.jac[nu] * wq[j]);
                const double ad =
                    -dt * (dg.g2_plus[nd].h - fv.g2_plus[nd].h) / (mesh.jac[nd] * wq[j - 1]);
                const std::size_t s = alpha.idx2(e, i, j);
                into_r2[s] = au;
                into_l2[s] = ad;
                if (au >= 0.0) pp[nu] += au; else pm[nu] += au;
                if (ad >= 0.0) pp[nd] += ad; else pm[nd] += ad;
            }
        }
    }

    // Largest fraction of its incoming antidiffusion each node can absorb.
    std::vector<double> rp(H.size()), rm(H.size());
    for (std::size_t n = 0; n < H.size(); ++n) {
        rp[n] = pp[n] > 0.0 ? std::min(1.0, qp[n] / pp[n]) : 1.0;
        rm[n] = pm[n] < 0.0 ? std::min(1.0, qm[n] / pm[n]) : 1.0;
    }
    auto keep = [&](double a, int n) {
        return a > 0.0 ? rp[n] : (a < 0.0 ? rm[n] : 1.0);
    };

    for (int e = 0; e < mesh.n_elements; ++e) {
        for (int j = 0; j < np; ++j) {
            for (int i = 1; i <= N; ++i) {
                const std::size_t s = alpha.idx1(e, i, j);
                const double frac = std::min(keep(into_r1[s], mesh.nidx(e, i, j)),
                                             keep(into_l1[s], mesh.nidx(e, i - 1, j)));
                alpha.a1[s] = 1.0 - frac;
            }
        }
        for (int i = 0; i < np; ++i) {
            for (int j = 1; j <= N; ++j) {
                const std::size_t s = alpha.idx2(e, i, j);
                const double frac = std::min(keep(into_r2[s], mesh.nidx(e, i, j)),
                                             keep(into_l2[s], mesh.nidx(e, i, j - 1)));
                alpha.a2[s] = 1.0 - frac;
            }
        }
    }
    return alpha;
}

double modal_indicator(const double* h, const SbpOperators& ops, const ModalTransform& mt) {
    const int N = ops.N;
    const int np = N + 1;

    // Tensor-product Legendre coefficients c[l*np+k] of the nodal values.
    std::vector<double> tmp(static_cast<std::size_t>(np) * np, 0.0);
    std::vector<double> c(static_cast<std::size_t>(np) * np, 0.0);
    for (int j = 0; j < np; ++j)
        for (int k = 0; k < np; ++k) {
            double acc = 0.0;
            for (int i = 0; i < np; ++i) acc += mt.to_modal[k * np + i] * h[j * np + i];
            tmp[j * np + k] = acc;
        }
    for (int l = 0; l < np; ++l)
        for (int k = 0; k < np; ++k) {
            double acc = 0.0;
            for (int j = 0; j < np; ++j) acc += mt.to_modal[l * np + j] * tmp[j * np + k];
            c[l * np + k] = acc;
        }

    double total = 0.0, top = 0.0;
    for (int l = 0; l < np; ++l)
        for (int k = 0; k < np; ++k) {
            const double energy = c[l * np + k] * c[l * np + k];
            total += energy;
            if (k == N || l == N) top += energy;
        }
    const double fraction = total > 0.0 ? top / total : 0.0;

    const double threshold = 0.5 * std::pow(10.0, -1.8 * std::pow(N + 1.0, 0.25));
    double a = kAlphaMax /
               (1.0 + std::exp(-kIndicatorSharpness * (fraction - threshold) / threshold));
    if (a < kAlphaFloor) a = 0.0;
    if (a > kAlphaMax) a = kAlphaMax;
    return a;
}

std::vector<double> element_alphas(const std::vector<State>& u, const CurvedQuadMesh& mesh,
                                   const PhysicsParams& p) {
    const int npe = mesh.nodes_per_element();
    const ModalTransform mt = build_modal_transform(mesh.ops);

    std::vector<double> raw(mesh.n_elements, 0.0);
    std::vector<double> hbuf(npe);
    for (int e = 0; e < mesh.n_elements; ++e) {
        for (int n = 0; n < npe; ++n) hbuf[n] = u[static_cast<std::size_t>(e) * npe + n].h;
        raw[e] = modal_indicator(hbuf.data(), mesh.ops, mt);
    }

    // Spread half of each element's raw value to its face neighbors, then
    // force the low-order scheme wherever a node is close to dry.
    std::vector<double> out(raw);
    for (int e = 0; e < mesh.n_elements; ++e) {
        double nb = 0.0;
        for (int side = 0; side < 4; ++side) {
            const FaceLink& f = mesh.faces[e][side];
            if (f.neighbor >= 0) nb = std::max(nb, raw[f.neighbor]);
        }
        out[e] = std::max(raw[e], 0.5 * nb);
    }
    for (int e = 0; e < mesh.n_elements; ++e)
        for (int n = 0; n < npe; ++n)
            if (u[static_cast<std::size_t>(e) * npe + n].h < p.h_partial_dry) {
                out[e] = 1.0;
                break;
            }
    return out;
}

BlendField element_blend(const std::vector<double>& alpha_e, const CurvedQuadMesh& mesh) {
    if (static_cast<int>(alpha_e.size()) != mesh.n_elements)
        fail("per-element weights do not match the element count");
    const int np = mesh.np();
    BlendField a = uniform_blend(mesh, 0.0);
    for (int e = 0; e < mesh.n_elements; ++e) {
        const double ae = alpha_e[e];
        if (!(ae >= 0.0 && ae <= 1.0))
            fail("blending weight outside [0,1]: " + std::to_string(ae));
        for (int j = 0; j < np; ++j)
            for (int i = 0; i <= np; ++i) a.a1[a.idx1(e, i, j)] = ae;
        for (int i = 0; i < np; ++i)
            for (int j = 0; j <= np; ++j) a.a2[a.idx2(e, i, j)] = ae;
    }
    // A shared face takes the larger of its two element values.
    for (int e = 0; e < mesh.n_elements; ++e) {
        for (int side = 0; side < 4; ++side) {
            const FaceLink& f = mesh.faces[e][side];
            if (f.neighbor < 0) continue;
            const double af = interface_alpha(alpha_e[e], alpha_e[f.neighbor]);
            for (int k = 0; k < np; ++k) {
                if (side == 0) a.a1[a.idx1(e, 0, k)] = af;
                if (side == 1) a.a1[a.idx1(e, np, k)] = af;
                if (side == 2) a.a2[a.idx2(e, k, 0)] = af;
                if (side == 3) a.a2[a.idx2(e, k, np)] = af;
            }
        }
    }
    return a;
}

void apply_dry_override(const std::vector<State>& u, const CurvedQuadMesh& mesh,
                        const PhysicsParams& p, BlendField& alpha) {
    const int np = mesh.np();
    const int npe = mesh.nodes_per_element();
    for (int e = 0; e < mesh.n_elements; ++e) {
        bool dry = false;
        for (int n = 0; n < npe && !dry; ++n)
            dry = u[static_cast<std::size_t>(e) * npe + n].h < p.h_partial_dry;
        if (!dry) continue;
        for (int j = 0; j < np; ++j)
            for (int i = 0; i <= np; ++i) alpha.a1[alpha.idx1(e, i, j)] = 1.0;
        for (int i = 0; i < np; ++i)
            for (int j = 0; j <= np; ++j) alpha.a2[alpha.idx2(e, i, j)] = 1.0;
    }
}

BlendField frozen_random_blend(const CurvedQuadMesh& mesh, std::uint64_t seed) {
    const int np = mesh.np();
    const int N = mesh.N;

    // One frozen draw per node; every subcell interface then takes the larger
    // of its two adjacent node values. Faces between elements pair each face
    // node with its across-face partner, so both owners agree on the weight.
    std::vector<double> anode(mesh.x.size());
    for (std::size_t n = 0; n < anode.size(); ++n)
        anode[n] = unit_double(mix64(seed ^ mix64(n)));

    auto face_value = [&](int e, int side, int k) {
        const auto [i, j] = face_node(side, k, N);
        const double own = anode[mesh.nidx(e, i, j)];
        const FaceLink& f = mesh.faces[e][side];
        if (f.neighbor < 0) return own;
        const int kn = f.reversed ? N - k : k;
        const auto [ni, nj] = face_node(f.neighbor_side, kn, N);
        return interface_alpha(own, anode[mesh.nidx(f.neighbor, ni, nj)]);
    };

    BlendField a = uniform_blend(mesh, 0.0);
    for (int e = 0; e < mesh.n_elements; ++e) {
        for (int j = 0; j < np; ++j) {
            for (int i = 1; i <= N; ++i)
                a.a1[a.idx1(e, i, j)] =
                    interface_alpha(anode[mesh.nidx(e, i - 1, j)], anode[mesh.nidx(e, i, j)]);
            a.a1[a.idx1(e, 0, j)] = face_value(e, 0, j);
            a.a1[a.idx1(e, np, j)] = face_value(e, 1, j);
        }
        for (int i = 0; i < np; ++i) {
            for (int j = 1; j <= N; ++j)
                a.a2[a.idx2(e, i, j)] =
                    interface_alpha(anode[mesh.nidx(e, i, j - 1)], anode[mesh.nidx(e, i, j)]);
            a.a2[a.idx2(e, i, 0)] = face_value(e, 2, i);
            a.a2[a.idx2(e, i, np)] = face_value(e, 3, i);
        }
    }
    return a;
}

} // namespace swedg
