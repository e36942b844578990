#include "swedg/physics.hpp"

#include <algorithm>
#include <cmath>

namespace swedg {

Vec2 velocity(const State& u, const PhysicsParams& p) {
    if (u.h <= 5.0 * p.eps_dry) {
        return {0.0, 0.0};
    }
    const double h2 = u.h * u.h;
    const double s = 2.0 * u.h / (h2 + std::max(h2, p.tau_vel));
    return {s * u.hv1, s * u.hv2};
}

State desingularize(const State& u, const PhysicsParams& p) {
    const Vec2 v = velocity(u, p);
    return {u.h, u.h * v.x1, u.h * v.x2};
}

BlockFlux physical_flux(const State& u, const PhysicsParams& p) {
    const Vec2 v = velocity(u, p);
    return {{u.hv1, u.hv1 * v.x1, u.hv1 * v.x2},
            {u.hv2, u.hv2 * v.x1, u.hv2 * v.x2}};
}

BlockFlux volume_flux(FluxVariant variant, const State& uL, const State& uR,
                      const PhysicsParams& p) {
    if (uL.h < p.eps_dry || uR.h < p.eps_dry) {
        return {};
    }
    const Vec2 vL = velocity(uL, p);
    const Vec2 vR = velocity(uR, p);
    const double hv1a = 0.5 * (uL.hv1 + uR.hv1);
    const double hv2a = 0.5 * (uL.hv2 + uR.hv2);
    const double v1a = 0.5 * (vL.x1 + vR.x1);
    const double v2a = 0.5 * (vL.x2 + vR.x2);
    BlockFlux f{{hv1a, hv1a * v1a, hv1a * v2a},
                {hv2a, hv2a * v1a, hv2a * v2a}};
    if (variant != FluxVariant::ersing_jump) {
        const double pavg = 0.5 * p.gravity * uL.h * uR.h;
        f.f1.hv1 += pavg;
        f.f2.hv2 += pavg;
    }
    return f;
}

State noncons_local(const State& u, Vec2 Ja, const PhysicsParams& p) {
    const double c = 0.5 * p.gravity * u.h;
    return {0.0, c * Ja.x1, c * Ja.x2};
}

State noncons_jump(FluxVariant variant, const State& u_own, double b_own,
                   const State& u_ext, double b_ext) {
    const double j = variant == FluxVariant::wintermeyer_jump
                         ? b_ext - b_own
                         : (u_ext.h + b_ext) - (u_own.h + b_own);
    return {0.0, j, j};
}

State noncons_local_sym(const State& u, const PhysicsParams& p) {
    const double c = p.gravity * u.h;
    return {0.0, c, c};
}

State noncons_sym(Vec2 JaL, double bL, Vec2 JaR, double bR) {
    const double ba = 0.5 * (bL + bR);
    return {0.0, 0.5 * (JaL.x1 + JaR.x1) * ba, 0.5 * (JaL.x2 + JaR.x2) * ba};
}

std::array<double, 3> entropy_vars(const State& u, double b, const PhysicsParams& p) {
    const Vec2 v = velocity(u, p);
    return {p.gravity * (u.h + b) - 0.5 * (v.x1 * v.x1 + v.x2 * v.x2), v.x1, v.x2};
}

DissipationMatrixH dissipation_matrix(const State& uL, const State& uR,
                                      const PhysicsParams& p) {
    DissipationMatrixH H;
    const double ha = 0.5 * (uL.h + uR.h);
    if (ha <= 0.0) {
        H.degenerate = true;
        return H;
    }
    const Vec2 vL = velocity(uL, p);
    const Vec2 vR = velocity(uR, p);
    const double v1 = 0.5 * (vL.x1 + vR.x1);
    const double v2 = 0.5 * (vL.x2 + vR.x2);
    const double ig = 1.0 / p.gravity;
    H.m = {ig,      ig * v1,           ig * v2,
           ig * v1, ha + ig * v1 * v1, ig * v1 * v2,
           ig * v2, ig * v1 * v2,      ha + ig * v2 * v2};
    return H;
}

State apply(const DissipationMatrixH& H, const std::array<double, 3>& w) {
    const auto& m = H.m;
    return {m[0] * w[0] + m[1] * w[1] + m[2] * w[2],
            m[3] * w[0] + m[4] * w[1] + m[5] * w[2],
            m[6] * w[0] + m[7] * w[1] + m[8] * w[2]};
}

double max_wavespeed(const State& uL, const State& uR, Vec2 n_unit,
                     const PhysicsParams& p) {
    const auto side = [&](const State& u) {
        return std::abs(dot(velocity(u, p), n_unit)) +
               std::sqrt(p.gravity * std::max(u.h, 0.0));
    };
    return std::max(side(uL), side(uR));
}

State surface_flux(FluxVariant variant, const State& u_own, double b_own,
                   const State& u_ext, double b_ext, Vec2 Ja_own, int sigma,
                   const PhysicsParams& p) {
    State f = contract(volume_flux(variant, u_own, u_ext, p), Ja_own);

    if (variant == FluxVariant::wintermeyer_symmetric) {
        f += hadamard(noncons_local_sym(u_own, p),
                      noncons_sym(Ja_own, b_own, Ja_own, b_ext));
    } else {
        f += hadamard(noncons_local(u_own, Ja_own, p),
                      noncons_jump(variant, u_own, b_own, u_ext, b_ext));
    }

    const double nrm = norm(Ja_own);
    if (nrm > 0.0) {
        const Vec2 n{Ja_own.x1 / nrm, Ja_own.x2 / nrm};
        const DissipationMatrixH H = dissipation_matrix(u_own, u_ext, p);
        if (!H.degenerate) {
            const double lam = max_wavespeed(u_own, u_ext, n, p);
            const auto w_own = entropy_vars(u_own, b_own, p);
            const auto w_ext = entropy_vars(u_ext, b_ext, p);
            const std::array<double, 3> dw{w_ext[0] - w_own[0],
                                           w_ext[1] - w_own[1],
                                           w_ext[2] - w_own[2]};
            f -= (0.5 * sigma * lam * nrm) * apply(H, dw);
        }
    }
    return f;
}

State manning_source(const State& u, const PhysicsParams& p) {
    if (p.manning_n == 0.0 || u.h <= 5.0 * p.eps_dry) {
        return {};
    }
    const Vec2 v = velocity(u, p);
    const double c = -p.gravity * p.manning_n * p.manning_n * norm(v) /
                     std::cbrt(u.h);
    return {0.0, c * v.x1, c * v.x2};
}

double entropy_residual(const State& u_i, double b_i, Vec2 Ja_i,
                        const State& u_m, double b_m, Vec2 Ja_m,
                        const PhysicsParams& p) {
    const Vec2 v_i = velocity(u_i, p);
    const Vec2 v_m = velocity(u_m, p);
    const double c = 0.5 * p.gravity;
    const Vec2 w_i{c * u_i.h * v_i.x1, c * u_i.h * v_i.x2};
    const Vec2 w_m{c * u_m.h * v_m.x1, c * u_m.h * v_m.x2};
    const double jump_surf = (u_m.h + b_m) - (u_i.h + b_i);
    return -0.5 * dot(w_m - w_i, Ja_m - Ja_i) * jump_surf;
}

} // namespace swedg
