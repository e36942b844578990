#include "swedg/cases.hpp"

#include "swedg/operators.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace swedg {

namespace {

constexpr double kPi = 3.14159265358979323846;

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

// Smooth in-place deformation of [-1,1]^2 that leaves the boundary fixed,
// used for the curved-mesh cases.
Vec2 square_warp(double x, double y) {
    return {x + 0.1 * std::sin(kPi * y) * std::cos(0.5 * kPi * x),
            y + 0.1 * std::sin(kPi * x) * std::cos(0.5 * kPi * y)};
}

double channel_bed(double y) {
    const double m = 0.155 / 0.34;
    return 0.5 * m * (std::abs(y - 0.34) + std::abs(y - 3.26) - 2.92);
}

} // namespace

std::vector<double> nodal_bottom(const CaseDefinition& def) {
    std::vector<double> b(def.mesh.x.size());
    for (std::size_t n = 0; n < b.size(); ++n)
        b[n] = def.bottom(def.mesh.x[n], def.mesh.y[n]);
    return b;
}

std::vector<State> nodal_initial(const CaseDefinition& def) {
    std::vector<State> u(def.mesh.x.size());
    for (std::size_t n = 0; n < u.size(); ++n) {
        const double x = def.mesh.x[n];
        const double y = def.mesh.y[n];
        const double h = def.surface(x, y) - def.bottom(x, y);
        const Vec2 v = def.velocity0(x, y);
        u[n] = {h, h * v.x1, h * v.x2};
    }
    return u;
}

CaseDefinition manufactured_case(int cells_per_side) {
    if (cells_per_side < 1)
        fail("cells_per_side must be at least 1, got " + std::to_string(cells_per_side));

    const auto H_exact = [](double x, double y, double t) {
        return 4.0 + 0.2 * std::cos(kPi * x + t) + 0.2 * std::cos(kPi * y + t);
    };
    const auto bed = [](double x, double y) {
        return 1.0 + 0.2 * std::cos(kPi * x) + 0.2 * std::cos(kPi * y);
    };

    CaseDefinition def;
    def.name = "manufactured";
    const BoundarySpec periodic;
    def.mesh = warp_mesh(
        build_cartesian(-1.0, 1.0, -1.0, 1.0, cells_per_side, cells_per_side, 3, periodic),
        square_warp, 3);
    def.surface = [H_exact](double x, double y) { return H_exact(x, y, 0.0); };
    def.velocity0 = [](double, double) { return Vec2{0.5, 0.5}; };
    def.bottom = bed;
    def.physics.gravity = 9.81;
    def.time.fixed_dt = true;
    def.time.dt = 5e-4;
    def.time.t_end = 0.1;

    def.exact = [H_exact, bed](double x, double y, double t) -> State {
        const double h = H_exact(x, y, t) - bed(x, y);
        return {h, 0.5 * h, 0.5 * h};
    };

    // Forcing that makes the exact fields solve the system. With constant
    // velocity v1 = v2 = 0.5 the momentum residuals collapse to
    // 0.5 * (mass residual) + g h dH/dx|dy.
    const double g = def.physics.gravity;
    def.forcing = [H_exact, bed, g](double x, double y, double t) -> State {
        const double h = H_exact(x, y, t) - bed(x, y);
        const double dh_dt = -0.2 * std::sin(kPi * x + t) - 0.2 * std::sin(kPi * y + t);
        const double dH_dx = -0.2 * kPi * std::sin(kPi * x + t);
        const double dH_dy = -0.2 * kPi * std::sin(kPi * y + t);
        const double dh_dx = dH_dx + 0.2 * kPi * std::sin(kPi * x);
        const double dh_dy = dH_dy + 0.2 * kPi * std::sin(kPi * y);
        const double s_h = dh_dt + 0.5 * (dh_dx + dh_dy);
        return {s_h, 0.5 * s_h + g * h * dH_dx, 0.5 * s_h + g * h * dH_dy};
    };
    return def;
}

CaseDefinition well_balanced_case(std::uint64_t seed) {
    const auto bed = [](double x, double y) {
        const double r = std::hypot(x, y);
        return r <= 0.4 ? 0.2 * (1.0 + std::cos(2.5 * kPi * r)) : 0.0;
    };

    CaseDefinition def;
    def.name = "well-balanced";
    const BoundarySpec walls{BoundaryTag::wall, BoundaryTag::wall, BoundaryTag::wall,
                             BoundaryTag::wall};
    def.mesh = warp_mesh(build_cartesian(-1.0, 1.0, -1.0, 1.0, 12, 8, 3, walls),
                         square_warp, 3);
    def.surface = [](double, double) { return 0.45; };
    def.velocity0 = [](double, double) { return Vec2{0.0, 0.0}; };
    def.bottom = bed;
    def.physics.gravity = 9.81;
    def.limiter = LimiterKind::frozen_random;
    def.seed = seed;
    def.time.cfl = 0.9;
    def.time.t_end = 10.0;
    def.exact = [bed](double x, double y, double) -> State {
        return {0.45 - bed(x, y), 0.0, 0.0};
    };
    return def;
}

CaseDefinition circular_dam_break_case(StaggeredFormula formula) {
    if (formula == StaggeredFormula::symmetric)
        fail("the circular dam break compares the pairwise and alternative formulas");

    CaseDefinition def;
    def.name = "circular-dam-break";
    const BoundarySpec walls{BoundaryTag::wall, BoundaryTag::wall, BoundaryTag::wall,
                             BoundaryTag::wall};
    def.mesh = build_cartesian(0.0, 4.0, 0.0, 4.0, 32, 32, 4, walls);
    def.surface = [](double x, double y) { return std::hypot(x, y) <= 0.5 ? 4.0 : 2.0; };
    def.velocity0 = [](double x, double y) -> Vec2 {
        const double r = std::hypot(x, y);
        if (r == 0.0 || r > 0.5) return {0.0, 0.0};
        return (0.1882 / r) * Vec2{x, y};
    };
    def.bottom = [](double x, double y) { return 0.2 + 0.2 * std::cos(kPi * (x + y)); };
    def.physics.gravity = 1.0;
    def.formula = formula;
    def.limiter = LimiterKind::fct;
    def.verify_bounds = true;
    def.time.cfl = 0.4;
    def.time.t_end = 2.0;
    def.snapshot_step = 20;
    return def;
}

CaseDefinition channel_case(int degree, double t_end, const std::string& mesh_path) {
    if (degree != 3 && degree != 5)
        fail("channel runs use degree 3 or 5, got " + std::to_string(degree));
    if (!(t_end > 0.0)) fail("t_end must be positive");

    CaseDefinition def;
    def.name = "channel";
    def.mesh = read_quad_mesh(mesh_path, degree);
    def.bottom = [](double, double y) { return channel_bed(y); };
    // The gate face sits at x = 6.75; everything downstream of it starts as a
    // thin sheet over the bed.
    def.surface = [](double x, double y) {
        return x <= 6.75 ? 0.4 : channel_bed(y) + 0.02;
    };
    def.velocity0 = [](double, double) { return Vec2{0.0, 0.0}; };
    def.physics.gravity = 9.81;
    def.physics.manning_n = 0.01;
    def.limiter = LimiterKind::fct;
    def.wet_dry = true;
    def.time.cfl = 0.225;
    def.time.t_end = t_end;
    def.gauges = {{10.35, 2.95}, {10.35, 1.20}, {11.70, 2.95},
                  {11.70, 1.00}, {12.90, 2.10}, {5.83, 2.90}};
    return def;
}

CaseEngine::CaseEngine(CaseDefinition def)
    : def_(std::move(def)),
      b_(nodal_bottom(def_)),
      u_(nodal_initial(def_)),
      alpha_(uniform_blend(def_.mesh, 0.0)) {
    if (def_.limiter == LimiterKind::frozen_random)
        frozen_ = frozen_random_blend(def_.mesh, def_.seed);
}

std::vector<State> CaseEngine::rhs(const std::vector<State>& u_in, double t, double dt) {
    const CurvedQuadMesh& mesh = def_.mesh;
    const PhysicsParams& p = def_.physics;

    std::vector<State> u = u_in;
    if (def_.wet_dry)
        for (State& s : u) s = desingularize(s, p);

    const FaceTraces traces = gather_traces(u, b_, mesh);
    const StaggeredFluxField dg =
        staggered_fluxes(def_.formula, u, b_, traces, mesh, def_.variant, p);

    const bool need_fv = def_.limiter != LimiterKind::none || def_.wet_dry;
    StaggeredFluxField fv;
    if (need_fv) fv = fv_fluxes(u, b_, traces, mesh, def_.variant, p);

    BlendField alpha = uniform_blend(mesh, 0.0);
    NodalBounds bounds;
    switch (def_.limiter) {
    case LimiterKind::none:
        break;
    case LimiterKind::frozen_random:
        alpha = frozen_;
        break;
    case LimiterKind::element:
        alpha = element_blend(element_alphas(u, mesh, p), mesh);
        break;
    case LimiterKind::fct:
        bounds = fv_predictor_bounds(u, b_, fv, mesh, dt);
        alpha = zalesak_fct(dg, fv, bounds, u, b_, mesh, dt);
        break;
    }
    if (def_.wet_dry) apply_dry_override(u, mesh, p, alpha);
    alpha_ = alpha;

    std::vector<State> out = need_fv ? blend_assemble(dg, fv, alpha, mesh)
                                     : blend_assemble(dg, dg, alpha, mesh);

    if (def_.verify_bounds && def_.limiter == LimiterKind::fct) {
        for (std::size_t n = 0; n < out.size(); ++n) {
            const double H = u[n].h + dt * out[n].h + b_[n];
            const double slack = 1e-12 * (1.0 + std::abs(H));
            if (H < bounds.H_min[n] - slack || H > bounds.H_max[n] + slack) {
                ++bound_violations_;
            }
        }
    }

    if (p.manning_n != 0.0)
        for (std::size_t n = 0; n < out.size(); ++n)
            out[n] = out[n] + manning_source(u[n], p);
    if (def_.forcing)
        for (std::size_t n = 0; n < out.size(); ++n)
            out[n] = out[n] + def_.forcing(mesh.x[n], mesh.y[n], t);
    return out;
}

void CaseEngine::run(const std::function<void(long, double)>& after_step) {
    const RhsFn f = [this](const std::vector<State>& u, double t) {
        return rhs(u, t, dt_);
    };
    const auto before = [this](long, double, double dt) { dt_ = dt; };
    const auto after = [&](long step, double t, const std::vector<State>& u) {
        u_ = u;
        t_ = t;
        if (after_step) after_step(step, t);
    };
    u_ = advance(f, u_, def_.time, def_.mesh, def_.physics, after, before);
}

std::array<double, 3> l2_error(const std::vector<State>& u, const CurvedQuadMesh& mesh,
                               const std::function<State(double, double, double)>& exact,
                               double t) {
    if (!exact) fail("error norms need an exact solution");
    const SbpOperators& ops = mesh.ops;
    const int np = mesh.np();
    const int npe = np * np;
    const int ng = 2 * np;
    const QuadratureRule rule = gauss_legendre_rule(ng);
    const std::vector<double> T = interpolation_matrix(ops, rule.nodes);

    const auto at = [&](const std::vector<double>& f, int a, int b) {
        double acc = 0.0;
        for (int j = 0; j < np; ++j)
            for (int i = 0; i < np; ++i)
                acc += T[a * np + i] * T[b * np + j] * f[j * np + i];
        return acc;
    };
    const auto nodal_deriv = [&](const double* f, int axis) {
        std::vector<double> out(npe, 0.0);
        for (int j = 0; j < np; ++j)
            for (int i = 0; i < np; ++i) {
                double acc = 0.0;
                for (int m = 0; m < np; ++m)
                    acc += axis == 0 ? ops.d(i, m) * f[j * np + m]
                                     : ops.d(j, m) * f[m * np + i];
                out[j * np + i] = acc;
            }
        return out;
    };

    std::array<double, 3> acc{0.0, 0.0, 0.0};
    double area = 0.0;
    std::vector<double> fh(npe), f1(npe), f2(npe), ex(npe), ey(npe);
    for (int e = 0; e < mesh.n_elements; ++e) {
        for (int n = 0; n < npe; ++n) {
            const State& s = u[e * npe + n];
            fh[n] = s.h;
            f1[n] = s.hv1;
            f2[n] = s.hv2;
            ex[n] = mesh.x[e * npe + n];
            ey[n] = mesh.y[e * npe + n];
        }
        const auto x_xi = nodal_deriv(ex.data(), 0);
        const auto x_eta = nodal_deriv(ex.data(), 1);
        const auto y_xi = nodal_deriv(ey.data(), 0);
        const auto y_eta = nodal_deriv(ey.data(), 1);
        for (int b = 0; b < ng; ++b)
            for (int a = 0; a < ng; ++a) {
                const double jg = at(x_xi, a, b) * at(y_eta, a, b) -
                                  at(x_eta, a, b) * at(y_xi, a, b);
                const double m = rule.weights[a] * rule.weights[b] * jg;
                const State es = exact(at(ex, a, b), at(ey, a, b), t);
                const double dh = at(fh, a, b) - es.h;
                const double d1 = at(f1, a, b) - es.hv1;
                const double d2 = at(f2, a, b) - es.hv2;
                acc[0] += m * dh * dh;
                acc[1] += m * d1 * d1;
                acc[2] += m * d2 * d2;
                area += m;
            }
    }
    return {std::sqrt(acc[0] / area), std::sqrt(acc[1] / area), std::sqrt(acc[2] / area)};
}

ErrorTable l2_error_and_eoc(const std::vector<const CurvedQuadMesh*>& meshes,
                            const std::vector<std::vector<State>>& states,
                            const std::function<State(double, double, double)>& exact,
                            double t) {
    if (meshes.size() != states.size())
        fail("mesh and state sequences have different lengths");
    if (meshes.size() < 2) fail("a refinement sequence needs at least two meshes");

    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    ErrorTable tab;
    for (std::size_t k = 0; k < meshes.size(); ++k)
        tab.error.push_back(l2_error(states[k], *meshes[k], exact, t));
    tab.eoc.assign(meshes.size(), {nan, nan, nan});
    for (std::size_t k = 1; k < meshes.size(); ++k)
        for (int c = 0; c < 3; ++c) {
            const double coarse = tab.error[k - 1][c];
            const double fine = tab.error[k][c];
            if (coarse > 0.0 && fine > 0.0)
                tab.eoc[k][c] = std::log(coarse / fine) / std::log(2.0);
        }
    return tab;
}

GaugeSet::GaugeSet(const CurvedQuadMesh& mesh, const std::vector<Vec2>& points)
    : mesh_(&mesh) {
    at_.reserve(points.size());
    for (const Vec2& q : points) {
        const LocatedPoint hit = locate_point(mesh, q.x1, q.x2);
        if (!hit.found)
            fail("gauge at (" + std::to_string(q.x1) + ", " + std::to_string(q.x2) +
                 ") lies outside the mesh");
        at_.push_back(hit);
    }
}

std::vector<double> GaugeSet::sample(const std::vector<State>& u,
                                     const std::vector<double>& b) const {
    std::vector<double> H(mesh_->x.size());
    for (std::size_t n = 0; n < H.size(); ++n) H[n] = u[n].h + b[n];
    std::vector<double> out(at_.size());
    for (std::size_t g = 0; g < at_.size(); ++g)
        out[g] = sample_field(*mesh_, H, at_[g]);
    return out;
}

State conserved_totals(const std::vector<State>& u, const CurvedQuadMesh& mesh) {
    const int np = mesh.np();
    const std::vector<double>& wq = mesh.ops.weights;
    State acc{0.0, 0.0, 0.0};
    for (int e = 0; e < mesh.n_elements; ++e)
        for (int j = 0; j < np; ++j)
            for (int i = 0; i < np; ++i) {
                const int n = mesh.nidx(e, i, j);
                acc = acc + (mesh.jac[n] * wq[i] * wq[j]) * u[n];
            }
    return acc;
}

} // namespace swedg
