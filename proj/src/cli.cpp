#include "swedg/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <stdexcept>
#include <vector>

#include "swedg/io.hpp"
#include "swedg/mesh.hpp"
#include "swedg/operators.hpp"
#include "swedg/semidiscretization.hpp"

namespace swedg {

namespace {

constexpr double kPi = 3.14159265358979323846;

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string case_token(CaseId id) {
    switch (id) {
    case CaseId::manufactured: return "ms";
    case CaseId::well_balanced: return "wb";
    case CaseId::dam_break: return "dam2d";
    default: return "channel";
    }
}

// Per-key value parsers. Every error names the config location and key.
struct KeyContext {
    const std::string& origin;
    int line;
    const std::string& key;

    [[noreturn]] void reject(const std::string& why) const {
        fail(origin + ":" + std::to_string(line) + ": key '" + key + "': " + why);
    }
    double number(const std::string& v) const {
        try {
            std::size_t used = 0;
            const double x = std::stod(v, &used);
            if (used != v.size()) reject("trailing characters in '" + v + "'");
            return x;
        } catch (const std::logic_error&) {
            reject("expected a number, got '" + v + "'");
        }
    }
    long integer(const std::string& v) const {
        const double x = number(v);
        if (x != std::floor(x)) reject("expected an integer, got '" + v + "'");
        return static_cast<long>(x);
    }
};

void apply_key(RunConfig& cfg, const KeyContext& at, const std::string& value) {
    const std::string& key = at.key;
    if (key == "case") {
        if (value == "ms") cfg.case_id = CaseId::manufactured;
        else if (value == "wb") cfg.case_id = CaseId::well_balanced;
        else if (value == "dam2d") cfg.case_id = CaseId::dam_break;
        else if (value == "channel") cfg.case_id = CaseId::channel;
        else at.reject("unknown case '" + value + "' (ms | wb | dam2d | channel)");
    } else if (key == "formula") {
        if (value == "new") cfg.formula = StaggeredFormula::pairwise;
        else if (value == "alternative") cfg.formula = StaggeredFormula::alternative;
        else at.reject("unknown formula '" + value + "' (new | alternative)");
    } else if (key == "flux") {
        if (value == "ersing-jump") cfg.variant = FluxVariant::ersing_jump;
        else if (value == "wintermeyer-jump") cfg.variant = FluxVariant::wintermeyer_jump;
        else if (value == "wintermeyer-symmetric")
            cfg.variant = FluxVariant::wintermeyer_symmetric;
        else
            at.reject("unknown flux '" + value +
                      "' (ersing-jump | wintermeyer-jump | wintermeyer-symmetric)");
    } else if (key == "limiter") {
        if (value == "none") cfg.limiter = LimiterKind::none;
        else if (value == "fct") cfg.limiter = LimiterKind::fct;
        else if (value == "element") cfg.limiter = LimiterKind::element;
        else if (value == "frozen-random") cfg.limiter = LimiterKind::frozen_random;
        else at.reject("unknown limiter '" + value + "' (none | fct | element | frozen-random)");
    } else if (key == "seed") {
        const long s = at.integer(value);
        if (s < 0) at.reject("seed must be nonnegative");
        cfg.seed = static_cast<std::uint64_t>(s);
    } else if (key == "cells") {
        const long c = at.integer(value);
        if (c < 1) at.reject("cells must be positive");
        cfg.cells = static_cast<int>(c);
    } else if (key == "rungs") {
        const long r = at.integer(value);
        if (r < 2) at.reject("rungs must be at least 2");
        cfg.rungs = static_cast<int>(r);
    } else if (key == "degree") {
        cfg.degree = static_cast<int>(at.integer(value));
    } else if (key == "t-end") {
        const double t = at.number(value);
        if (t <= 0.0) at.reject("t-end must be positive");
        cfg.t_end = t;
    } else if (key == "cfl") {
        const double c = at.number(value);
        if (c <= 0.0) at.reject("cfl must be positive");
        cfg.cfl = c;
    } else if (key == "dt") {
        const double d = at.number(value);
        if (d <= 0.0) at.reject("dt must be positive");
        cfg.dt = d;
    } else if (key == "out") {
        if (value.empty()) at.reject("output directory must not be empty");
        cfg.out_dir = value;
    } else if (key == "snapshot-every") {
        const long s = at.integer(value);
        if (s < 0) at.reject("snapshot-every must be nonnegative");
        cfg.snapshot_every = s;
    } else if (key == "gauge-every") {
        const long g = at.integer(value);
        if (g < 1) at.reject("gauge-every must be positive");
        cfg.gauge_every = g;
    } else if (key == "mesh") {
        if (value.empty()) at.reject("mesh path must not be empty");
        cfg.mesh_path = value;
    } else if (key == "threads") {
        if (at.integer(value) != 1) at.reject("this build runs single-threaded; use threads = 1");
        cfg.threads = 1;
    } else {
        at.reject("unknown key");
    }
}

// The symmetric bottom coupling has no local-times-jump split, so neither
// staggered formula can carry it; reject the combination at parse time.
void validate(const RunConfig& cfg, const std::string& origin) {
    if (cfg.variant == FluxVariant::wintermeyer_symmetric) {
        fail(origin +
             ": flux 'wintermeyer-symmetric' couples the averaged bottom with the averaged "
             "metric, which has no local-times-jump factorization; the staggered formulas "
             "(new, alternative) require that split. Use ersing-jump or wintermeyer-jump.");
    }
    if (cfg.cfl && cfg.dt) {
        fail(origin + ": give either 'cfl' or 'dt', not both");
    }
}

void apply_overrides(CaseDefinition& def, const RunConfig& cfg) {
    def.formula = cfg.formula;
    def.variant = cfg.variant;
    if (cfg.limiter) def.limiter = *cfg.limiter;
    def.seed = cfg.seed;
    if (cfg.t_end) def.time.t_end = *cfg.t_end;
    if (cfg.cfl) {
        def.time.fixed_dt = false;
        def.time.dt = 0.0;
        def.time.cfl = *cfg.cfl;
    }
    if (cfg.dt) {
        def.time.fixed_dt = true;
        def.time.dt = *cfg.dt;
        def.time.cfl = 0.0;
    }
}

struct RunReport {
    long steps = 0;
};

void write_snapshot_file(const CaseEngine& eng, const std::string& path) {
    std::ofstream f(path);
    if (!f) fail("cannot write snapshot '" + path + "'");
    write_field_snapshot(eng.state(), eng.bottom(), eng.last_alpha(), eng.def().mesh,
                         eng.time(), f);
}

} // namespace

RunConfig parse_config(std::istream& in, const std::string& origin) {
    RunConfig cfg;
    bool saw_case = false;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        if (body.front() == '[' && body.back() == ']') continue; // section marker
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            fail(origin + ":" + std::to_string(lineno) + ": expected 'key = value', got '" +
                 body + "'");
        }
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (key.empty()) fail(origin + ":" + std::to_string(lineno) + ": empty key");
        if (value.empty()) {
            fail(origin + ":" + std::to_string(lineno) + ": key '" + key + "': empty value");
        }
        apply_key(cfg, KeyContext{origin, lineno, key}, value);
        if (key == "case") saw_case = true;
    }
    if (!saw_case) fail(origin + ": missing required key 'case'");
    validate(cfg, origin);
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open config '" + path + "'");
    return parse_config(in, path);
}

CaseDefinition build_case(const RunConfig& cfg) {
    CaseDefinition def;
    switch (cfg.case_id) {
    case CaseId::manufactured:
        def = manufactured_case(cfg.cells);
        break;
    case CaseId::well_balanced:
        def = well_balanced_case(cfg.seed);
        break;
    case CaseId::dam_break:
        def = circular_dam_break_case(cfg.formula);
        break;
    case CaseId::channel:
        def = channel_case(cfg.degree, cfg.t_end.value_or(30.0), cfg.mesh_path);
        break;
    }
    apply_overrides(def, cfg);
    return def;
}

int cmd_run(const RunConfig& cfg, std::ostream& log) {
    long last_step = 0;
    try {
        std::filesystem::create_directories(cfg.out_dir);
        CaseDefinition def = build_case(cfg);
        const std::string base = cfg.out_dir + "/" + case_token(cfg.case_id);
        CaseEngine eng(def);

        // Surface at rest is judged against the realized initial surface.
        const std::vector<double>& b = eng.bottom();
        std::vector<double> H0(b.size());
        for (std::size_t n = 0; n < b.size(); ++n) H0[n] = eng.state()[n].h + b[n];

        std::ofstream gauge_file;
        std::unique_ptr<GaugeSet> gauges;
        std::unique_ptr<GaugeCsv> csv;
        if (!def.gauges.empty()) {
            gauges = std::make_unique<GaugeSet>(def.mesh, def.gauges);
            const std::string path = cfg.out_dir + "/gauges.csv";
            gauge_file.open(path);
            if (!gauge_file) fail("cannot write gauge trace '" + path + "'");
            csv = std::make_unique<GaugeCsv>(gauge_file, gauges->size());
            csv->row(0.0, gauges->sample(eng.state(), b));
        }

        long last_gauge_step = 0;
        eng.run([&](long step, double t) {
            last_step = step;
            if (csv && step % cfg.gauge_every == 0) {
                csv->row(t, gauges->sample(eng.state(), b));
                last_gauge_step = step;
            }
            if ((def.snapshot_step > 0 && step == def.snapshot_step) ||
                (cfg.snapshot_every > 0 && step % cfg.snapshot_every == 0)) {
                write_snapshot_file(eng, base + "_step" + std::to_string(step) + ".snap");
            }
        });
        if (csv && last_gauge_step != last_step) {
            csv->row(eng.time(), gauges->sample(eng.state(), b));
        }
        write_snapshot_file(eng, base + "_final.snap");

        log << "case " << case_token(cfg.case_id) << "\n";
        log << "steps " << last_step << "\n";
        log << "final-time " << num(eng.time()) << "\n";
        double dev_h = 0.0, dev_m = 0.0, min_h = eng.state().empty() ? 0.0 : eng.state()[0].h;
        for (std::size_t n = 0; n < b.size(); ++n) {
            const State& s = eng.state()[n];
            dev_h = std::max(dev_h, std::abs(s.h + b[n] - H0[n]));
            dev_m = std::max({dev_m, std::abs(s.hv1), std::abs(s.hv2)});
            min_h = std::min(min_h, s.h);
        }
        switch (cfg.case_id) {
        case CaseId::manufactured: {
            const auto err = l2_error(eng.state(), def.mesh, def.exact, eng.time());
            log << "l2-h " << num(err[0]) << "\n";
            log << "l2-hv1 " << num(err[1]) << "\n";
            log << "l2-hv2 " << num(err[2]) << "\n";
            break;
        }
        case CaseId::well_balanced:
            log << "max-surface-deviation " << num(dev_h) << "\n";
            log << "max-momentum " << num(dev_m) << "\n";
            break;
        case CaseId::dam_break:
            log << "bound-violations " << eng.bound_violations() << "\n";
            log << "min-depth " << num(min_h) << "\n";
            break;
        case CaseId::channel:
            log << "min-depth " << num(min_h) << "\n";
            log << "max-momentum " << num(dev_m) << "\n";
            break;
        }
        return 0;
    } catch (const std::exception& err) {
        log << "error after step " << last_step << ": " << err.what() << "\n";
        return 1;
    }
}

int cmd_eoc(const RunConfig& cfg, std::ostream& log) {
    try {
        if (cfg.case_id != CaseId::manufactured) {
            fail("the eoc command needs 'case = ms'");
        }
        std::vector<CaseDefinition> defs;
        defs.reserve(cfg.rungs);
        std::vector<std::vector<State>> states;
        std::vector<const CurvedQuadMesh*> meshes;
        double t = 0.0;
        for (int k = 0; k < cfg.rungs; ++k) {
            defs.push_back(manufactured_case(cfg.cells << k));
            apply_overrides(defs.back(), cfg);
            CaseEngine eng(defs.back());
            eng.run();
            states.push_back(eng.state());
            t = eng.time();
        }
        for (const CaseDefinition& def : defs) meshes.push_back(&def.mesh);
        const ErrorTable tab = l2_error_and_eoc(meshes, states, defs[0].exact, t);

        const auto cell = [](double v) { return std::isnan(v) ? std::string("-") : num(v); };
        log << "elements h_error h_eoc hv1_error hv1_eoc hv2_error hv2_eoc\n";
        for (int k = 0; k < cfg.rungs; ++k) {
            const long side = static_cast<long>(cfg.cells) << k;
            log << side * side;
            for (int c = 0; c < 3; ++c) {
                log << ' ' << num(tab.error[k][c]) << ' ' << cell(tab.eoc[k][c]);
            }
            log << "\n";
        }
        return 0;
    } catch (const std::exception& err) {
        log << "error: " << err.what() << "\n";
        return 1;
    }
}

int cmd_check_operators(int max_degree, std::ostream& log) {
    try {
        if (max_degree < 1) fail("need a positive degree");
        bool ok = true;
        for (int N = 1; N <= max_degree; ++N) {
            const SbpOperators ops = build_lgl_operators(N);
            const int np = ops.np();
            double r = 0.0;
            double wsum = 0.0;
            for (int j = 0; j < np; ++j) {
                wsum += ops.weights[j];
                double drow = 0.0, srow = 0.0;
                for (int k = 0; k < np; ++k) {
                    drow += ops.d(j, k);
                    srow += ops.s(j, k);
                    const double b = j == k ? ops.boundary(j) : 0.0;
                    r = std::max(r, std::abs(ops.q(j, k) + ops.q(k, j) - b));
                    r = std::max(r, std::abs(ops.s(j, k) + ops.s(k, j)));
                    r = std::max(r, std::abs(ops.s(j, k) + ops.s(np - 1 - j, np - 1 - k)));
                    r = std::max(r, std::abs(ops.s(j, k) - 2.0 * ops.q(j, k) + b));
                }
                const double want = (j == 0 ? 1.0 : 0.0) - (j == np - 1 ? 1.0 : 0.0);
                r = std::max(r, std::abs(drow));
                r = std::max(r, std::abs(srow - want));
            }
            r = std::max(r, std::abs(wsum - 2.0));
            const bool pass = r <= 1e-13;
            ok = ok && pass;
            log << "N=" << N << " residual " << num(r) << (pass ? " PASS" : " FAIL") << "\n";
        }
        return ok ? 0 : 1;
    } catch (const std::exception& err) {
        log << "error: " << err.what() << "\n";
        return 1;
    }
}

int cmd_check_equivalence(std::uint64_t seed, int n_states, std::ostream& log) {
    try {
        if (n_states < 1) fail("need at least one state");
        BoundarySpec periodic;
        struct Named {
            std::string name;
            CurvedQuadMesh mesh;
        };
        std::vector<Named> meshes;
        meshes.push_back({"interval", build_interval(0.0, 2.0, 5, 3, BoundaryTag::periodic,
                                                     BoundaryTag::periodic)});
        meshes.push_back({"cartesian", build_cartesian(0.0, 2.0, 0.0, 2.0, 3, 3, 3, periodic)});
        meshes.push_back(
            {"curved", warp_mesh(build_cartesian(-1.0, 1.0, -1.0, 1.0, 3, 3, 3, periodic),
                                 [](double x, double y) {
                                     return Vec2{x + 0.1 * std::sin(kPi * y) * std::cos(0.5 * kPi * x),
                                                 y + 0.1 * std::sin(kPi * x) * std::cos(0.5 * kPi * y)};
                                 },
                                 3)});

        PhysicsParams p;
        p.gravity = 9.81;
        std::mt19937_64 gen(seed);
        std::uniform_real_distribution<double> depth(0.5, 2.0);
        std::uniform_real_distribution<double> mom(-1.0, 1.0);
        std::uniform_real_distribution<double> bed(0.0, 0.3);

        bool ok = true;
        for (const Named& m : meshes) {
            const std::size_t nn = m.mesh.x.size();
            double worst_pair = 0.0, worst_alt = 0.0;
            for (int k = 0; k < n_states; ++k) {
                std::vector<State> u(nn);
                std::vector<double> b(nn);
                for (std::size_t n = 0; n < nn; ++n) {
                    u[n] = {depth(gen), mom(gen), mom(gen)};
                    b[n] = bed(gen);
                }
                const FaceTraces traces = gather_traces(u, b, m.mesh);
                const BlendField zero = uniform_blend(m.mesh, 0.0);
                for (const FluxVariant variant :
                     {FluxVariant::ersing_jump, FluxVariant::wintermeyer_jump}) {
                    const auto direct = dg_rhs_direct(u, b, traces, m.mesh, variant, p);
                    double scale = 0.0;
                    for (const State& s : direct) {
                        scale = std::max({scale, std::abs(s.h), std::abs(s.hv1),
                                          std::abs(s.hv2)});
                    }
                    for (const StaggeredFormula f :
                         {StaggeredFormula::pairwise, StaggeredFormula::alternative}) {
                        const StaggeredFluxField stag =
                            staggered_fluxes(f, u, b, traces, m.mesh, variant, p);
                        const auto got = blend_assemble(stag, stag, zero, m.mesh);
                        double d = 0.0;
                        for (std::size_t n = 0; n < nn; ++n) {
                            d = std::max({d, std::abs(got[n].h - direct[n].h),
                                          std::abs(got[n].hv1 - direct[n].hv1),
                                          std::abs(got[n].hv2 - direct[n].hv2)});
                        }
                        const double rel = d / std::max(scale, 1e-300);
                        if (f == StaggeredFormula::pairwise) {
                            worst_pair = std::max(worst_pair, rel);
                        } else {
                            worst_alt = std::max(worst_alt, rel);
                        }
                    }
                }
            }
            const bool pass = worst_pair <= 1e-12 && worst_alt <= 1e-12;
            ok = ok && pass;
            log << m.name << " new " << num(worst_pair) << " alternative " << num(worst_alt)
                << (pass ? " PASS" : " FAIL") << "\n";
        }
        return ok ? 0 : 1;
    } catch (const std::exception& err) {
        log << "error: " << err.what() << "\n";
        return 1;
    }
}

int cmd_gen_mesh(const std::string& path, std::ostream& log) {
    try {
        const QuadMeshSpec spec = build_channel_mesh();
        std::ofstream out(path);
        if (!out) fail("cannot write mesh '" + path + "'");
        out << "# 462-element quadrilateral mesh of the dam-break channel:\n";
        out << "# 16 m x 3.6 m domain, reservoir for x < 6.75, a 0.8 m wall band with a\n";
        out << "# 1 m gate centered on y = 1.8, trapezoidal banks with toes at y = 0.34\n";
        out << "# and y = 3.26, and an 18x6 quad ring fitted around a 0.8 m x 0.4 m\n";
        out << "# obstacle rotated 64 degrees about (11.25, 1.8). Outflow on x = 16,\n";
        out << "# walls everywhere else. Regenerate with: swe gen-mesh <path>\n";
        write_quad_mesh(spec, out);
        if (!out) fail("write to '" + path + "' failed");
        log << "wrote " << path << " (" << spec.elements.size() << " elements)\n";
        return 0;
    } catch (const std::exception& err) {
        log << "error: " << err.what() << "\n";
        return 1;
    }
}

} // namespace swedg
