#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "swedg/cases.hpp"

namespace swedg {

enum class CaseId { manufactured, well_balanced, dam_break, channel };

// Validated run configuration parsed from flat `key = value` text. Optional
// fields fall back to the selected case's own defaults.
//
// Keys: case (ms | wb | dam2d | channel), formula (new | alternative),
// flux (ersing-jump | wintermeyer-jump | wintermeyer-symmetric), limiter
// (none | fct | element | frozen-random), seed, cells, rungs, degree,
// t-end, cfl, dt, out, snapshot-every, gauge-every, mesh, threads.
// Lines starting with '#' and bracketed section markers are ignored.
struct RunConfig {
    CaseId case_id = CaseId::well_balanced;
    StaggeredFormula formula = StaggeredFormula::pairwise;
    FluxVariant variant = FluxVariant::ersing_jump;
    std::optional<LimiterKind> limiter;
    std::uint64_t seed = 1;
    int cells = 4;            // manufactured grid cells per side
    int rungs = 4;            // refinement ladder length for the eoc command
    int degree = 3;           // channel polynomial degree (3 or 5)
    std::optional<double> t_end;
    std::optional<double> cfl;
    std::optional<double> dt;
    std::string out_dir = ".";
    long snapshot_every = 0;  // steps between field snapshots; 0 = final only
    long gauge_every = 1;     // steps between gauge rows
    std::string mesh_path = "data/channel_462.mesh";
    int threads = 1;
};

// Parse and validate a config. origin names the source in error messages
// (file path or a placeholder for in-memory text); every error carries
// origin, line, and key. Unknown keys are rejected.
RunConfig parse_config(std::istream& in, const std::string& origin);
RunConfig parse_config_file(const std::string& path);

// Realize the configured case, with the config's overrides applied on top
// of the case defaults. Validation that needs the case context (degree,
// flux/formula compatibility) happens here too.
CaseDefinition build_case(const RunConfig& cfg);

// Subcommand bodies behind the driver binary. Reports go to `log`; artifact
// files land under cfg.out_dir. Nonzero return means failure, with the
// reason already printed.
int cmd_run(const RunConfig& cfg, std::ostream& log);
int cmd_eoc(const RunConfig& cfg, std::ostream& log);
int cmd_check_operators(int max_degree, std::ostream& log);
int cmd_check_equivalence(std::uint64_t seed, int n_states, std::ostream& log);
int cmd_gen_mesh(const std::string& path, std::ostream& log);

} // namespace swedg
