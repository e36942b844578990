// Command-line driver for the shallow water DGSEM solver. Subcommands:
//
//   run               integrate a configured case and write its artifacts
//   eoc               run the manufactured-solution refinement ladder
//   check-operators   verify the summation-by-parts identities per degree
//   check-equivalence compare the staggered assemblies against the direct
//                     form on random states
//   gen-mesh          write the 462-element channel mesh file
//
// `run` and `eoc` read a flat key = value config file; the recognized keys
// are documented in include/swedg/cli.hpp and README.md.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "swedg/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"shallow water DGSEM solver with node-wise blended limiting"};
    app.require_subcommand(1);

    std::string config_path;
    CLI::App* run = app.add_subcommand("run", "integrate a configured case");
    run->add_option("config", config_path, "path to a key = value config file")
        ->required();

    std::string eoc_config_path;
    CLI::App* eoc = app.add_subcommand("eoc", "manufactured-solution refinement ladder");
    eoc->add_option("config", eoc_config_path, "path to a key = value config file")
        ->required();

    int max_degree = 7;
    CLI::App* ops = app.add_subcommand("check-operators",
                                       "verify the summation-by-parts identities");
    ops->add_option("--max-degree", max_degree, "highest polynomial degree to check")
        ->default_val(7);

    std::uint64_t seed = 2024;
    int n_states = 100;
    CLI::App* equiv = app.add_subcommand(
        "check-equivalence", "staggered assemblies vs the direct form on random states");
    equiv->add_option("--seed", seed, "random state generator seed")->default_val(2024);
    equiv->add_option("--states", n_states, "number of random states per mesh")
        ->default_val(100);

    std::string mesh_path;
    CLI::App* gen = app.add_subcommand("gen-mesh", "write the channel mesh file");
    gen->add_option("path", mesh_path, "output mesh path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            return swedg::cmd_run(swedg::parse_config_file(config_path), std::cout);
        }
        if (eoc->parsed()) {
            return swedg::cmd_eoc(swedg::parse_config_file(eoc_config_path), std::cout);
        }
        if (ops->parsed()) {
            return swedg::cmd_check_operators(max_degree, std::cout);
        }
        if (equiv->parsed()) {
            return swedg::cmd_check_equivalence(seed, n_states, std::cout);
        }
        return swedg::cmd_gen_mesh(mesh_path, std::cout);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
}
