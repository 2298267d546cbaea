// Command-line front end. Subcommands: derive, verify, evolve, invariants,
// reconstruct, geodesic, pipeline. Exit codes: 0 success, 2 input error,
// 3 numerical halt.

#include "geoflow/cli.hpp"
#include "geoflow/core.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <set>
#include <string>
#include <vector>

namespace {

std::set<int> parse_mask(const std::string& csv) {
    std::set<int> mask;
    std::string cur;
    for (char c : csv + ",") {
        if (c == ',') {
            if (!cur.empty()) mask.insert(std::stoi(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    return mask;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"geoflow: polynomial geodesic-flow integrability laboratory"};
    app.require_subcommand(1);

    geoflow::cli::GlobalOptions g;
    bool serial = false;
    app.add_option("--output-dir", g.output_dir, "directory for generated files");
    app.add_option("--seed", g.seed, "seed recorded in reports");
    app.add_flag("--quiet", g.quiet, "suppress progress output");
    app.add_flag("--serial", serial, "run the serial reference kernels");

    int degree = 3;
    std::string zero_csv, fields_dir, config_path, snapshot_csv, series_dir;
    std::string g12_csv, poly_json, initial_csv;
    int index = 1;
    bool non_periodic = false;
    double t_end = 5.0, dt = 1e-3;

    auto* derive = app.add_subcommand("derive", "print the coefficient PDE system");
    derive->add_option("--degree", degree, "polynomial degree N")->required();
    derive->add_option("--zero", zero_csv, "comma-separated vanishing coefficient indices");

    auto* verify = app.add_subcommand("verify", "residuals of the system on stored fields");
    verify->add_option("--fields", fields_dir, "directory with g12.csv and a<k>.csv")->required();
    verify->add_option("--degree", degree, "polynomial degree N")->required();
    verify->add_option("--zero", zero_csv, "comma-separated vanishing coefficient indices");

    auto* evolve = app.add_subcommand("evolve", "run the evolutionary system");
    evolve->add_option("--config", config_path, "JSON configuration")->required();

    auto* invariants = app.add_subcommand("invariants", "branch points, invariants, velocities");
    invariants->add_option("--snapshot", snapshot_csv, "snapshot CSV (x,a,b_1,...)")->required();
    invariants->add_option("--degree", degree, "polynomial degree N")->required();
    invariants->add_flag("--non-periodic", non_periodic, "treat the grid as non-periodic");

    auto* reconstruct = app.add_subcommand("reconstruct", "metric data from a snapshot series");
    reconstruct->add_option("--series", series_dir, "directory with series.json")->required();
    reconstruct->add_option("--index", index, "conservation-law root index k")->required();

    auto* geodesic = app.add_subcommand("geodesic", "integrate trajectories, report drifts");
    geodesic->add_option("--g12", g12_csv, "metric field CSV")->required();
    geodesic->add_option("--poly", poly_json, "first-integral JSON")->required();
    geodesic->add_option("--initial", initial_csv, "CSV of x1,x2,p1,p2 rows")->required();
    geodesic->add_option("--t-end", t_end, "integration time");
    geodesic->add_option("--dt", dt, "fixed step");

    auto* pipeline = app.add_subcommand("pipeline", "evolve, reconstruct, verify, integrate");
    pipeline->add_option("--config", config_path, "JSON configuration")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : geoflow::cli::kExitInput;
    }

    if (serial) geoflow::set_backend(geoflow::Backend::Serial);

    return geoflow::cli::run_guarded([&]() -> int {
        if (derive->parsed())
            return geoflow::cli::cmd_derive(degree, parse_mask(zero_csv), g);
        if (verify->parsed())
            return geoflow::cli::cmd_verify(fields_dir, degree, parse_mask(zero_csv), g);
        if (evolve->parsed()) return geoflow::cli::cmd_evolve(config_path, g);
        if (invariants->parsed())
            return geoflow::cli::cmd_invariants(snapshot_csv, degree, !non_periodic, g);
        if (reconstruct->parsed())
            return geoflow::cli::cmd_reconstruct(series_dir, index, g);
        if (geodesic->parsed())
            return geoflow::cli::cmd_geodesic(g12_csv, poly_json, initial_csv, t_end, dt, g);
        if (pipeline->parsed()) return geoflow::cli::cmd_pipeline(config_path, g);
        return geoflow::cli::kExitInput;
    });
}
