// Configuration-driven command handlers behind the command-line front end.
// JSON configs are schema-checked (unknown keys rejected); reports are JSON,
// field data CSV. Exit codes: 0 success, 2 input error, 3 numerical halt.

#pragma once

#include "geoflow/grid.hpp"

#include <nlohmann/json_fwd.hpp>

#include <functional>
#include <set>
#include <stdexcept>
#include <string>

namespace geoflow::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumerical = 3;

class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

struct GlobalOptions {
    std::string output_dir = ".";
    long long seed = 0;
    bool quiet = false;
};

// Rejects keys not in `allowed`.
void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                const std::string& where);

// Runs a handler and maps exceptions to the exit-code contract:
// config/domain/argument errors -> 2, numerical halts -> 3.
int run_guarded(const std::function<int()>& fn);

// Field construction from a config entry: {"const": v} | {"values": [...]} |
// {"file": "values.txt"} | {"sine": {"mean","amp","mode","phase"}}.
ScalarField1D field_from_spec(const nlohmann::json& spec, int nx, double dx, double x0,
                              bool periodic, const std::string& base_dir);

int cmd_derive(int degree, const std::set<int>& zero_mask, const GlobalOptions& g);
int cmd_verify(const std::string& fields_dir, int degree, const std::set<int>& zero_mask,
               const GlobalOptions& g);
int cmd_evolve(const std::string& config_path, const GlobalOptions& g);
int cmd_invariants(const std::string& snapshot_csv, int degree, bool periodic,
                   const GlobalOptions& g);
int cmd_reconstruct(const std::string& series_dir, int index, const GlobalOptions& g);
int cmd_geodesic(const std::string& g12_csv, const std::string& poly_json,
                 const std::string& initial_csv, double t_end, double dt,
                 const GlobalOptions& g);
int cmd_pipeline(const std::string& config_path, const GlobalOptions& g);

} // namespace geoflow::cli
