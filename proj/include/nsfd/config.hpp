#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsfd/solver.hpp"

namespace nsfd {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One run of the tool: command, problem selection, meshes, scheme and
/// solver settings, output location. JSON keys match the field names.
struct RunConfig {
    std::string command = "verify"; ///< solve | convergence | verify | dump-grid
    std::string problem = "linear1";
    std::vector<int> sides = {6, 12, 24, 48}; ///< nodes per side, boundary included
    double gamma = 0;
    double sigma = 0;
    std::vector<ContinuationStage> schedule = {{1000, 0}, {100, 0}, {10, 0}, {1, 0}, {0, 0}};
    std::string method = "newton"; ///< linear_direct | newton | pseudo_time
    double newton_tol = 1e-10;
    int newton_max_iter = 100;
    std::string damping = "backtracking"; ///< none | backtracking
    double rho = 0;
    int max_sweeps = 200000;
    int phi_count = 16;
    int rot_count = 32;
    std::string order_basis = "diag"; ///< axis | diag
    std::string out_dir = ".";
    std::uint64_t seed = 42;
    int workers = 1;
    bool allow_unsafe = false;

    bool operator==(const RunConfig&) const = default;
};

/// Parses JSON text; unknown keys and wrong value types are rejected.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

/// JSON array of [gamma, sigma] pairs
std::vector<ContinuationStage> parse_schedule_json(const std::string& text);

std::string serialize(const RunConfig& cfg);

/// Throws ConfigError naming every offending key.
void validate(const RunConfig& cfg);

} // namespace nsfd
