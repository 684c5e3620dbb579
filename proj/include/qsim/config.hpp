// JSON run configuration: parsing with field-path error messages, resolution
// of staffing shorthands into concrete rates, canonical re-serialization for
// hashing and round-trips, and collision-safe run-directory naming.
#pragma once

#include "qsim/model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qsim {

// One resolved run: a concrete model plus replication, seeding, and summary
// grid choices.  The command, worker count, and output root come from flags.
struct RunConfig {
    ModelSpec model;
    Construction construction = Construction::TimeChange;
    std::uint32_t replications = 1;
    bool has_seed = false;
    std::uint64_t seed = 0;
    std::vector<double> t_grid;  // summary grid; defaults to 21 uniform points
};

// Parses a flat JSON document {family, n, mu, theta, m_n|kappa,
// beta|lambda_n, arrival, service, horizon, replications, seed, ...}.
// Exactly one of beta/lambda_n must fix the arrival rate, and for the
// finite-room family exactly one of m_n/kappa must fix the waiting room;
// beta and kappa are resolved through the square-root staffing rule.
// Violations throw std::invalid_argument naming the offending field.
RunConfig parse_run_config(const std::string& json_text);

// Canonical JSON with sorted keys and fully concrete rates.  Round-trips:
// parse_run_config(resolved_config_json(c)) rebuilds c field-for-field.
std::string resolved_config_json(const RunConfig& c);

// FNV-1a 64-bit hash of a byte string.
std::uint64_t fnv1a64(const std::string& bytes);

// "<hash8>-<seed>": 8 hex digits of the hash of a canonical config string
// that excludes the seed, then the decimal seed, so reruns of one
// configuration at different seeds sort together.
std::string run_dir_name(const std::string& canonical_without_seed,
                         std::uint64_t seed);
std::string run_dir_name(const RunConfig& c);

// Creates <out_root>/<dir_name> and returns its path.  If the directory
// already exists, appends -r1, -r2, ... until a fresh directory is created;
// existing outputs are never overwritten.
std::string make_run_dir(const std::string& out_root, const std::string& dir_name);
std::string make_run_dir(const std::string& out_root, const RunConfig& c);

// Square-root staffing sweep: one family across a list of scales.
struct SweepConfig {
    double beta = 0.0;
    double kappa = -1.0;  // negative: no waiting-room cap
    double mu = 1.0;
    double theta = 0.0;
    std::vector<std::uint64_t> n_list;
    double T = 1.0;
    std::uint32_t replications = 1;

    bool has_room() const { return kappa >= 0.0; }
    // the concrete model at one scale, started at headcount n
    ModelSpec model_at(std::uint64_t n) const;
};

SweepConfig parse_sweep_config(const std::string& json_text);

}  // namespace qsim
