// Replication driver and the verification suite: each experiment simulates
// at pinned parameters, compares against the corresponding limit law, and
// returns machine-checkable verdicts plus per-statistic diagnostic rows.
#pragma once

#include "qsim/stats.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace qsim {

// Runs replications 0..replications-1 of `job` across `workers` threads and
// merges the per-replication values in replication order, so the result is
// identical for any worker count.  Each job returns one value per grid point.
EnsembleStats run_ensemble(
    const std::vector<double>& t_grid, std::uint32_t replications,
    unsigned workers,
    const std::function<std::vector<double>(std::uint32_t)>& job);

struct Verdict {
    std::string experiment;
    std::string theorem;  // which limit statement the check exercises
    std::string check;    // sub-check identifier, unique within an experiment
    double statistic = 0.0;
    double threshold = 0.0;
    bool pass = false;
    std::uint64_t seed = 0;
    // wall time of the producing experiment; reported in summary.csv only so
    // that verdict files are byte-identical across reruns
    double runtime_s = 0.0;
};

struct Diagnostic {
    std::string test;
    double t = 0.0;
    double statistic = 0.0;
    double se = 0.0;  // standard error where meaningful, else 0
    bool pass = true;
};

struct ExperimentResult {
    std::vector<Verdict> verdicts;
    std::vector<Diagnostic> diagnostics;
};

const std::vector<std::string>& experiment_names();
bool is_experiment(const std::string& name);

ExperimentResult verify_poisson_clt(std::uint64_t seed, unsigned workers);
ExperimentResult verify_mminf_fclt(std::uint64_t seed, unsigned workers);
ExperimentResult verify_fluid(std::uint64_t seed, unsigned workers);
ExperimentResult verify_martingale_suite(std::uint64_t seed, unsigned workers);
ExperimentResult verify_erlang_a(std::uint64_t seed, unsigned workers);
ExperimentResult verify_finite_room(std::uint64_t seed, unsigned workers);
ExperimentResult verify_general_arrival(std::uint64_t seed, unsigned workers);
ExperimentResult verify_fourth_rep(std::uint64_t seed, unsigned workers);
ExperimentResult verify_maps_convergence(std::uint64_t seed, unsigned workers);

// dispatch by name; stamps experiment, seed, and wall time on every verdict
ExperimentResult run_experiment(const std::string& name, std::uint64_t seed,
                                unsigned workers);

// one JSON object per line, keys sorted, no trailing spaces
std::string verdict_jsonl_line(const Verdict& v);
std::string diagnostic_jsonl_line(const Diagnostic& d);

}  // namespace qsim
