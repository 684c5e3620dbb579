#include "doctest.h"

#include "qsim/harness.hpp"
#include "qsim/rng.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

using namespace qsim;

namespace {

std::vector<double> seeded_job_values(std::uint32_t rep) {
    PhiloxEngine eng(314, rep, StreamRole::Misc);
    double u = eng.uniform01();
    return {u, u * u};
}

}  // namespace

TEST_CASE("ensemble runs are identical for any worker count") {
    const std::vector<double> grid{0.0, 1.0};
    EnsembleStats one = run_ensemble(grid, 1000, 1, seeded_job_values);
    EnsembleStats four = run_ensemble(grid, 1000, 4, seeded_job_values);

    CHECK(one.count() == 1000);
    CHECK(four.count() == 1000);
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        CHECK(one.mean(gi) == four.mean(gi));
        CHECK(one.variance(gi) == four.variance(gi));
        CHECK(one.retained(gi) == four.retained(gi));
    }
}

TEST_CASE("a worker exception surfaces to the caller") {
    const std::vector<double> grid{0.0};
    auto job = [](std::uint32_t rep) -> std::vector<double> {
        if (rep == 500) throw std::runtime_error("boom");
        return {0.0};
    };
    CHECK_THROWS_AS((void)run_ensemble(grid, 1000, 4, job), std::runtime_error);
}

TEST_CASE("verdict lines are canonical json without wall-clock noise") {
    Verdict v;
    v.experiment = "e";
    v.theorem = "t";
    v.check = "c";
    v.statistic = 0.25;
    v.threshold = 0.5;
    v.pass = true;
    v.seed = 7;
    v.runtime_s = 9.75;  // reported in summary.csv only
    CHECK(verdict_jsonl_line(v) ==
          R"({"check":"c","experiment":"e","pass":true,"seed":7,"statistic":0.25,)"
          R"("theorem":"t","threshold":0.5})");

    Diagnostic d;
    d.test = "x";
    d.t = 0.25;
    d.statistic = 1.5;
    d.se = 0.5;
    d.pass = false;
    CHECK(diagnostic_jsonl_line(d) ==
          R"({"pass":false,"se":0.5,"statistic":1.5,"t":0.25,"test":"x"})");
}

TEST_CASE("experiments are addressable by name") {
    const auto& names = experiment_names();
    CHECK(names.size() == 9);
    for (const auto& n : names) CHECK(is_experiment(n));
    CHECK(is_experiment("fluid"));
    CHECK_FALSE(is_experiment("not_a_thing"));
    CHECK_THROWS_AS((void)run_experiment("not_a_thing", 1, 1), std::invalid_argument);
}

TEST_CASE("running one experiment stamps seed, name, and wall time") {
    ExperimentResult res = run_experiment("poisson_clt", 42, 1);
    REQUIRE(!res.verdicts.empty());
    for (const Verdict& v : res.verdicts) {
        CHECK(v.experiment == "poisson_clt");
        CHECK(v.seed == 42);
        CHECK(v.runtime_s > 0.0);
        CHECK(v.pass);
    }
}
