#include "doctest.h"

#include "qsim/diffusion.hpp"
#include "qsim/rng.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

using namespace qsim;

TEST_CASE("limit specifications wire the coefficients correctly") {
    DiffusionSpec is = DiffusionSpec::infinite_server(1.0);
    CHECK(is.mu == 1.0);
    CHECK(is.theta == 1.0);
    CHECK(is.diffusion == 2.0);
    CHECK(is.drift_const == 0.0);
    CHECK(is.linear());
    CHECK(is.barrier == DiffusionSpec::kNoBarrier);

    DiffusionSpec ea = DiffusionSpec::erlang_a(1.0, 1.0, 0.5);
    CHECK(ea.drift_const == -1.0);
    CHECK(ea.diffusion == 2.0);
    CHECK_FALSE(ea.linear());
    CHECK(ea.h(-2.0) == 2.0);
    CHECK(ea.h(1.0) == -0.5);
    CHECK(ea.drift(1.0) == -1.5);

    DiffusionSpec fr = DiffusionSpec::finite_room(-1.0, 1.0, 0.5, 1.0);
    CHECK(fr.drift_const == 1.0);
    CHECK(fr.barrier == 1.0);
}

TEST_CASE("closed-form moments hit the frozen oracle values") {
    DiffusionSpec spec = DiffusionSpec::infinite_server(1.0);
    CHECK(ou_mean(spec, 2.0, 1.0) == doctest::Approx(0.735758882343).epsilon(1e-10));
    CHECK(ou_var(spec, 1.0) == doctest::Approx(0.864664716763).epsilon(1e-10));
    CHECK(ou_mean(spec, 1.0, std::log(2.0)) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(ou_var(spec, std::log(2.0)) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(ou_var(spec, 40.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ou_cov(spec, 0.5, 1.0) == doctest::Approx(0.383400499565).epsilon(1e-10));
    CHECK(ou_cov(spec, 1.0, 1.0) == doctest::Approx(ou_var(spec, 1.0)).epsilon(1e-12));
}

TEST_CASE("exact transition sampling reproduces the marginal law") {
    DiffusionSpec spec = DiffusionSpec::infinite_server(1.0);
    std::vector<double> grid{0.0, 0.5, 1.0};

    PhiloxEngine a(9, 4, StreamRole::Gaussian);
    PhiloxEngine b(9, 4, StreamRole::Gaussian);
    CHECK(ou_exact_path(spec, 0.3, grid, a) == ou_exact_path(spec, 0.3, grid, b));

    const int reps = 4000;
    double sum = 0.0, sq = 0.0;
    for (int rep = 0; rep < reps; ++rep) {
        PhiloxEngine eng(9, static_cast<std::uint32_t>(rep), StreamRole::Gaussian);
        std::vector<double> path = ou_exact_path(spec, 0.0, grid, eng);
        CHECK(path[0] == 0.0);
        sum += path[2];
        sq += path[2] * path[2];
    }
    double mean = sum / reps;
    double var = sq / reps - mean * mean;
    const double target = 1.0 - std::exp(-2.0);
    CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(reps)));
    CHECK(var == doctest::Approx(target).epsilon(0.08));

    DiffusionSpec nonlinear = DiffusionSpec::erlang_a(1.0, 1.0, 0.5);
    PhiloxEngine eng(9, 0, StreamRole::Gaussian);
    CHECK_THROWS_AS((void)ou_exact_path(nonlinear, 0.0, grid, eng), std::invalid_argument);
}

TEST_CASE("euler discretization guards its stability margin and the barrier") {
    DiffusionSpec fr = DiffusionSpec::finite_room(-1.0, 1.0, 0.5, 1.0);
    PhiloxEngine eng(31, 0, StreamRole::Gaussian);

    std::vector<double> coarse{0.0, 0.6, 1.2};
    CHECK_THROWS_AS((void)euler_limit_path(fr, 0.0, coarse, eng), std::invalid_argument);
    CHECK_THROWS_AS((void)euler_limit_path(fr, 2.0, {0.0, 0.1}, eng), std::invalid_argument);

    std::vector<double> grid;
    for (int k = 0; k <= 400; ++k) grid.push_back(k / 200.0);
    for (std::uint32_t rep = 0; rep < 5; ++rep) {
        PhiloxEngine e(31, rep, StreamRole::Gaussian);
        GridRegulated g = euler_limit_path(fr, 0.0, grid, e);
        double prev = 0.0;
        for (std::size_t i = 0; i < g.content.x.size(); ++i) {
            CHECK(g.content.x[i] <= 1.0 + 1e-12);
            CHECK(g.regulator.x[i] >= prev - 1e-12);
            prev = g.regulator.x[i];
        }
    }

    DiffusionSpec free = DiffusionSpec::erlang_a(-1.0, 1.0, 0.5);
    PhiloxEngine e2(31, 7, StreamRole::Gaussian);
    GridRegulated g = euler_limit_path(free, 0.0, grid, e2);
    for (double u : g.regulator.x) CHECK(u == 0.0);
}

TEST_CASE("moment curves integrate the closure to the closed form when exact") {
    DiffusionSpec spec = DiffusionSpec::infinite_server(1.0);
    MomentCurve mc = marginal_moments(spec, 2.0, 1.0, 1e-3);
    REQUIRE(!mc.t.empty());
    CHECK(mc.t.back() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_FALSE(mc.approximate);
    CHECK(mc.mean.back() == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-8));
    CHECK(mc.var.back() == doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-8));

    MomentCurve approx = marginal_moments(DiffusionSpec::erlang_a(1.0, 1.0, 0.5), 0.0, 1.0, 1e-3);
    CHECK(approx.approximate);

    CHECK_THROWS_AS((void)marginal_moments(DiffusionSpec::finite_room(1.0, 1.0, 0.5, 1.0),
                                           0.0, 1.0, 1e-3),
                    std::invalid_argument);
}

TEST_CASE("service-noise variance formula") {
    CHECK(z4_variance(1.0, 1.0) ==
          doctest::Approx(0.5 * std::pow(1.0 - std::exp(-1.0), 2)).epsilon(1e-14));
    CHECK(z4_variance(1.0, 0.0) == 0.0);
    CHECK(z4_variance(1.0, 60.0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("four-component split adds up exactly and starts at the decayed start") {
    std::vector<double> grid;
    for (int k = 0; k <= 20; ++k) grid.push_back(k / 20.0);
    FourComponentPath p = fourth_rep_limit(1.0, 0.7, 1.0, grid, 2000, 55, 3);

    REQUIRE(p.t.size() == grid.size());
    for (std::size_t i = 0; i < p.t.size(); ++i) {
        CHECK(std::abs(p.x[i] - (p.z1[i] + p.z2[i] + p.z3[i] + p.z4[i])) <= 1e-12);
        CHECK(p.z1[i] == doctest::Approx(0.7 * std::exp(-p.t[i])).epsilon(1e-12));
    }

    FourComponentPath q = fourth_rep_limit(1.0, 0.7, 1.0, grid, 2000, 55, 3);
    CHECK(p.x == q.x);  // same seed and replication replay identically
}

TEST_CASE("noise reconstruction of a noise-free path is identically zero") {
    std::vector<double> t, x;
    for (int k = 0; k <= 10; ++k) {
        t.push_back(k / 10.0);
        x.push_back(3.0 * std::exp(-t.back()));
    }
    std::vector<double> b = reconstruct_noise(t, x, 1.0, 3.0);
    REQUIRE(b.size() == t.size());
    CHECK(b[0] == 0.0);
    for (double v : b) CHECK(std::abs(v) <= 1e-12);
}
