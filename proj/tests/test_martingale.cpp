#include "doctest.h"

#include "qsim/martingale.hpp"
#include "qsim/model.hpp"
#include "qsim/scaling.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

using namespace qsim;

namespace {

QueueRealization sample_realization(Construction c = Construction::TimeChange,
                                    std::uint32_t rep = 0) {
    ModelSpec spec = ModelSpec::erlang_a(25, 1.0, 0.5, qed_arrival_rate(25, 1.0, 1.0),
                                         InitialLaw::fixed(30), 2.0);
    return simulate(spec, c, 77, rep);
}

}  // namespace

TEST_CASE("split form keeps counting part, compensator, and scale separate") {
    QueueRealization r = sample_realization();
    MartingaleBundle b = decompose(r);

    CHECK(b.n == 25);
    CHECK(b.scale == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(b.arrival.counting.final_value() == r.A.final_value());
    CHECK(b.arrival.compensator.final_value() ==
          doctest::Approx(r.spec.lambda_n * 2.0).epsilon(1e-12));
    CHECK(b.arrival.eval(2.0) ==
          doctest::Approx(0.2 * (r.A.final_value() - r.spec.lambda_n * 2.0)).epsilon(1e-12));
    CHECK(b.blocked_scaled.final_value() == 0.0);  // no waiting-room cap here
}

TEST_CASE("predictable and optional quadratic variations agree with the algebra") {
    QueueRealization r = sample_realization();
    MartingaleBundle b = decompose(r);

    // continuous compensator and unit jumps: pqv is the rescaled compensator
    LinearPath pqv = b.service.pqv();
    CHECK(pqv.final_value() ==
          doctest::Approx(0.04 * b.service.compensator.final_value()).epsilon(1e-12));

    // optional variation of a unit-jump counter equals the rescaled count
    StepPath oqv = b.service.oqv();
    CHECK(oqv.final_value() ==
          doctest::Approx(0.04 * b.service.counting.final_value()).epsilon(1e-12));
    CHECK(oqv.jump_count() == b.service.counting.jump_count());
}

TEST_CASE("the scaled headcount satisfies its pathwise drift identity") {
    for (std::uint32_t rep = 0; rep < 5; ++rep) {
        QueueRealization r = sample_realization(Construction::TimeChange, rep);
        MartingaleBundle b = decompose(r);
        StateIdentity id = scaled_state_identity(r, b);
        double scale = 1.0;
        for (double v : id.x.values()) scale = std::max(scale, std::abs(v));
        CHECK(id.max_residual <= 1e-9 * scale);
        CHECK(id.drift_const ==
              doctest::Approx((r.spec.lambda_n - 25.0) / 5.0).epsilon(1e-12));
    }
}

TEST_CASE("event streams never jump together, so covariations vanish") {
    QueueRealization r = sample_realization();
    MartingaleBundle b = decompose(r);

    for (auto [p, q] : {std::pair{&b.arrival, &b.service},
                        std::pair{&b.arrival, &b.abandon},
                        std::pair{&b.service, &b.abandon}}) {
        StepPath cov = optional_covariation(*p, *q);
        CHECK(cov.final_value() == 0.0);
        for (double v : cov.values()) CHECK(v == 0.0);
    }
}

TEST_CASE("pathwise supremum dominates any grid scan") {
    QueueRealization r = sample_realization();
    MartingaleBundle b = decompose(r);

    double grid_max = 0.0;
    for (int k = 0; k <= 2000; ++k)
        grid_max = std::max(grid_max, std::abs(b.arrival.eval(2.0 * k / 2000.0)));
    double exact = sup_abs(b.arrival, 2.0);
    CHECK(exact >= grid_max);
    // a few jumps plus compensator drift can hide between grid points
    CHECK(exact <= grid_max + 3.0 * b.scale + 0.01);

    CHECK(max_jump_scaled(b.arrival, 2.0) == doctest::Approx(b.scale).epsilon(1e-15));
}

TEST_CASE("grid evaluation matches pointwise evaluation") {
    QueueRealization r = sample_realization();
    MartingaleBundle b = decompose(r);
    std::vector<double> grid{0.0, 0.4, 0.8, 1.2, 1.6, 2.0};
    std::vector<double> vals = eval_on_grid(b.abandon, grid);
    REQUIRE(vals.size() == grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(vals[i] == doctest::Approx(b.abandon.eval(grid[i])).epsilon(1e-15));
}

TEST_CASE("an inflated compensator is visibly not a martingale") {
    QueueRealization r = sample_realization();
    MartingaleBundle b = decompose(r);
    MartingalePath faulted = with_compensator_scaled(b.arrival, 1.1);

    CHECK(faulted.eval(2.0) ==
          doctest::Approx(b.arrival.eval(2.0) -
                          0.2 * 0.1 * b.arrival.compensator.final_value())
              .epsilon(1e-9));
    CHECK(faulted.pqv().final_value() ==
          doctest::Approx(1.1 * b.arrival.pqv().final_value()).epsilon(1e-12));
}

TEST_CASE("discrete-compensator variation subtracts the squared jumps") {
    StepPath comp(0.0, 2.0, {1.0, 2.0}, {0.5, 1.0});
    StepPath pqv = predictable_qv_discrete(comp);
    CHECK(pqv.eval(1.0) == doctest::Approx(0.5 - 0.25).epsilon(1e-15));
    CHECK(pqv.final_value() == doctest::Approx(1.0 - 0.5).epsilon(1e-15));
}

TEST_CASE("state drift fields") {
    ModelSpec is = ModelSpec::infinite_server(100, 2.0, 200.0, InitialLaw::fixed(100), 1.0);
    DriftFn h_is = state_drift(is);
    CHECK(h_is(1.5) == doctest::Approx(-3.0).epsilon(1e-15));
    CHECK(h_is(-1.5) == doctest::Approx(3.0).epsilon(1e-15));

    ModelSpec ea = ModelSpec::erlang_a(100, 1.0, 0.5, 90.0, InitialLaw::fixed(100), 1.0);
    DriftFn h_ea = state_drift(ea);
    CHECK(h_ea(-1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(h_ea(2.0) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(h_ea(0.0) == 0.0);
}
