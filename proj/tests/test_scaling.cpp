#include "doctest.h"

#include "qsim/model.hpp"
#include "qsim/scaling.hpp"

#include <cmath>
#include <stdexcept>

using namespace qsim;

TEST_CASE("square-root staffing arrival rate is exact") {
    CHECK(qed_arrival_rate(400, 1.0, 1.0) == 380.0);
    CHECK(qed_arrival_rate(100, 1.0, 1.0) == 90.0);
    CHECK(qed_arrival_rate(100, 2.0, 0.5) == 190.0);
    CHECK(qed_arrival_rate(100, 1.0, -1.0) == 110.0);
    CHECK_THROWS_AS((void)qed_arrival_rate(4, 1.0, 3.0), std::domain_error);
    CHECK_THROWS_AS((void)qed_arrival_rate(0, 1.0, 0.0), std::domain_error);
}

TEST_CASE("waiting-room size rounds the scaled room") {
    CHECK(qed_room_size(400, 1.0) == 20);
    CHECK(qed_room_size(400, 0.0) == 0);
    CHECK(qed_room_size(2, 1.0) == 1);   // round(1.414)
    CHECK(qed_room_size(9, 0.5) == 2);   // round(1.5), half away from zero
    CHECK_THROWS_AS((void)qed_room_size(4, -0.1), std::domain_error);
}

TEST_CASE("diffusion and fluid scalings are exact path algebra") {
    StepPath Q(400.0, 1.0, {0.25, 0.5}, {420.0, 390.0});

    StepPath x = clt_scale(Q, 400);
    CHECK(x.initial() == 0.0);
    CHECK(x.eval(0.25) == 1.0);
    CHECK(x.eval(0.5) == -0.5);
    CHECK(x.epochs() == Q.epochs());

    StepPath f = fluid_scale(Q, 400);
    CHECK(f.initial() == 1.0);
    CHECK(f.eval(0.25) == 1.05);
    CHECK(f.eval(0.5) == 0.975);

    auto centering = [](double) { return 1.0; };
    auto grid_vals = clt_scale_on_grid(Q, 400, centering, {0.0, 0.25, 0.75});
    CHECK(grid_vals.size() == 3);
    CHECK(grid_vals[0] == 0.0);
    CHECK(grid_vals[1] == 1.0);
    CHECK(grid_vals[2] == -0.5);
}

TEST_CASE("initial-state truncation caps at twice the scale and is idempotent") {
    CHECK(truncate_initial(900, 400) == 800);
    CHECK(truncate_initial(100, 400) == 100);
    CHECK(truncate_initial(800, 400) == 800);
    CHECK(truncate_initial(truncate_initial(900, 400), 400) == 800);
}

TEST_CASE("fluid-scaled clocks match the unscaled cumulative intensities") {
    ModelSpec spec = ModelSpec::erlang_a(25, 1.0, 0.5, qed_arrival_rate(25, 1.0, 1.0),
                                         InitialLaw::fixed(30), 2.0);
    QueueRealization r = simulate(spec, Construction::TimeChange, 7, 0);
    Compensators comp = compensators(r);
    TimeChangeClocks clocks = time_change_clocks(r);

    const double n = 25.0;
    CHECK(clocks.phi_A.final_value() * n ==
          doctest::Approx(comp.arrival.final_value()).epsilon(1e-12));
    CHECK(clocks.phi_S.final_value() * n ==
          doctest::Approx(comp.service.final_value()).epsilon(1e-12));
    CHECK(clocks.phi_R.final_value() * n ==
          doctest::Approx(comp.abandon.final_value()).epsilon(1e-12));
    CHECK(clocks.phi_A.eval(1.0) == doctest::Approx(spec.lambda_n / n).epsilon(1e-12));
}
