#include "doctest.h"

#include "qsim/paths.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace qsim;

TEST_CASE("step path evaluation is right-continuous with left limits") {
    StepPath p(1.0, 2.0, {0.5, 1.5}, {3.0, 2.0});

    CHECK(p.initial() == 1.0);
    CHECK(p.horizon() == 2.0);
    CHECK(p.jump_count() == 2);
    CHECK(p.eval(0.0) == 1.0);
    CHECK(p.eval(0.4999) == 1.0);
    CHECK(p.eval(0.5) == 3.0);
    CHECK(p.left_limit(0.5) == 1.0);
    CHECK(p.eval(1.4) == 3.0);
    CHECK(p.eval(1.5) == 2.0);
    CHECK(p.left_limit(1.5) == 3.0);
    CHECK(p.left_limit(0.0) == 1.0);
    CHECK(p.eval(2.0) == 2.0);
    CHECK(p.final_value() == 2.0);
    CHECK(p.jump_size(0) == 2.0);
    CHECK(p.jump_size(1) == -1.0);
    CHECK(p.value_before(0) == 1.0);
    CHECK(p.value_before(1) == 3.0);
    CHECK_THROWS_AS((void)p.eval(2.5), std::domain_error);
    CHECK_THROWS_AS((void)p.eval(-0.1), std::domain_error);
}

TEST_CASE("step path constructor rejects malformed epoch sequences") {
    CHECK_THROWS_AS(StepPath(0.0, 1.0, {0.5, 0.5}, {1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(StepPath(0.0, 1.0, {0.5, 0.2}, {1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(StepPath(0.0, 1.0, {1.5}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(StepPath(0.0, 1.0, {0.5}, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("time integral sums value times sojourn exactly") {
    StepPath p(1.0, 2.0, {0.5, 1.5}, {3.0, 2.0});

    CHECK(time_integral(p, 0.0, 2.0) == doctest::Approx(4.5).epsilon(1e-15));
    CHECK(time_integral(p, 0.25, 0.75) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(time_integral(p, 0.5, 0.5) == 0.0);
    CHECK_THROWS_AS((void)time_integral(p, 1.0, 0.5), std::domain_error);
}

TEST_CASE("integral path accumulates scaled transformed content") {
    StepPath p(1.0, 2.0, {0.5, 1.5}, {3.0, 2.0});

    LinearPath ip = integral_path(p);
    CHECK(ip.eval(0.0) == 0.0);
    CHECK(ip.eval(0.5) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(ip.eval(2.0) == doctest::Approx(4.5).epsilon(1e-15));
    CHECK(ip.final_value() == doctest::Approx(4.5).epsilon(1e-15));

    LinearPath scaled = integral_path(p, 2.0);
    CHECK(scaled.eval(2.0) == doctest::Approx(9.0).epsilon(1e-15));

    LinearPath capped = integral_path(p, 1.0, [](double q) { return q < 2.0 ? q : 2.0; });
    CHECK(capped.eval(2.0) == doctest::Approx(0.5 * 1.0 + 1.0 * 2.0 + 0.5 * 2.0).epsilon(1e-15));
}

TEST_CASE("stieltjes integral uses the left limit of the integrand") {
    StepPath f(1.0, 2.0, {0.5, 1.5}, {3.0, 2.0});
    StepPath g(0.0, 2.0, {0.5, 1.5}, {1.0, 2.0});

    StepPath s = stieltjes_integral(f, g);
    // jump of g at 0.5 weighs f(0.5-) = 1, jump at 1.5 weighs f(1.5-) = 3
    CHECK(s.eval(0.4) == 0.0);
    CHECK(s.eval(0.5) == 1.0);
    CHECK(s.eval(1.5) == 4.0);
    CHECK(s.final_value() == 4.0);

    StepPath bad(0.0, 2.0, {0.5, 1.5}, {1.0, 0.5});
    CHECK_THROWS_AS((void)stieltjes_integral(f, bad), std::invalid_argument);
}

TEST_CASE("max jump scans jumps up to the cutoff") {
    StepPath p(1.0, 2.0, {0.5, 1.5}, {3.0, 2.0});
    CHECK(max_jump(p, 2.0) == 2.0);
    CHECK(max_jump(p, 1.0) == 2.0);
    CHECK(max_jump(p, 0.4) == 0.0);
    CHECK(max_jump(StepPath(5.0, 1.0), 1.0) == 0.0);
}

TEST_CASE("optional covariation of a unit-jump counter reproduces the counter") {
    StepPath c(0.0, 1.0, {0.3, 0.6, 0.9}, {1.0, 2.0, 3.0});
    StepPath qv = optional_qv(c, c);
    CHECK(qv.jump_count() == c.jump_count());
    for (std::size_t i = 0; i < c.jump_count(); ++i) {
        CHECK(qv.epoch(i) == c.epoch(i));
        CHECK(qv.value_after(i) == c.value_after(i));
    }

    StepPath p(1.0, 1.0, {0.3, 0.9}, {3.0, 2.0});  // jumps +2, -1
    StepPath qp = optional_qv(p, p);
    CHECK(qp.eval(0.3) == 4.0);
    CHECK(qp.final_value() == 5.0);
}

TEST_CASE("optional covariation vanishes without simultaneous jumps") {
    StepPath a(0.0, 1.0, {0.25, 0.75}, {1.0, 2.0});
    StepPath b(0.0, 1.0, {0.5}, {1.0});
    StepPath qv = optional_qv(a, b);
    CHECK(qv.initial() == 0.0);
    CHECK(qv.final_value() == 0.0);
    for (double v : qv.values()) CHECK(v == 0.0);

    StepPath c(0.0, 1.0, {0.25}, {5.0});  // shares the epoch 0.25 with a
    CHECK(optional_qv(a, c).final_value() == 5.0);
}

TEST_CASE("upper reflection keeps content at or below the barrier") {
    StepPath y(0.0, 1.0, {0.2, 0.4, 0.6}, {2.0, 1.0, 3.0});
    Regulated r = reflect_upper(y, 1.5);

    CHECK(r.content.initial() == 0.0);
    CHECK(r.content.eval(0.2) == 1.5);
    CHECK(r.content.eval(0.4) == 0.5);
    CHECK(r.content.eval(0.6) == 1.5);
    CHECK(r.regulator.eval(0.2) == 0.5);
    CHECK(r.regulator.eval(0.4) == 0.5);
    CHECK(r.regulator.eval(0.6) == 1.5);

    // the regulator only grows while the content sits at the barrier
    double prev = r.regulator.initial();
    for (std::size_t i = 0; i < r.regulator.jump_count(); ++i) {
        double inc = r.regulator.value_after(i) - prev;
        CHECK(inc >= 0.0);
        if (inc > 0.0) CHECK(r.content.eval(r.regulator.epoch(i)) == 1.5);
        prev = r.regulator.value_after(i);
    }
}

TEST_CASE("upper reflection moves an initial excess into the regulator") {
    StepPath y(2.0, 1.0, {0.5}, {0.5});
    Regulated r = reflect_upper(y, 1.0);
    CHECK(r.content.initial() == 1.0);
    CHECK(r.regulator.initial() == 1.0);
    CHECK(r.content.eval(0.5) == 0.5 - 1.0);
    CHECK_THROWS_AS((void)reflect_upper(y, -0.5), std::domain_error);
}

TEST_CASE("pointwise path combinations agree with evaluation") {
    StepPath p(1.0, 2.0, {0.5, 1.5}, {3.0, 2.0});
    StepPath q(0.0, 2.0, {0.25, 1.5}, {1.0, -1.0});

    StepPath s = add(p, q);
    StepPath d = subtract(p, q);
    StepPath a = affine(p, 2.0, -1.0);
    StepPath f = transform(p, [](double v) { return v * v; });
    for (double t : {0.0, 0.25, 0.3, 0.5, 1.0, 1.5, 1.7, 2.0}) {
        CHECK(s.eval(t) == p.eval(t) + q.eval(t));
        CHECK(d.eval(t) == p.eval(t) - q.eval(t));
        CHECK(a.eval(t) == 2.0 * p.eval(t) - 1.0);
        CHECK(f.eval(t) == p.eval(t) * p.eval(t));
    }
    StepPath other_horizon(0.0, 1.0);
    CHECK_THROWS_AS((void)add(p, other_horizon), std::invalid_argument);
}

TEST_CASE("linear path interpolates between knots") {
    LinearPath lp({0.0, 1.0, 2.0}, {0.0, 2.0, 1.0});
    CHECK(lp.eval(0.5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(lp.eval(1.5) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(lp.eval(2.0) == 1.0);
    CHECK(lp.final_value() == 1.0);
    CHECK_THROWS_AS(LinearPath({0.5, 1.0}, {0.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(LinearPath({0.0, 1.0, 1.0}, {0.0, 1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS((void)lp.eval(2.5), std::domain_error);
}
