// Exact algebra on cadlag piecewise-constant paths: evaluation, integrals,
// jumps, quadratic variation, and the one-sided reflection map.
#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <vector>

namespace qsim {

// Right-continuous step function on [0, horizon]: value initial() on
// [0, epoch(0)), value_after(i) on [epoch(i), epoch(i+1)).
// Invariants: epochs strictly increasing, all in (0, horizon]; finitely many.
// Immutable after construction; safe to share across threads.
class StepPath {
public:
    StepPath() : initial_(0.0), horizon_(0.0) {}
    StepPath(double initial, double horizon);
    StepPath(double initial, double horizon,
             std::vector<double> epochs, std::vector<double> values);

    double initial() const { return initial_; }
    double horizon() const { return horizon_; }
    std::size_t jump_count() const { return epochs_.size(); }
    double epoch(std::size_t i) const { return epochs_[i]; }
    double value_after(std::size_t i) const { return values_[i]; }
    double value_before(std::size_t i) const { return i == 0 ? initial_ : values_[i - 1]; }
    double jump_size(std::size_t i) const { return values_[i] - value_before(i); }
    const std::vector<double>& epochs() const { return epochs_; }
    const std::vector<double>& values() const { return values_; }
    double final_value() const { return epochs_.empty() ? initial_ : values_.back(); }

    // value at t, right-continuous; t outside [0, horizon] is a domain error
    double eval(double t) const;
    // left limit at t; at t = 0 returns the initial value
    double left_limit(double t) const;

private:
    double initial_;
    double horizon_;
    std::vector<double> epochs_;
    std::vector<double> values_;
};

// Continuous piecewise-linear path on [0, horizon]: knots with values,
// linear in between.  Holds compensators and time-change clocks, which are
// integrals of step paths and therefore exactly piecewise linear.
class LinearPath {
public:
    LinearPath() : horizon_(0.0) {}
    // knots must start at 0, be strictly increasing, and end at the horizon
    LinearPath(std::vector<double> knots, std::vector<double> values);

    double horizon() const { return horizon_; }
    const std::vector<double>& knots() const { return knots_; }
    const std::vector<double>& values() const { return values_; }
    double eval(double t) const;
    double final_value() const { return values_.back(); }

private:
    double horizon_;
    std::vector<double> knots_;
    std::vector<double> values_;
};

// Output of the reflection map: content stays at or below the barrier, the
// regulator is nondecreasing and increases only while content sits at it.
struct Regulated {
    StepPath content;
    StepPath regulator;
};

// Exact Lebesgue integral of p over [a, b] (sum of value times sojourn).
double time_integral(const StepPath& p, double a, double b);

// Cumulative integral scale * int_0^t f(p(s)) ds as a piecewise-linear path.
// f defaults to identity; pass e.g. [n](double q){ return std::min(q, n); }.
LinearPath integral_path(const StepPath& p, double scale = 1.0,
                         const std::function<double(double)>& f = nullptr);

// Stieltjes integral t -> sum_{jumps s<=t of g} f(s-) * dg(s), with the
// integrand evaluated at left limits (predictable version).  g must be
// nondecreasing; violations are contract errors.
StepPath stieltjes_integral(const StepPath& f_left, const StepPath& g);

// sup over 0 < t <= T of |p(t) - p(t-)|; zero for jump-free paths
double max_jump(const StepPath& p, double T);

// t -> sum_{s<=t} dp(s) * dq(s): the optional (square-bracket) covariation of
// pure-jump paths.  optional_qv(p, p) is the sum of squared jumps.
StepPath optional_qv(const StepPath& p, const StepPath& q);

// One-sided reflection at an upper barrier: u(t) = sup_{s<=t} (y(s)-kappa)^+,
// x = y - u.  If y(0) > kappa the initial excess is moved into u(0).
Regulated reflect_upper(const StepPath& y, double kappa);

// pointwise combinations; epochs of the result are unions of input epochs
StepPath affine(const StepPath& p, double scale, double shift);
StepPath transform(const StepPath& p, const std::function<double(double)>& f);
StepPath add(const StepPath& p, const StepPath& q);
StepPath subtract(const StepPath& p, const StepPath& q);

// serialization for plotting: CSV rows "t,value" and JSON lines {"t":..,"v":..}
void write_csv(const StepPath& p, std::ostream& os);
void write_jsonl(const StepPath& p, std::ostream& os);
void write_csv(const LinearPath& p, std::ostream& os);

}  // namespace qsim
