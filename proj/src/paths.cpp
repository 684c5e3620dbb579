#include "qsim/paths.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace qsim {

namespace {

// Neumaier compensated accumulator; keeps long event sums exact enough for
// the 1e-9 * scale identity tolerances.
struct KahanSum {
    double s = 0.0;
    double c = 0.0;
    void add(double x) {
        double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    double value() const { return s + c; }
};

void format_number(char* buf, std::size_t len, double v) {
    std::snprintf(buf, len, "%.17g", v);
}

}  // namespace

StepPath::StepPath(double initial, double horizon)
    : initial_(initial), horizon_(horizon) {
    if (!(horizon >= 0.0)) throw std::invalid_argument("StepPath: horizon must be >= 0");
}

StepPath::StepPath(double initial, double horizon,
                   std::vector<double> epochs, std::vector<double> values)
    : initial_(initial), horizon_(horizon),
      epochs_(std::move(epochs)), values_(std::move(values)) {
    if (!(horizon >= 0.0)) throw std::invalid_argument("StepPath: horizon must be >= 0");
    if (epochs_.size() != values_.size())
        throw std::invalid_argument("StepPath: epochs/values size mismatch");
    double prev = 0.0;
    for (double t : epochs_) {
        if (!(t > prev)) throw std::invalid_argument("StepPath: epochs must be strictly increasing and > 0");
        prev = t;
    }
    if (!epochs_.empty() && epochs_.back() > horizon_)
        throw std::invalid_argument("StepPath: epoch beyond horizon");
}

double StepPath::eval(double t) const {
    if (!(t >= 0.0) || t > horizon_)
        throw std::domain_error("StepPath::eval: t outside [0, horizon]");
    // first epoch > t
    auto it = std::upper_bound(epochs_.begin(), epochs_.end(), t);
    if (it == epochs_.begin()) return initial_;
    return values_[static_cast<std::size_t>(it - epochs_.begin()) - 1];
}

double StepPath::left_limit(double t) const {
    if (!(t >= 0.0) || t > horizon_)
        throw std::domain_error("StepPath::left_limit: t outside [0, horizon]");
    if (t == 0.0) return initial_;  // convention: value at 0- equals value at 0
    // first epoch >= t; the value just before t is the one after the last epoch < t
    auto it = std::lower_bound(epochs_.begin(), epochs_.end(), t);
    if (it == epochs_.begin()) return initial_;
    return values_[static_cast<std::size_t>(it - epochs_.begin()) - 1];
}

LinearPath::LinearPath(std::vector<double> knots, std::vector<double> values)
    : knots_(std::move(knots)), values_(std::move(values)) {
    if (knots_.size() < 2 || knots_.size() != values_.size())
        throw std::invalid_argument("LinearPath: need matching knots/values, at least two");
    if (knots_.front() != 0.0)
        throw std::invalid_argument("LinearPath: first knot must be 0");
    for (std::size_t i = 1; i < knots_.size(); ++i)
        if (!(knots_[i] > knots_[i - 1]))
            throw std::invalid_argument("LinearPath: knots must be strictly increasing");
    horizon_ = knots_.back();
}

double LinearPath::eval(double t) const {
    if (!(t >= 0.0) || t > horizon_)
        throw std::domain_error("LinearPath::eval: t outside [0, horizon]");
    auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
    if (it == knots_.end()) return values_.back();
    std::size_t i = static_cast<std::size_t>(it - knots_.begin());
    if (i == 0) return values_.front();
    double t0 = knots_[i - 1], t1 = knots_[i];
    double w = (t - t0) / (t1 - t0);
    return values_[i - 1] + w * (values_[i] - values_[i - 1]);
}

double time_integral(const StepPath& p, double a, double b) {
    if (!(a >= 0.0) || !(b >= a) || b > p.horizon())
        throw std::domain_error("time_integral: need 0 <= a <= b <= horizon");
    KahanSum acc;
    double seg_start = 0.0;
    double seg_value = p.initial();
    for (std::size_t i = 0; i <= p.jump_count(); ++i) {
        double seg_end = (i < p.jump_count()) ? p.epoch(i) : p.horizon();
        double lo = std::max(a, seg_start);
        double hi = std::min(b, seg_end);
        if (hi > lo) acc.add(seg_value * (hi - lo));
        if (seg_end >= b) break;
        if (i < p.jump_count()) {
            seg_start = p.epoch(i);
            seg_value = p.value_after(i);
        }
    }
    return acc.value();
}

LinearPath integral_path(const StepPath& p, double scale,
                         const std::function<double(double)>& f) {
    std::vector<double> knots;
    std::vector<double> values;
    knots.reserve(p.jump_count() + 2);
    values.reserve(p.jump_count() + 2);
    knots.push_back(0.0);
    values.push_back(0.0);
    KahanSum acc;
    double seg_start = 0.0;
    double seg_value = f ? f(p.initial()) : p.initial();
    for (std::size_t i = 0; i <= p.jump_count(); ++i) {
        double seg_end = (i < p.jump_count()) ? p.epoch(i) : p.horizon();
        if (seg_end > seg_start) {
            acc.add(scale * seg_value * (seg_end - seg_start));
            knots.push_back(seg_end);
            values.push_back(acc.value());
        }
        if (i < p.jump_count()) {
            seg_start = p.epoch(i);
            seg_value = f ? f(p.value_after(i)) : p.value_after(i);
        }
    }
    if (knots.size() < 2) {  // zero-length path
        knots.push_back(p.horizon() > 0.0 ? p.horizon() : 1.0);
        values.push_back(acc.value());
    }
    return LinearPath(std::move(knots), std::move(values));
}

StepPath stieltjes_integral(const StepPath& f_left, const StepPath& g) {
    std::vector<double> epochs;
    std::vector<double> values;
    epochs.reserve(g.jump_count());
    values.reserve(g.jump_count());
    KahanSum acc;
    std::size_t fi = 0;  // number of f-epochs strictly before the current g epoch
    for (std::size_t j = 0; j < g.jump_count(); ++j) {
        double s = g.epoch(j);
        double dg = g.jump_size(j);
        if (dg < 0.0)
            throw std::invalid_argument("stieltjes_integral: integrator must be nondecreasing");
        while (fi < f_left.jump_count() && f_left.epoch(fi) < s) ++fi;
        double f_at_left = (fi == 0) ? f_left.initial() : f_left.value_after(fi - 1);
        acc.add(f_at_left * dg);
        epochs.push_back(s);
        values.push_back(acc.value());
    }
    return StepPath(0.0, g.horizon(), std::move(epochs), std::move(values));
}

double max_jump(const StepPath& p, double T) {
    double m = 0.0;
    for (std::size_t i = 0; i < p.jump_count() && p.epoch(i) <= T; ++i)
        m = std::max(m, std::abs(p.jump_size(i)));
    return m;
}

StepPath optional_qv(const StepPath& p, const StepPath& q) {
    std::vector<double> epochs;
    std::vector<double> values;
    KahanSum acc;
    std::size_t i = 0, j = 0;
    while (i < p.jump_count() && j < q.jump_count()) {
        if (p.epoch(i) < q.epoch(j)) {
            ++i;
        } else if (q.epoch(j) < p.epoch(i)) {
            ++j;
        } else {  // simultaneous jump: contributes to the covariation
            acc.add(p.jump_size(i) * q.jump_size(j));
            epochs.push_back(p.epoch(i));
            values.push_back(acc.value());
            ++i;
            ++j;
        }
    }
    double horizon = std::min(p.horizon(), q.horizon());
    // drop contributions past the common horizon
    while (!epochs.empty() && epochs.back() > horizon) {
        epochs.pop_back();
        values.pop_back();
    }
    return StepPath(0.0, horizon, std::move(epochs), std::move(values));
}

Regulated reflect_upper(const StepPath& y, double kappa) {
    if (kappa < 0.0) throw std::domain_error("reflect_upper: kappa must be >= 0");
    double u = std::max(0.0, y.initial() - kappa);  // initial excess goes into u(0)
    std::vector<double> content_vals, reg_vals;
    content_vals.reserve(y.jump_count());
    reg_vals.reserve(y.jump_count());
    for (std::size_t i = 0; i < y.jump_count(); ++i) {
        double excess = y.value_after(i) - kappa;
        if (excess > u) u = excess;
        content_vals.push_back(y.value_after(i) - u);
        reg_vals.push_back(u);
    }
    std::vector<double> epochs(y.epochs());
    double u0 = std::max(0.0, y.initial() - kappa);
    Regulated out;
    out.content = StepPath(y.initial() - u0, y.horizon(), epochs, std::move(content_vals));
    out.regulator = StepPath(u0, y.horizon(), std::move(epochs), std::move(reg_vals));
    return out;
}

StepPath affine(const StepPath& p, double scale, double shift) {
    std::vector<double> values(p.values());
    for (double& v : values) v = scale * v + shift;
    return StepPath(scale * p.initial() + shift, p.horizon(), p.epochs(), std::move(values));
}

StepPath transform(const StepPath& p, const std::function<double(double)>& f) {
    std::vector<double> values(p.values());
    for (double& v : values) v = f(v);
    return StepPath(f(p.initial()), p.horizon(), p.epochs(), std::move(values));
}

namespace {

StepPath merge_pointwise(const StepPath& p, const StepPath& q, double sign) {
    if (p.horizon() != q.horizon())
        throw std::invalid_argument("path combination: horizons differ");
    std::vector<double> epochs;
    std::vector<double> values;
    epochs.reserve(p.jump_count() + q.jump_count());
    values.reserve(p.jump_count() + q.jump_count());
    std::size_t i = 0, j = 0;
    double pv = p.initial(), qv = q.initial();
    while (i < p.jump_count() || j < q.jump_count()) {
        double tp = (i < p.jump_count()) ? p.epoch(i) : std::numeric_limits<double>::infinity();
        double tq = (j < q.jump_count()) ? q.epoch(j) : std::numeric_limits<double>::infinity();
        double t = std::min(tp, tq);
        if (tp == t) pv = p.value_after(i++);
        if (tq == t) qv = q.value_after(j++);
        epochs.push_back(t);
        values.push_back(pv + sign * qv);
    }
    return StepPath(p.initial() + sign * q.initial(), p.horizon(),
                    std::move(epochs), std::move(values));
}

}  // namespace

StepPath add(const StepPath& p, const StepPath& q) { return merge_pointwise(p, q, +1.0); }
StepPath subtract(const StepPath& p, const StepPath& q) { return merge_pointwise(p, q, -1.0); }

void write_csv(const StepPath& p, std::ostream& os) {
    char a[32], b[32];
    os << "t,value\n";
    format_number(a, sizeof a, 0.0);
    format_number(b, sizeof b, p.initial());
    os << a << ',' << b << '\n';
    for (std::size_t i = 0; i < p.jump_count(); ++i) {
        format_number(a, sizeof a, p.epoch(i));
        format_number(b, sizeof b, p.value_after(i));
        os << a << ',' << b << '\n';
    }
}

void write_jsonl(const StepPath& p, std::ostream& os) {
    char a[32], b[32];
    format_number(a, sizeof a, 0.0);
    format_number(b, sizeof b, p.initial());
    os << "{\"t\":" << a << ",\"v\":" << b << "}\n";
    for (std::size_t i = 0; i < p.jump_count(); ++i) {
        format_number(a, sizeof a, p.epoch(i));
        format_number(b, sizeof b, p.value_after(i));
        os << "{\"t\":" << a << ",\"v\":" << b << "}\n";
    }
}

void write_csv(const LinearPath& p, std::ostream& os) {
    char a[32], b[32];
    os << "t,value\n";
    for (std::size_t i = 0; i < p.knots().size(); ++i) {
        format_number(a, sizeof a, p.knots()[i]);
        format_number(b, sizeof b, p.values()[i]);
        os << a << ',' << b << '\n';
    }
}

}  // namespace qsim
