#include "qsim/martingale.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qsim {

double MartingalePath::eval(double t) const {
    return scale * (counting.eval(t) - compensator.eval(t));
}

double MartingalePath::left_limit_at(double t) const {
    return scale * (counting.left_limit(t) - compensator.eval(t));
}

LinearPath MartingalePath::pqv() const {
    std::vector<double> vals = compensator.values();
    for (double& v : vals) v *= scale * scale;
    return LinearPath(compensator.knots(), std::move(vals));
}

StepPath MartingalePath::oqv() const {
    return affine(optional_qv(counting, counting), scale * scale, 0.0);
}

MartingaleBundle decompose(const QueueRealization& r) {
    Compensators c = compensators(r);
    MartingaleBundle b;
    b.n = r.spec.n;
    b.scale = 1.0 / std::sqrt(static_cast<double>(r.spec.n));
    b.arrival = MartingalePath{r.A, std::move(c.arrival), b.scale};
    b.service = MartingalePath{r.D, std::move(c.service), b.scale};
    b.abandon = MartingalePath{r.L, std::move(c.abandon), b.scale};
    b.blocked_scaled = affine(r.U, b.scale, 0.0);
    return b;
}

DriftFn state_drift(const ModelSpec& spec) {
    if (spec.servers() == ModelSpec::kInfinite) return DriftFn::linear(spec.mu);
    return DriftFn::piecewise(spec.mu, spec.theta);
}

StateIdentity scaled_state_identity(const QueueRealization& r,
                                    const MartingaleBundle& b) {
    const double n = static_cast<double>(r.spec.n);
    StateIdentity out;
    out.x = clt_scale(r.Q, r.spec.n);
    out.drift_const = (r.spec.lambda_n - r.spec.mu * n) / std::sqrt(n);

    DriftFn h = state_drift(r.spec);
    LinearPath drift_int = integral_path(out.x, 1.0, [&h](double v) { return h(v); });

    std::vector<double> times;
    times.reserve(r.A.jump_count() + r.D.jump_count() + r.L.jump_count() +
                  r.U.jump_count() + 2);
    times.push_back(0.0);
    auto pull = [&times](const StepPath& p) {
        times.insert(times.end(), p.epochs().begin(), p.epochs().end());
    };
    pull(r.A);
    pull(r.D);
    pull(r.L);
    pull(r.U);
    times.push_back(r.spec.horizon);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());

    const double x0 = out.x.initial();
    double worst = 0.0;
    for (double t : times) {
        double rhs = x0 + b.arrival.eval(t) - b.service.eval(t) - b.abandon.eval(t) +
                     out.drift_const * t + drift_int.eval(t) -
                     b.blocked_scaled.eval(t);
        worst = std::max(worst, std::abs(out.x.eval(t) - rhs));
    }
    out.max_residual = worst;
    return out;
}

double sup_abs(const MartingalePath& m, double T) {
    if (!(T >= 0.0) || T > m.counting.horizon())
        throw std::domain_error("sup_abs: T outside the path's span");
    std::vector<double> times;
    times.reserve(m.counting.jump_count() + m.compensator.knots().size() + 2);
    times.push_back(0.0);
    times.push_back(T);
    for (double e : m.counting.epochs())
        if (e <= T) times.push_back(e);
    for (double k : m.compensator.knots())
        if (k <= T) times.push_back(k);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    double best = 0.0;
    for (double t : times) {
        best = std::max(best, std::abs(m.eval(t)));
        if (t > 0.0) best = std::max(best, std::abs(m.left_limit_at(t)));
    }
    return best;
}

double max_jump_scaled(const MartingalePath& m, double T) {
    return std::abs(m.scale) * max_jump(m.counting, T);
}

StepPath optional_covariation(const MartingalePath& a, const MartingalePath& b) {
    return affine(optional_qv(a.counting, b.counting), a.scale * b.scale, 0.0);
}

StepPath predictable_qv_discrete(const StepPath& compensator) {
    std::vector<double> epochs = compensator.epochs();
    std::vector<double> values(epochs.size());
    double squares = 0.0;
    for (std::size_t i = 0; i < epochs.size(); ++i) {
        double jump = compensator.jump_size(i);
        squares += jump * jump;
        values[i] = compensator.value_after(i) - squares;
    }
    return StepPath(compensator.initial(), compensator.horizon(),
                    std::move(epochs), std::move(values));
}

MartingalePath with_compensator_scaled(const MartingalePath& m, double factor) {
    std::vector<double> vals = m.compensator.values();
    for (double& v : vals) v *= factor;
    return MartingalePath{m.counting, LinearPath(m.compensator.knots(), std::move(vals)),
                          m.scale};
}

std::vector<double> eval_on_grid(const MartingalePath& m,
                                 const std::vector<double>& grid) {
    std::vector<double> out;
    out.reserve(grid.size());
    for (double t : grid) out.push_back(m.eval(t));
    return out;
}

}  // namespace qsim
