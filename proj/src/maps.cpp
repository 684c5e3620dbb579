#include "qsim/maps.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qsim {

DriftFn DriftFn::linear(double mu) {
    return DriftFn([mu](double s) { return -mu * s; }, std::abs(mu));
}

DriftFn DriftFn::piecewise(double mu, double theta) {
    return DriftFn([mu, theta](double s) {
        return -mu * std::min(s, 0.0) - theta * std::max(s, 0.0);
    }, std::max(mu, theta));
}

DriftFn DriftFn::custom(std::function<double(double)> h, double modulus) {
    return DriftFn(std::move(h), modulus);
}

double GridPath::eval(double s) const {
    if (t.empty()) throw std::domain_error("GridPath::eval: empty path");
    if (!(s >= t.front()) || s > t.back())
        throw std::domain_error("GridPath::eval: s outside grid span");
    auto it = std::upper_bound(t.begin(), t.end(), s);
    if (it == t.end()) return x.back();
    std::size_t i = static_cast<std::size_t>(it - t.begin());
    if (i == 0) return x.front();
    double w = (s - t[i - 1]) / (t[i] - t[i - 1]);
    return x[i - 1] + w * (x[i] - x[i - 1]);
}

namespace {

// uniform dt grid over [0, T] with the driver's jump epochs inserted
std::vector<double> refined_grid(const StepPath& y, double dt) {
    double T = y.horizon();
    std::vector<double> g;
    std::size_t steps = static_cast<std::size_t>(std::ceil(T / dt));
    g.reserve(steps + y.jump_count() + 2);
    for (std::size_t k = 0; k <= steps; ++k) g.push_back(std::min(T, static_cast<double>(k) * dt));
    for (std::size_t i = 0; i < y.jump_count(); ++i) g.push_back(y.epoch(i));
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    if (g.back() != T) g.push_back(T);
    return g;
}

}  // namespace

GridPath solve_integral_rep(double b, const StepPath& y, const DriftFn& h, double dt) {
    if (!(dt > 0.0)) throw std::domain_error("solve_integral_rep: dt must be > 0");
    GridPath out;
    out.t = refined_grid(y, dt);
    out.x.resize(out.t.size());
    out.x[0] = b + y.eval(0.0);
    for (std::size_t k = 0; k + 1 < out.t.size(); ++k) {
        double step = out.t[k + 1] - out.t[k];
        out.x[k + 1] = out.x[k] + (y.eval(out.t[k + 1]) - y.eval(out.t[k])) + h(out.x[k]) * step;
    }
    return out;
}

GridRegulated solve_reflected_rep(double b, const StepPath& y, const DriftFn& h,
                                  double kappa, double dt) {
    if (!(dt > 0.0)) throw std::domain_error("solve_reflected_rep: dt must be > 0");
    if (!(b <= kappa)) throw std::domain_error("solve_reflected_rep: need b <= kappa");
    const std::vector<double> grid = refined_grid(y, dt);
    const std::size_t N = grid.size();
    std::vector<double> yv(N);
    for (std::size_t k = 0; k < N; ++k) yv[k] = y.eval(grid[k]);

    std::vector<double> w(N), x(N), reg(N);
    w[0] = b + yv[0];
    reg[0] = std::max(0.0, w[0] - kappa);
    x[0] = w[0] - reg[0];

    // blockwise Picard: restart every 1/(4c) so each sweep contracts
    double c = h.modulus();
    double block_len = (c > 0.0) ? 1.0 / (4.0 * c) : y.horizon() + 1.0;
    std::size_t a = 0;
    while (a + 1 < N) {
        std::size_t bidx = a + 1;
        while (bidx + 1 < N && grid[bidx] - grid[a] < block_len) ++bidx;
        // drift contribution of the settled prefix [0, a]
        double prefix_drift = 0.0;
        {
            double acc = 0.0;
            for (std::size_t j = 0; j + 1 <= a; ++j) acc += h(x[j]) * (grid[j + 1] - grid[j]);
            prefix_drift = acc;
        }
        // initial guess on the block: frozen drift from the left endpoint
        for (std::size_t k = a + 1; k <= bidx; ++k)
            w[k] = w[a] + (yv[k] - yv[a]) + h(x[a]) * (grid[k] - grid[a]);
        for (int it = 0; it < 100; ++it) {
            // regulator = running sup of (w - kappa)^+ continued from the prefix
            double m = reg[a];
            for (std::size_t k = a + 1; k <= bidx; ++k) {
                m = std::max(m, w[k] - kappa);
                x[k] = w[k] - m;
            }
            double change = 0.0;
            double acc = prefix_drift;
            for (std::size_t k = a + 1; k <= bidx; ++k) {
                acc += h(x[k - 1]) * (grid[k] - grid[k - 1]);
                double next = w[0] + (yv[k] - yv[0]) + acc;
                change = std::max(change, std::abs(next - w[k]));
                w[k] = next;
            }
            if (change < 1e-10) break;
        }
        double m = reg[a];
        for (std::size_t k = a + 1; k <= bidx; ++k) {
            m = std::max(m, w[k] - kappa);
            reg[k] = m;
            x[k] = w[k] - m;
        }
        a = bidx;
    }

    GridRegulated out;
    out.content.t = grid;
    out.content.x = std::move(x);
    out.regulator.t = grid;
    out.regulator.x = std::move(reg);
    return out;
}

StepPath compose(const StepPath& x, const StepPath& tau) {
    auto check = [&](double v) {
        if (!(v >= 0.0) || v > x.horizon())
            throw std::domain_error("compose: time change leaves the domain of x");
        return v;
    };
    double prev = tau.initial();
    for (std::size_t i = 0; i < tau.jump_count(); ++i) {
        if (tau.value_after(i) < prev)
            throw std::invalid_argument("compose: time change must be nondecreasing");
        prev = tau.value_after(i);
    }
    std::vector<double> values;
    values.reserve(tau.jump_count());
    for (std::size_t i = 0; i < tau.jump_count(); ++i)
        values.push_back(x.eval(check(tau.value_after(i))));
    return StepPath(x.eval(check(tau.initial())), tau.horizon(), tau.epochs(), std::move(values));
}

std::vector<double> compose_on_grid(const StepPath& x, const LinearPath& tau,
                                    const std::vector<double>& t_grid) {
    std::vector<double> out;
    out.reserve(t_grid.size());
    for (double t : t_grid) {
        double s = tau.eval(t);
        if (!(s >= 0.0) || s > x.horizon())
            throw std::domain_error("compose_on_grid: time change leaves the domain of x");
        out.push_back(x.eval(s));
    }
    return out;
}

double gronwall_bound(double eps, double c, double T) {
    if (eps < 0.0 || c < 0.0)
        throw std::domain_error("gronwall_bound: eps and c must be >= 0");
    return eps * std::exp(c * T);
}

}  // namespace qsim
