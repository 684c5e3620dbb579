#include "qsim/diffusion.hpp"

#include "qsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qsim {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

void check_grid(const std::vector<double>& grid) {
    if (grid.empty() || grid.front() != 0.0)
        throw std::invalid_argument("grid must start at 0");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw std::invalid_argument("grid must be strictly increasing");
}

}  // namespace

double DiffusionSpec::h(double x) const {
    return -mu * std::min(x, 0.0) - theta * std::max(x, 0.0);
}

double DiffusionSpec::drift(double x) const { return drift_const + h(x); }

DiffusionSpec DiffusionSpec::infinite_server(double mu, double beta) {
    return DiffusionSpec{-beta * mu, mu, mu, 2.0 * mu, kNoBarrier};
}

DiffusionSpec DiffusionSpec::erlang_a(double beta, double mu, double theta) {
    return DiffusionSpec{-beta * mu, mu, theta, 2.0 * mu, kNoBarrier};
}

DiffusionSpec DiffusionSpec::finite_room(double beta, double mu, double theta,
                                         double kappa) {
    return DiffusionSpec{-beta * mu, mu, theta, 2.0 * mu, kappa};
}

namespace {

void require_linear(const DiffusionSpec& spec, const char* who) {
    if (!spec.linear() || spec.barrier != DiffusionSpec::kNoBarrier)
        throw std::invalid_argument(std::string(who) +
                                    ": needs linear drift and no barrier");
    if (!(spec.mu > 0.0))
        throw std::invalid_argument(std::string(who) + ": needs mu > 0");
}

}  // namespace

double ou_mean(const DiffusionSpec& spec, double x0, double t) {
    require_linear(spec, "ou_mean");
    double m_inf = spec.drift_const / spec.mu;
    return m_inf + (x0 - m_inf) * std::exp(-spec.mu * t);
}

double ou_var(const DiffusionSpec& spec, double t) {
    require_linear(spec, "ou_var");
    double v_inf = spec.diffusion / (2.0 * spec.mu);
    return v_inf * (1.0 - std::exp(-2.0 * spec.mu * t));
}

double ou_cov(const DiffusionSpec& spec, double s, double t) {
    require_linear(spec, "ou_cov");
    double lo = std::min(s, t), hi = std::max(s, t);
    return std::exp(-spec.mu * (hi - lo)) * ou_var(spec, lo);
}

std::vector<double> ou_exact_path(const DiffusionSpec& spec, double x0,
                                  const std::vector<double>& grid,
                                  PhiloxEngine& eng) {
    require_linear(spec, "ou_exact_path");
    check_grid(grid);
    double m_inf = spec.drift_const / spec.mu;
    double v_inf = spec.diffusion / (2.0 * spec.mu);
    std::vector<double> x(grid.size());
    x[0] = x0;
    for (std::size_t k = 1; k < grid.size(); ++k) {
        double decay = std::exp(-spec.mu * (grid[k] - grid[k - 1]));
        double sd = std::sqrt(v_inf * (1.0 - decay * decay));
        x[k] = m_inf + (x[k - 1] - m_inf) * decay + sd * eng.normal();
    }
    return x;
}

GridRegulated euler_limit_path(const DiffusionSpec& spec, double x0,
                               const std::vector<double>& grid,
                               PhiloxEngine& eng) {
    check_grid(grid);
    if (x0 > spec.barrier)
        throw std::invalid_argument("euler_limit_path: start above the barrier");
    double pull = std::max(spec.mu, spec.theta);
    GridRegulated out;
    out.content.t = grid;
    out.regulator.t = grid;
    out.content.x.resize(grid.size());
    out.regulator.x.resize(grid.size());
    double x = x0, reg = 0.0;
    out.content.x[0] = x;
    out.regulator.x[0] = 0.0;
    for (std::size_t k = 1; k < grid.size(); ++k) {
        double dt = grid[k] - grid[k - 1];
        if (dt * pull > 0.5)
            throw std::invalid_argument(
                "euler_limit_path: grid too coarse for the drift strength");
        x += spec.drift(x) * dt + std::sqrt(spec.diffusion * dt) * eng.normal();
        if (x > spec.barrier) {
            reg += x - spec.barrier;
            x = spec.barrier;
        }
        out.content.x[k] = x;
        out.regulator.x[k] = reg;
    }
    return out;
}

MomentCurve marginal_moments(const DiffusionSpec& spec, double x0, double T,
                             double dt) {
    if (spec.barrier != DiffusionSpec::kNoBarrier)
        throw std::invalid_argument("marginal_moments: barrier not supported");
    if (!(dt > 0.0) || !(T > 0.0))
        throw std::invalid_argument("marginal_moments: need positive T and dt");

    // Gaussian closure: with X ~ N(m, v),
    //   E h(X)  = -mu (m Phi(-m/s) - s phi(m/s)) - theta (m Phi(m/s) + s phi(m/s))
    //   E h'(X) = -mu Phi(-m/s) - theta Phi(m/s)
    auto mean_drift = [&spec](double m, double v) {
        double s = std::sqrt(std::max(v, 0.0));
        if (s == 0.0) return spec.drift_const + spec.h(m);
        double p = normal_cdf(m / s), q = 1.0 - p, d = normal_pdf(m / s);
        return spec.drift_const - spec.mu * (m * q - s * d) -
               spec.theta * (m * p + s * d);
    };
    auto var_drift = [&spec](double m, double v) {
        double s = std::sqrt(std::max(v, 0.0));
        double slope;
        if (s == 0.0)
            slope = m < 0.0 ? -spec.mu
                            : (m > 0.0 ? -spec.theta : -0.5 * (spec.mu + spec.theta));
        else
            slope = -spec.mu * (1.0 - normal_cdf(m / s)) -
                    spec.theta * normal_cdf(m / s);
        return 2.0 * v * slope + spec.diffusion;
    };

    MomentCurve out;
    out.approximate = !spec.linear();
    std::size_t steps = static_cast<std::size_t>(std::ceil(T / dt));
    out.t.reserve(steps + 1);
    out.mean.reserve(steps + 1);
    out.var.reserve(steps + 1);
    double m = x0, v = 0.0, t = 0.0;
    out.t.push_back(0.0);
    out.mean.push_back(m);
    out.var.push_back(v);
    for (std::size_t k = 0; k < steps; ++k) {
        double step = std::min(dt, T - t);
        double k1m = mean_drift(m, v), k1v = var_drift(m, v);
        double k2m = mean_drift(m + 0.5 * step * k1m, v + 0.5 * step * k1v);
        double k2v = var_drift(m + 0.5 * step * k1m, v + 0.5 * step * k1v);
        double k3m = mean_drift(m + 0.5 * step * k2m, v + 0.5 * step * k2v);
        double k3v = var_drift(m + 0.5 * step * k2m, v + 0.5 * step * k2v);
        double k4m = mean_drift(m + step * k3m, v + step * k3v);
        double k4v = var_drift(m + step * k3m, v + step * k3v);
        m += step / 6.0 * (k1m + 2.0 * k2m + 2.0 * k3m + k4m);
        v += step / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        t += step;
        out.t.push_back(t);
        out.mean.push_back(m);
        out.var.push_back(std::max(v, 0.0));
    }
    return out;
}

double z4_variance(double mu, double t) {
    double g = 1.0 - std::exp(-mu * t);
    return 0.5 * g * g;
}

FourComponentPath fourth_rep_limit(double mu, double x0, double q0,
                                   const std::vector<double>& grid,
                                   std::uint64_t n_emp,
                                   std::uint64_t master_seed,
                                   std::uint32_t replication) {
    check_grid(grid);
    if (!(mu > 0.0)) throw std::invalid_argument("fourth_rep_limit: needs mu > 0");
    if (!(q0 >= 0.0)) throw std::invalid_argument("fourth_rep_limit: needs q0 >= 0");
    if (n_emp == 0) throw std::invalid_argument("fourth_rep_limit: needs n_emp >= 1");

    const std::size_t K = grid.size();
    FourComponentPath out;
    out.t = grid;
    out.z1.resize(K);
    out.z2.resize(K);
    out.z3.resize(K);
    out.z4.resize(K);
    out.x.resize(K);

    for (std::size_t k = 0; k < K; ++k)
        out.z1[k] = x0 * std::exp(-mu * grid[k]);

    // bridge component: W0(u) = W(u) - u W(1) evaluated at u = 1 - exp(-mu t),
    // with W extended to time 1 by one extra increment
    {
        PhiloxEngine eng(master_seed, replication, StreamRole::Bridge);
        std::vector<double> w(K);
        w[0] = 0.0;
        double u_prev = 0.0;
        for (std::size_t k = 1; k < K; ++k) {
            double u = 1.0 - std::exp(-mu * grid[k]);
            w[k] = w[k - 1] + std::sqrt(u - u_prev) * eng.normal();
            u_prev = u;
        }
        double w1 = w[K - 1] + std::sqrt(1.0 - u_prev) * eng.normal();
        double root_q0 = std::sqrt(q0);
        for (std::size_t k = 0; k < K; ++k) {
            double u = 1.0 - std::exp(-mu * grid[k]);
            out.z2[k] = root_q0 * (w[k] - u * w1);
        }
    }

    // arrival-noise response: exact autoregressive transition with
    // stationary variance 1/2
    {
        PhiloxEngine eng(master_seed, replication, StreamRole::Gaussian);
        out.z3[0] = 0.0;
        for (std::size_t k = 1; k < K; ++k) {
            double decay = std::exp(-mu * (grid[k] - grid[k - 1]));
            double sd = std::sqrt(0.5 * (1.0 - decay * decay));
            out.z3[k] = out.z3[k - 1] * decay + sd * eng.normal();
        }
    }

    // service-noise component from the pre-limit empirical scheme: arrival i
    // sits at i/(n mu) and departs an exponential time later; the centering
    // sum_i F(t - s_i) collapses to a geometric sum
    {
        PhiloxEngine eng(master_seed, replication, StreamRole::UniformField);
        const double n = static_cast<double>(n_emp);
        const double T = grid.back();
        const auto total =
            static_cast<std::size_t>(std::floor(n * mu * T));
        std::vector<double> deps(total);
        for (std::size_t i = 0; i < total; ++i) {
            double s_i = static_cast<double>(i + 1) / (n * mu);
            deps[i] = s_i + eng.exponential(mu);
        }
        std::sort(deps.begin(), deps.end());
        const double e1n = std::exp(1.0 / n);
        const double rootn = std::sqrt(n);
        for (std::size_t k = 0; k < K; ++k) {
            double t = grid[k];
            double md = std::floor(n * mu * t);
            // sum_{i<=m} F(t - i/(n mu)) = m - exp(-mu t) * e1n (e^{m/n}-1)/(e1n-1)
            double geo = std::exp(-mu * t) * e1n * std::expm1(md / n) / (e1n - 1.0);
            double centering = md - geo;
            auto it = std::upper_bound(deps.begin(), deps.end(), t);
            double departed = static_cast<double>(it - deps.begin());
            out.z4[k] = (centering - departed) / rootn;
        }
    }

    for (std::size_t k = 0; k < K; ++k)
        out.x[k] = out.z1[k] + out.z2[k] + out.z3[k] + out.z4[k];
    return out;
}

std::vector<double> reconstruct_noise(const std::vector<double>& t,
                                      const std::vector<double>& x, double mu,
                                      double x0) {
    if (t.size() != x.size() || t.size() < 2)
        throw std::invalid_argument("reconstruct_noise: need matching grids");
    std::vector<double> b(t.size());
    b[0] = 0.0;
    double y_prev = x[0] - x0;  // exp(mu*0) * (x(0) - x0)
    for (std::size_t k = 1; k < t.size(); ++k) {
        double y = std::exp(mu * t[k]) * x[k] - x0;
        double mid = 0.5 * (t[k - 1] + t[k]);
        b[k] = b[k - 1] + std::exp(-mu * mid) * (y - y_prev);
        y_prev = y;
    }
    return b;
}

}  // namespace qsim
