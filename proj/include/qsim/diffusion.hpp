// Samplers and closed-form moments for the limit diffusions: the
// mean-reverting Gaussian limit of the critically loaded infinite-server
// system, the piecewise-linear-drift limit with abandonment, its reflected
// variant under a finite waiting room, and the four-component additive form
// of the infinite-server limit.
#pragma once

#include "qsim/maps.hpp"
#include "qsim/rng.hpp"

#include <cstdint>
#include <limits>
#include <vector>

namespace qsim {

// dX = (drift_const - mu*min(X,0) - theta*max(X,0)) dt + sqrt(diffusion) dW,
// reflected downward at `barrier` when it is finite.
struct DiffusionSpec {
    static constexpr double kNoBarrier = std::numeric_limits<double>::infinity();

    double drift_const = 0.0;
    double mu = 1.0;
    double theta = 1.0;
    double diffusion = 2.0;
    double barrier = kNoBarrier;

    double h(double x) const;      // state-dependent drift part
    double drift(double x) const;  // drift_const + h(x)
    bool linear() const { return mu == theta; }

    static DiffusionSpec infinite_server(double mu, double beta = 0.0);
    static DiffusionSpec erlang_a(double beta, double mu, double theta);
    static DiffusionSpec finite_room(double beta, double mu, double theta,
                                     double kappa);
};

// Closed-form marginals for the linear-drift case (mu == theta, no barrier),
// started at deterministic x0.
double ou_mean(const DiffusionSpec& spec, double x0, double t);
double ou_var(const DiffusionSpec& spec, double t);
double ou_cov(const DiffusionSpec& spec, double s, double t);

// Exact-transition sampler for the linear-drift case on an increasing grid
// starting at 0; no discretization error at the grid points.
std::vector<double> ou_exact_path(const DiffusionSpec& spec, double x0,
                                  const std::vector<double>& grid,
                                  PhiloxEngine& eng);

// Euler scheme with projection at the barrier; the regulator collects the
// projected overshoot.  Every grid gap must satisfy gap*max(mu,theta) <= 0.5,
// otherwise the discretization is rejected as unstable.
GridRegulated euler_limit_path(const DiffusionSpec& spec, double x0,
                               const std::vector<double>& grid,
                               PhiloxEngine& eng);

// Mean and variance curves under a Gaussian closure of the moment equations,
// integrated with a fourth-order Runge-Kutta step.  The closure is exact for
// linear drift and an approximation otherwise; finite barriers are rejected.
struct MomentCurve {
    std::vector<double> t;
    std::vector<double> mean;
    std::vector<double> var;
    bool approximate = false;
};
MomentCurve marginal_moments(const DiffusionSpec& spec, double x0, double T,
                             double dt);

// The infinite-server limit at critical load split into its four independent
// components on a grid: x = z1 + z2 + z3 + z4 with
//   z1: decaying deterministic start,
//   z2: Brownian-bridge noise of the initial customers' departure times,
//   z3: mean-reverting response to the arrival-count noise,
//   z4: service-time noise of the new arrivals, generated from a pre-limit
//       empirical scheme of size n_emp with deterministic arrival grid.
struct FourComponentPath {
    std::vector<double> t;
    std::vector<double> z1, z2, z3, z4;
    std::vector<double> x;
};
FourComponentPath fourth_rep_limit(double mu, double x0, double q0,
                                   const std::vector<double>& grid,
                                   std::uint64_t n_emp,
                                   std::uint64_t master_seed,
                                   std::uint32_t replication);

// variance of the service-noise component at time t: (1 - exp(-mu t))^2 / 2
double z4_variance(double mu, double t);

// Reconstructs the cumulative driving noise from a sampled path on a grid:
// y(t) = exp(mu t) * (x(t) - exp(-mu t) x0) has independent increments, and
// discounting each increment at the midpoint recovers a Brownian motion with
// variance rate equal to the diffusion coefficient.  Returns the cumulative
// noise at the grid points, starting at zero.
std::vector<double> reconstruct_noise(const std::vector<double>& t,
                                      const std::vector<double>& x, double mu,
                                      double x0);

}  // namespace qsim
