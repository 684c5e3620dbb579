// Sequential empirical process of uniform marks, the derived service field
// of an infinite-server realization, and the exact additive split of the
// headcount into initial-condition, fluid, arrival-noise, and service-noise
// components.
#pragma once

#include "qsim/model.hpp"

#include <cstdint>
#include <vector>

namespace qsim {

// Marks zeta_1..zeta_m in [0, 1], kept in arrival order and queried against
// a scale parameter n: scaled time t addresses the first floor(n*t) marks.
class SeqEmpirical {
public:
    SeqEmpirical(std::vector<double> marks, std::uint64_t n);

    std::uint64_t scale() const { return n_; }
    std::size_t count() const { return marks_.size(); }

    // number of marks at most x among the first m (m capped at count)
    double partial_count(std::uint64_t m, double x) const;
    // K(t, x) = partial_count(floor(n t), x) / n
    double k_field(double t, double x) const;
    // U(t, x) = sqrt(n) * (K(t, x) - (floor(n t)/n) * x); for every t this
    // vanishes identically at x = 0 and x = 1
    double u_field(double t, double x) const;

private:
    std::vector<double> marks_;
    std::uint64_t n_;
};

// marks F(eta_i) of a per-customer realization, in arrival order
SeqEmpirical service_marks(const QueueRealization& r);

// Scaled service field V(t, x) = U(A(t)/n, F(x)): the centered, scaled count
// of arrivals by time t whose requirement is at most x.
double v_field(const SeqEmpirical& emp, const QueueRealization& r, double t,
               double x);

// int_0^t (1 - cdf(u)) du, in closed form for every supported law
double integrated_survival(const Law& law, double t);

// Fluid centering of the infinite-server headcount fraction:
// q0_frac * (1 - F0(t)) + (lambda_n/n) * int_0^t (1 - F(u)) du.
// For exponential laws at the critically loaded rate this is
// 1 - (1 - q0_frac) * exp(-mu t).
double fwlln_center(const ModelSpec& spec, double q0_frac, double t);

// Pathwise-exact split of the scaled headcount at time t:
//   centered = initial_fluct + initial_count + arrival_noise - service_noise
// where centered = (Q(t) - n * fluid)/sqrt(n).  Any q0_frac works; it only
// moves mass between the fluid centering and the initial-count component.
struct FourthDecomposition {
    double fluid = 0.0;          // fwlln_center at t
    double centered = 0.0;       // (Q(t) - n*fluid)/sqrt(n)
    double initial_fluct = 0.0;  // centered departures of initial customers
    double initial_count = 0.0;  // fluctuation of the initial headcount
    double arrival_noise = 0.0;  // centered survival mass of the arrivals
    double service_noise = 0.0;  // centered departure indicators of arrivals
};
FourthDecomposition fourth_decomposition(const QueueRealization& r, double t,
                                         double q0_frac);

}  // namespace qsim
