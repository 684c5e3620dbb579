// Square-root-staffing parameterization and the CLT/fluid scalings that
// connect queue realizations to their limit processes.
#pragma once

#include "qsim/paths.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace qsim {

// A scale sequence in the square-root staffing regime: for each n,
// lambda_n = n*mu - beta*mu*sqrt(n) exactly and m_n = round(kappa*sqrt(n)).
struct QedSequence {
    double beta = 0.0;
    double kappa = 0.0;  // scaled waiting room; >= 0
    double mu = 1.0;
    double theta = 0.0;
    std::vector<std::uint64_t> n_list;
};

// lambda_n = n*mu - beta*mu*sqrt(n); domain error if nonpositive
double qed_arrival_rate(std::uint64_t n, double mu, double beta);
// m_n = round(kappa * sqrt(n))
std::uint64_t qed_room_size(std::uint64_t n, double kappa);

// diffusion scaling (Q - n*q(t)) / sqrt(n); the default centering q == 1
StepPath clt_scale(const StepPath& Q, std::uint64_t n);
// general centering evaluated on a query grid (the centered path is no longer
// piecewise constant when q varies)
std::vector<double> clt_scale_on_grid(const StepPath& Q, std::uint64_t n,
                                      const std::function<double(double)>& centering,
                                      const std::vector<double>& t_grid);

// law-of-large-numbers scaling Q/n
StepPath fluid_scale(const StepPath& Q, std::uint64_t n);

// initial-state truncation min(q0, 2n); idempotent and monotone
std::uint64_t truncate_initial(std::uint64_t q0, std::uint64_t n);

// the three time-change clocks of a Markovian realization, fluid-scaled:
// Phi_A(t) = lambda_n t / n, Phi_S(t) = (mu/n) int (Q ^ n), Phi_R(t) = (theta/n) int (Q-n)^+
struct TimeChangeClocks {
    LinearPath phi_A;
    LinearPath phi_S;
    LinearPath phi_R;
};

struct QueueRealization;
TimeChangeClocks time_change_clocks(const QueueRealization& r);

}  // namespace qsim
