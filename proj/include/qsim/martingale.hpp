// Compensated counting processes kept in exact split form: an integer-valued
// counting path minus a piecewise-linear compensator, times a scale.  The
// split form makes quadratic variations, pathwise suprema, and the drift
// identity of the scaled headcount computable without discretization error.
#pragma once

#include "qsim/maps.hpp"
#include "qsim/model.hpp"
#include "qsim/paths.hpp"

#include <cstdint>
#include <vector>

namespace qsim {

struct MartingalePath {
    StepPath counting;
    LinearPath compensator;
    double scale = 1.0;

    double eval(double t) const;
    double left_limit_at(double t) const;

    // predictable quadratic variation: for unit jumps and a continuous
    // compensator this is the compensator itself, rescaled
    LinearPath pqv() const;
    // optional quadratic variation: the running sum of squared jumps
    StepPath oqv() const;
};

// The three compensated counting processes of one realization, scaled by
// 1/sqrt(n), plus the scaled blocked-arrival count (zero without a finite
// waiting room).
struct MartingaleBundle {
    std::uint64_t n = 1;
    double scale = 1.0;
    MartingalePath arrival;   // arrivals minus lambda_n * t
    MartingalePath service;   // completions minus mu * int min(Q, servers)
    MartingalePath abandon;   // abandonments minus theta * int (Q - servers)^+
    StepPath blocked_scaled;  // blocked arrivals / sqrt(n)
};

MartingaleBundle decompose(const QueueRealization& r);

// Drift field of the scaled headcount: -mu*x when every customer is in
// service, otherwise -mu*min(x,0) - theta*max(x,0).
DriftFn state_drift(const ModelSpec& spec);

// The scaled headcount x = (Q - n)/sqrt(n) satisfies, pathwise,
//   x(t) = x(0) + arrival(t) - service(t) - abandon(t)
//          + drift_const * t + int_0^t h(x(s)) ds - blocked_scaled(t),
// with h = state_drift and drift_const = (lambda_n - mu*n)/sqrt(n).
// Both sides move in lockstep between events, so checking the residual at
// every event epoch and at the horizon checks it everywhere; max_residual
// is roundoff-small when the construction is correct.
struct StateIdentity {
    StepPath x;
    double drift_const = 0.0;
    double max_residual = 0.0;
};
StateIdentity scaled_state_identity(const QueueRealization& r,
                                    const MartingaleBundle& b);

// exact sup over [0, T] of |M|, scanning segment endpoints and left limits
double sup_abs(const MartingalePath& m, double T);

// largest absolute jump of M on (0, T]
double max_jump_scaled(const MartingalePath& m, double T);

// running sum of products of simultaneous jumps of the two counting parts,
// rescaled; identically zero when the streams never jump together
StepPath optional_covariation(const MartingalePath& a, const MartingalePath& b);

// predictable quadratic variation of a compensated unit-jump chain whose
// compensator itself jumps: the compensator minus its summed squared jumps
StepPath predictable_qv_discrete(const StepPath& compensator);

// same path with the compensator inflated; used as a fault injection to
// confirm the distributional checks can fail
MartingalePath with_compensator_scaled(const MartingalePath& m, double factor);

std::vector<double> eval_on_grid(const MartingalePath& m,
                                 const std::vector<double>& grid);

}  // namespace qsim
