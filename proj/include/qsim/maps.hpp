// Deterministic solvers for the continuous maps that carry driving noise to
// limit processes: the Lipschitz integral representation x = b + y + int h(x),
// its barrier-reflected variant, path composition, and the Gronwall
// perturbation certificate.
#pragma once

#include "qsim/paths.hpp"

#include <functional>
#include <vector>

namespace qsim {

// State-feedback drift h with h(0) = 0 and a known Lipschitz modulus.
class DriftFn {
public:
    // h(s) = -mu * s
    static DriftFn linear(double mu);
    // h(s) = -mu * min(s, 0) - theta * max(s, 0)
    static DriftFn piecewise(double mu, double theta);
    static DriftFn custom(std::function<double(double)> h, double modulus);

    double operator()(double s) const { return h_(s); }
    double modulus() const { return modulus_; }

private:
    DriftFn(std::function<double(double)> h, double modulus)
        : h_(std::move(h)), modulus_(modulus) {}
    std::function<double(double)> h_;
    double modulus_;
};

// Solution sampled on a grid; values are right-continuous at driver jumps.
struct GridPath {
    std::vector<double> t;
    std::vector<double> x;
    double eval(double s) const;  // linear interpolation between grid points
};

struct GridRegulated {
    GridPath content;
    GridPath regulator;
};

// Forward Euler for x(t) = b + y(t) + int_0^t h(x(s)) ds on the uniform grid
// refined with y's jump epochs; order 1 in dt.
GridPath solve_integral_rep(double b, const StepPath& y, const DriftFn& h, double dt);

// Fixed point w = b + y + int h(phi_kappa(w)) by blockwise Picard iteration
// (restart every 1/(4c) so the iteration contracts), then x = phi_kappa(w),
// u = psi_kappa(w).  Content never exceeds kappa; the regulator only grows on
// grid steps that end on the barrier.
GridRegulated solve_reflected_rep(double b, const StepPath& y, const DriftFn& h,
                                  double kappa, double dt);

// composition t -> x(tau(t)) for a nondecreasing step time change; exact
StepPath compose(const StepPath& x, const StepPath& tau);
// composition against a continuous nondecreasing time change, on a grid
std::vector<double> compose_on_grid(const StepPath& x, const LinearPath& tau,
                                    const std::vector<double>& t_grid);

// a priori perturbation certificate eps * e^{c T}
double gronwall_bound(double eps, double c, double T);

}  // namespace qsim
