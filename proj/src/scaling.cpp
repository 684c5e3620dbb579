#include "qsim/scaling.hpp"

#include <cmath>
#include <stdexcept>

namespace qsim {

double qed_arrival_rate(std::uint64_t n, double mu, double beta) {
    if (n < 1 || !(mu > 0.0))
        throw std::domain_error("qed_arrival_rate: need n >= 1 and mu > 0");
    double lambda = static_cast<double>(n) * mu - beta * mu * std::sqrt(static_cast<double>(n));
    if (!(lambda > 0.0))
        throw std::domain_error("qed_arrival_rate: nonpositive arrival rate");
    return lambda;
}

std::uint64_t qed_room_size(std::uint64_t n, double kappa) {
    if (kappa < 0.0) throw std::domain_error("qed_room_size: kappa must be >= 0");
    return static_cast<std::uint64_t>(std::llround(kappa * std::sqrt(static_cast<double>(n))));
}

StepPath clt_scale(const StepPath& Q, std::uint64_t n) {
    if (n < 1) throw std::domain_error("clt_scale: n must be >= 1");
    double rn = std::sqrt(static_cast<double>(n));
    return affine(Q, 1.0 / rn, -static_cast<double>(n) / rn);
}

std::vector<double> clt_scale_on_grid(const StepPath& Q, std::uint64_t n,
                                      const std::function<double(double)>& centering,
                                      const std::vector<double>& t_grid) {
    if (n < 1) throw std::domain_error("clt_scale_on_grid: n must be >= 1");
    double rn = std::sqrt(static_cast<double>(n));
    std::vector<double> out;
    out.reserve(t_grid.size());
    for (double t : t_grid)
        out.push_back((Q.eval(t) - static_cast<double>(n) * centering(t)) / rn);
    return out;
}

StepPath fluid_scale(const StepPath& Q, std::uint64_t n) {
    if (n < 1) throw std::domain_error("fluid_scale: n must be >= 1");
    return affine(Q, 1.0 / static_cast<double>(n), 0.0);
}

std::uint64_t truncate_initial(std::uint64_t q0, std::uint64_t n) {
    return std::min(q0, 2 * n);
}

}  // namespace qsim
