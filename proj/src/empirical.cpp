#include "qsim/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qsim {

SeqEmpirical::SeqEmpirical(std::vector<double> marks, std::uint64_t n)
    : marks_(std::move(marks)), n_(n) {
    if (n_ == 0) throw std::invalid_argument("SeqEmpirical: scale must be >= 1");
    for (double z : marks_)
        if (!(z >= 0.0 && z <= 1.0))
            throw std::invalid_argument("SeqEmpirical: marks must lie in [0, 1]");
}

double SeqEmpirical::partial_count(std::uint64_t m, double x) const {
    std::size_t upto = static_cast<std::size_t>(
        std::min<std::uint64_t>(m, marks_.size()));
    std::uint64_t c = 0;
    for (std::size_t i = 0; i < upto; ++i)
        if (marks_[i] <= x) ++c;
    return static_cast<double>(c);
}

double SeqEmpirical::k_field(double t, double x) const {
    if (t < 0.0) throw std::domain_error("k_field: t must be >= 0");
    auto m = static_cast<std::uint64_t>(std::floor(t * static_cast<double>(n_)));
    return partial_count(m, x) / static_cast<double>(n_);
}

double SeqEmpirical::u_field(double t, double x) const {
    if (t < 0.0) throw std::domain_error("u_field: t must be >= 0");
    double n = static_cast<double>(n_);
    auto m = static_cast<std::uint64_t>(std::floor(t * n));
    double frac = static_cast<double>(std::min<std::uint64_t>(m, marks_.size())) / n;
    return std::sqrt(n) * (partial_count(m, x) / n - frac * x);
}

SeqEmpirical service_marks(const QueueRealization& r) {
    if (r.construction != Construction::ServiceTimes)
        throw std::invalid_argument("service_marks: needs the per-customer construction");
    std::vector<double> marks;
    marks.reserve(r.service_times.size());
    for (double eta : r.service_times) marks.push_back(r.spec.service.cdf(eta));
    return SeqEmpirical(std::move(marks), r.spec.n);
}

double v_field(const SeqEmpirical& emp, const QueueRealization& r, double t,
               double x) {
    double n = static_cast<double>(r.spec.n);
    double m = r.A.eval(t);  // integer-valued
    double fx = r.spec.service.cdf(x);
    return (emp.partial_count(static_cast<std::uint64_t>(m), fx) - m * fx) /
           std::sqrt(n);
}

double integrated_survival(const Law& law, double t) {
    if (t <= 0.0) return 0.0;
    switch (law.kind) {
        case Law::Kind::Exponential:
            return law.mean * (1.0 - std::exp(-t / law.mean));
        case Law::Kind::Deterministic:
            return std::min(t, law.mean);
        case Law::Kind::Uniform: {
            double b = 2.0 * law.mean;
            return t >= b ? law.mean : t - t * t / (2.0 * b);
        }
        case Law::Kind::Erlang: {
            // int_0^t exp(-ru)(ru)^j/j! du = F_{j+1}(t)/r with F_{j+1} the
            // Erlang(j+1, rate r) distribution function
            double r = static_cast<double>(law.shape) / law.mean;
            double acc = 0.0;
            for (int j = 1; j <= law.shape; ++j)
                acc += Law::erlang(j, static_cast<double>(j) / r).cdf(t);
            return acc / r;
        }
    }
    return 0.0;
}

double fwlln_center(const ModelSpec& spec, double q0_frac, double t) {
    double n = static_cast<double>(spec.n);
    return q0_frac * (1.0 - spec.residual_service.cdf(t)) +
           spec.lambda_n / n * integrated_survival(spec.service, t);
}

FourthDecomposition fourth_decomposition(const QueueRealization& r, double t,
                                         double q0_frac) {
    if (r.construction != Construction::ServiceTimes)
        throw std::invalid_argument(
            "fourth_decomposition: needs the per-customer construction");
    if (t < 0.0 || t > r.spec.horizon)
        throw std::domain_error("fourth_decomposition: t outside the horizon");
    const ModelSpec& spec = r.spec;
    const double n = static_cast<double>(spec.n);
    const double rootn = std::sqrt(n);
    const double f0_surv = 1.0 - spec.residual_service.cdf(t);

    FourthDecomposition out;
    out.fluid = fwlln_center(spec, q0_frac, t);
    out.centered = (r.Q.eval(t) - n * out.fluid) / rootn;

    const double k0 = static_cast<double>(r.initial_remaining.size());
    double init = 0.0;
    for (double e : r.initial_remaining) init += (e > t ? 1.0 : 0.0) - f0_surv;
    out.initial_fluct = init / rootn;
    out.initial_count = rootn * (k0 / n - q0_frac) * f0_surv;

    double surv_mass = 0.0, dep_noise = 0.0;
    for (std::size_t i = 0; i < r.arrival_times.size(); ++i) {
        double tau = r.arrival_times[i];
        if (tau > t) break;
        double f = spec.service.cdf(t - tau);
        surv_mass += 1.0 - f;
        dep_noise += (tau + r.service_times[i] <= t ? 1.0 : 0.0) - f;
    }
    out.arrival_noise =
        (surv_mass - spec.lambda_n * integrated_survival(spec.service, t)) / rootn;
    out.service_noise = dep_noise / rootn;
    return out;
}

}  // namespace qsim
