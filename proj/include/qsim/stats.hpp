// Ensemble statistics and distributional test machinery: deterministic
// mergeable per-grid-point summaries, one- and two-sample KS statistics,
// reference cdfs.
#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <vector>

namespace qsim {

double normal_cdf(double x);
// survival function of the Kolmogorov distribution, 2*sum (-1)^{k-1} e^{-2k^2x^2}
double kolmogorov_sf(double x);

// sup_x |F_emp(x) - cdf(x)| over the sample; needs at least 2 samples
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);
// sup_x |F_a(x) - F_b(x)|; tie-aware (both empirical cdfs advanced past equal values)
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// deterministic summation helpers
double pairwise_sum(const double* data, std::size_t n);
double pairwise_sum(const std::vector<double>& v);

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;  // standard error of the mean
    std::size_t count = 0;
};
MeanSe mean_se(const std::vector<double>& v);

// covariance of paired samples with a plug-in standard error
struct CovSe {
    double cov = 0.0;
    double se = 0.0;
};
CovSe cov_with_se(const std::vector<double>& x, const std::vector<double>& y);

inline constexpr std::array<double, 7> kQuantileProbs = {0.01, 0.05, 0.25, 0.50, 0.75, 0.95, 0.99};

// Per-time-grid-point empirical summary over replications.  Samples are
// appended in replication order and merges concatenate in call order, so any
// fixed merge plan gives bit-identical results regardless of worker count.
// Quantiles come from retained reservoirs (stride-decimated past the cap, a
// rank error of at most stride/2); mean/variance always use full-count
// accumulators.
class EnsembleStats {
public:
    static constexpr std::size_t kReservoirCap = 100000;

    explicit EnsembleStats(std::vector<double> t_grid);

    const std::vector<double>& t_grid() const { return grid_; }
    std::size_t count() const { return count_; }

    // one replication's extractor values, one per grid point
    void add(const std::vector<double>& values_per_t);
    // append other's samples after this one's (replication order concatenation)
    void merge(const EnsembleStats& other);

    double mean(std::size_t gi) const;
    double variance(std::size_t gi) const;  // sample variance, 0 when count < 2
    double se(std::size_t gi) const;
    std::array<double, 7> quantiles(std::size_t gi) const;
    const std::vector<double>& retained(std::size_t gi) const { return retained_[gi]; }

    void write_summary_csv(std::ostream& os) const;

private:
    std::vector<double> grid_;
    std::size_t count_ = 0;
    std::vector<std::vector<double>> retained_;  // per grid point
    std::vector<std::size_t> stride_;            // decimation stride per grid point
    std::vector<double> sum_, sumc_;             // Neumaier accumulators
    std::vector<double> sumsq_, sumsqc_;
};

}  // namespace qsim
