#include "qsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace qsim {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double kolmogorov_sf(double x) {
    if (x <= 0.0) return 1.0;
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
        double term = std::exp(-2.0 * k * k * x * x);
        s += (k % 2 == 1) ? term : -term;
        if (term < 1e-18) break;
    }
    return std::min(1.0, std::max(0.0, 2.0 * s));
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.size() < 2)
        throw std::invalid_argument("ks_statistic: need at least 2 samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double f = cdf(samples[i]);
        d = std::max(d, f - static_cast<double>(i) / n);
        d = std::max(d, static_cast<double>(i + 1) / n - f);
    }
    return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.size() < 2 || b.size() < 2)
        throw std::invalid_argument("ks_two_sample: need at least 2 samples each");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x) ++i;  // step both cdfs past ties
        while (j < b.size() && b[j] == x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double pairwise_sum(const double* data, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += data[i];
        return s;
    }
    std::size_t half = n / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

MeanSe mean_se(const std::vector<double>& v) {
    MeanSe out;
    out.count = v.size();
    if (v.empty()) return out;
    out.mean = pairwise_sum(v) / static_cast<double>(v.size());
    if (v.size() < 2) return out;
    std::vector<double> dev(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        double d = v[i] - out.mean;
        dev[i] = d * d;
    }
    double var = pairwise_sum(dev) / static_cast<double>(v.size() - 1);
    out.se = std::sqrt(var / static_cast<double>(v.size()));
    return out;
}

CovSe cov_with_se(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("cov_with_se: need matching samples, at least 2");
    const std::size_t n = x.size();
    double mx = pairwise_sum(x) / static_cast<double>(n);
    double my = pairwise_sum(y) / static_cast<double>(n);
    std::vector<double> prod(n);
    for (std::size_t i = 0; i < n; ++i) prod[i] = (x[i] - mx) * (y[i] - my);
    CovSe out;
    out.cov = pairwise_sum(prod) * (static_cast<double>(n) / (static_cast<double>(n) - 1.0)) /
              static_cast<double>(n);
    std::vector<double> dev(n);
    for (std::size_t i = 0; i < n; ++i) {
        double d = prod[i] - out.cov;
        dev[i] = d * d;
    }
    double var_prod = pairwise_sum(dev) / static_cast<double>(n - 1);
    out.se = std::sqrt(var_prod / static_cast<double>(n));
    return out;
}

namespace {

inline void neumaier_add(double& s, double& c, double x) {
    double t = s + x;
    if (std::abs(s) >= std::abs(x))
        c += (s - t) + x;
    else
        c += (x - t) + s;
    s = t;
}

}  // namespace

EnsembleStats::EnsembleStats(std::vector<double> t_grid) : grid_(std::move(t_grid)) {
    retained_.resize(grid_.size());
    stride_.assign(grid_.size(), 1);
    sum_.assign(grid_.size(), 0.0);
    sumc_.assign(grid_.size(), 0.0);
    sumsq_.assign(grid_.size(), 0.0);
    sumsqc_.assign(grid_.size(), 0.0);
}

void EnsembleStats::add(const std::vector<double>& values_per_t) {
    if (values_per_t.size() != grid_.size())
        throw std::invalid_argument("EnsembleStats::add: grid size mismatch");
    for (std::size_t g = 0; g < grid_.size(); ++g) {
        double v = values_per_t[g];
        neumaier_add(sum_[g], sumc_[g], v);
        neumaier_add(sumsq_[g], sumsqc_[g], v * v);
        if (count_ % stride_[g] == 0) {
            retained_[g].push_back(v);
            if (retained_[g].size() > kReservoirCap) {
                std::vector<double> thinned;
                thinned.reserve(retained_[g].size() / 2 + 1);
                for (std::size_t i = 0; i < retained_[g].size(); i += 2)
                    thinned.push_back(retained_[g][i]);
                retained_[g].swap(thinned);
                stride_[g] *= 2;
            }
        }
    }
    ++count_;
}

void EnsembleStats::merge(const EnsembleStats& other) {
    if (other.grid_ != grid_)
        throw std::invalid_argument("EnsembleStats::merge: grid mismatch");
    for (std::size_t g = 0; g < grid_.size(); ++g) {
        neumaier_add(sum_[g], sumc_[g], other.sum_[g]);
        neumaier_add(sum_[g], sumc_[g], other.sumc_[g]);
        neumaier_add(sumsq_[g], sumsqc_[g], other.sumsq_[g]);
        neumaier_add(sumsq_[g], sumsqc_[g], other.sumsqc_[g]);
        // concatenate reservoirs at a common stride
        std::size_t s = std::max(stride_[g], other.stride_[g]);
        auto thin_to = [](const std::vector<double>& src, std::size_t from, std::size_t to) {
            if (from == to) return src;
            std::vector<double> out;
            std::size_t step = to / from;
            for (std::size_t i = 0; i < src.size(); i += step) out.push_back(src[i]);
            return out;
        };
        std::vector<double> mine = thin_to(retained_[g], stride_[g], s);
        std::vector<double> theirs = thin_to(other.retained_[g], other.stride_[g], s);
        mine.insert(mine.end(), theirs.begin(), theirs.end());
        retained_[g].swap(mine);
        stride_[g] = s;
        while (retained_[g].size() > kReservoirCap) {
            std::vector<double> thinned;
            for (std::size_t i = 0; i < retained_[g].size(); i += 2)
                thinned.push_back(retained_[g][i]);
            retained_[g].swap(thinned);
            stride_[g] *= 2;
        }
    }
    count_ += other.count_;
}

double EnsembleStats::mean(std::size_t gi) const {
    if (count_ == 0) return 0.0;
    return (sum_[gi] + sumc_[gi]) / static_cast<double>(count_);
}

double EnsembleStats::variance(std::size_t gi) const {
    if (count_ < 2) return 0.0;
    double n = static_cast<double>(count_);
    double m = mean(gi);
    double ss = (sumsq_[gi] + sumsqc_[gi]) - n * m * m;
    return std::max(0.0, ss / (n - 1.0));
}

double EnsembleStats::se(std::size_t gi) const {
    if (count_ < 2) return 0.0;
    return std::sqrt(variance(gi) / static_cast<double>(count_));
}

std::array<double, 7> EnsembleStats::quantiles(std::size_t gi) const {
    std::array<double, 7> out{};
    if (retained_[gi].empty()) return out;
    std::vector<double> s(retained_[gi]);
    std::sort(s.begin(), s.end());
    for (std::size_t q = 0; q < kQuantileProbs.size(); ++q) {
        double pos = kQuantileProbs[q] * (static_cast<double>(s.size()) - 1.0);
        std::size_t lo = static_cast<std::size_t>(pos);
        std::size_t hi = std::min(lo + 1, s.size() - 1);
        double w = pos - static_cast<double>(lo);
        out[q] = s[lo] + w * (s[hi] - s[lo]);
    }
    return out;
}

void EnsembleStats::write_summary_csv(std::ostream& os) const {
    os << "t,count,mean,variance,se,q01,q05,q25,q50,q75,q95,q99\n";
    char buf[32];
    for (std::size_t g = 0; g < grid_.size(); ++g) {
        auto q = quantiles(g);
        std::snprintf(buf, sizeof buf, "%.17g", grid_[g]);
        os << buf << ',' << count_;
        double cols[] = {mean(g), variance(g), se(g), q[0], q[1], q[2], q[3], q[4], q[5], q[6]};
        for (double v : cols) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            os << ',' << buf;
        }
        os << '\n';
    }
}

}  // namespace qsim
