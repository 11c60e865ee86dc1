#include <warmpref/common.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace warmpref {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
    std::uint64_t h = splitmix64(master);
    h = splitmix64(h ^ splitmix64(a + 0x632be59bd9b4e019ULL));
    h = splitmix64(h ^ splitmix64(b + 0x85157af5ULL));
    return h;
}

std::uint64_t stable_hash(std::string_view s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

double softplus(double x) {
    if (x > 0)
        return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

double sigmoid(double x) {
    if (x >= 0)
        return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double log_sigmoid(double x) { return -softplus(-x); }

double log_sum_exp(double a, double b) {
    const double m = std::max(a, b);
    if (m == -std::numeric_limits<double>::infinity())
        return m;
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_log_pdf(double x, double mean, double sd) {
    const double z = (x - mean) / sd;
    return -0.5 * z * z - std::log(sd) - 0.5 * std::log(2.0 * std::numbers::pi);
}

Vector standard_normal(Eigen::Index n, Rng & rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    Vector z(n);
    for (Eigen::Index i = 0; i < n; ++i)
        z[i] = dist(rng);
    return z;
}

Vector sample_gaussian(const Vector & mean, const Matrix & chol_lower, Rng & rng) {
    return mean + chol_lower * standard_normal(mean.size(), rng);
}

Eigen::Index argmax_lowest(const Vector & v) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < v.size(); ++i)
        if (v[i] > v[best])
            best = i;
    return best;
}

double ks_statistic(std::vector<double> sample, const std::vector<double> & grid,
                    const std::vector<double> & cdf) {
    if (sample.empty() || grid.size() != cdf.size() || grid.size() < 2)
        throw DomainError("ks_statistic: empty sample or malformed reference CDF");
    std::sort(sample.begin(), sample.end());
    auto ref = [&](double x) {
        if (x <= grid.front())
            return cdf.front();
        if (x >= grid.back())
            return cdf.back();
        const auto it = std::upper_bound(grid.begin(), grid.end(), x);
        const std::size_t hi = static_cast<std::size_t>(it - grid.begin());
        const std::size_t lo = hi - 1;
        const double w = (x - grid[lo]) / (grid[hi] - grid[lo]);
        return cdf[lo] + w * (cdf[hi] - cdf[lo]);
    };
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = ref(sample[i]);
        d = std::max({d, std::abs((i + 1) / n - f), std::abs(f - i / n)});
    }
    return d;
}

} // namespace warmpref
