#ifndef WARMPREF_COMMON_HPP
#define WARMPREF_COMMON_HPP

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace warmpref {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Rng = std::mt19937_64;

/// Invalid experiment or model configuration (bad sizes, unknown tags, ...).
class ConfigError : public std::invalid_argument {
    public:
        using std::invalid_argument::invalid_argument;
};

/// An argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
    public:
        using std::domain_error::domain_error;
};

/// A numerical failure the caller must know about (singular matrix, underflow).
class NumericalError : public std::runtime_error {
    public:
        using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Seeding
// ---------------------------------------------------------------------------

/// One round of the SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

/// Derives an independent stream seed from a master seed and a counter path.
/// Each component is mixed in turn, so (master, a, b) never collides with
/// (master, b, a) in practice and adding new paths leaves old ones untouched.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

/// Stable 64-bit FNV-1a hash, used to turn string tags into stream ids.
std::uint64_t stable_hash(std::string_view s);

inline Rng make_rng(std::uint64_t seed) { return Rng(splitmix64(seed)); }

// ---------------------------------------------------------------------------
// Scalar numerics
// ---------------------------------------------------------------------------

/// log(1 + exp(x)) without overflow.
double softplus(double x);

/// Logistic function 1 / (1 + exp(-x)), stable for large |x|.
double sigmoid(double x);

/// log(sigmoid(x)) = -softplus(-x).
double log_sigmoid(double x);

/// log(exp(a) + exp(b)) with max-shift.
double log_sum_exp(double a, double b);

/// Standard normal CDF.
double normal_cdf(double x);

/// log N(x; mean, sd^2).
double normal_log_pdf(double x, double mean, double sd);

/// Draws a vector of iid standard normals.
Vector standard_normal(Eigen::Index n, Rng & rng);

/// Draws N(mean, L L^T) given the lower Cholesky factor L.
Vector sample_gaussian(const Vector & mean, const Matrix & chol_lower, Rng & rng);

/// Index of the largest entry; ties go to the lowest index.
Eigen::Index argmax_lowest(const Vector & v);

/// One-sample Kolmogorov-Smirnov statistic between an empirical sample and
/// a CDF tabulated on an increasing grid (linear interpolation between nodes).
double ks_statistic(std::vector<double> sample, const std::vector<double> & grid,
                    const std::vector<double> & cdf);

} // namespace warmpref

#endif
