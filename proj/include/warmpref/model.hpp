#ifndef WARMPREF_MODEL_HPP
#define WARMPREF_MODEL_HPP

#include <warmpref/common.hpp>

namespace warmpref {

/// Norm convention applied to freshly drawn arms.
enum class ArmNorm {
    UnitSphere,   ///< ||a||_2 = 1
    ScaledSphere, ///< ||a||_2 = 1/sqrt(d), so ||a||_1 <= 1
};

struct PriorSpec {
    Vector mu0;
    Matrix Sigma0;

    /// N(0, I_d).
    static PriorSpec standard(Eigen::Index d);

    Eigen::Index dim() const { return mu0.size(); }
    /// Throws ConfigError unless Sigma0 is symmetric positive definite and sizes agree.
    void validate() const;
    /// Lower Cholesky factor of Sigma0.
    Matrix chol() const;
};

struct Environment {
    Vector theta;
    std::vector<Vector> actions;
    double noise_sigma = 1.0;

    int K() const { return static_cast<int>(actions.size()); }
    Eigen::Index dim() const { return theta.size(); }

    double mean_reward(int arm) const;
    /// Arm with the largest mean reward; ties go to the lowest index.
    int best_arm() const;
    /// <A* - a, theta> >= 0.
    double gap(int arm) const;

    /// Throws ConfigError on K < 2, d < 1, mismatched lengths, ||a|| > 1 or sigma < 0.
    void validate() const;
};

struct Rater {
    double beta = 0.0;
    double lambda = 1.0;
    Vector vartheta;
};

class SamplingDist {
    public:
        explicit SamplingDist(Vector weights);
        static SamplingDist uniform(int K);

        const Vector & weights() const { return weights_; }
        int K() const { return static_cast<int>(weights_.size()); }
        double mu_min() const { return weights_.minCoeff(); }
        double mu_max() const { return weights_.maxCoeff(); }

        int sample(Rng & rng) const;

    private:
        Vector weights_;
        std::vector<double> cumulative_;
};

struct PrefEntry {
    int idx0;
    int idx1;
    int y; ///< 0 means idx0 was preferred.

    int winner() const { return y == 0 ? idx0 : idx1; }
    int loser() const { return y == 0 ? idx1 : idx0; }

    bool operator==(const PrefEntry &) const = default;
};

struct OfflinePrefDataset {
    std::vector<PrefEntry> entries;

    std::size_t size() const { return entries.size(); }
    bool empty() const { return entries.empty(); }
    /// Throws ConfigError if any index is outside [0, K) or y is not a bit.
    void validate(int K) const;
};

/// Draws K arms uniformly on the sphere and theta from the prior.
Environment sample_environment(int d, int K, Rng & rng, const PriorSpec & prior,
                               double noise_sigma = 1.0, ArmNorm norm = ArmNorm::UnitSphere);
Environment sample_environment(int d, int K, std::uint64_t seed);

/// One draw of the rater's estimate vartheta ~ N(theta, I / lambda^2).
Vector rater_estimate(const Vector & theta, double lambda, Rng & rng);
Vector rater_estimate(const Vector & theta, double lambda, std::uint64_t seed);

/// Rater with a freshly drawn estimate of theta.
Rater make_rater(const Vector & theta, double beta, double lambda, Rng & rng);

/// P(a0 preferred over a1) = sigma(beta <a0 - a1, vartheta>).
double preference_prob(const Vector & a0, const Vector & a1, const Vector & vartheta, double beta);

/// Draws Y for one pair (0 means a0 preferred).
int sample_preference(const Vector & a0, const Vector & a1, const Rater & rater, Rng & rng);

OfflinePrefDataset generate_offline_dataset(const Environment & env, const Rater & rater,
                                            const SamplingDist & mu, int N, Rng & rng);
OfflinePrefDataset generate_offline_dataset(const Environment & env, const Rater & rater,
                                            const SamplingDist & mu, int N, std::uint64_t seed);

double reward_sample(const Environment & env, int arm, Rng & rng);
double reward_sample(const Environment & env, int arm, std::uint64_t seed);

} // namespace warmpref

#endif
