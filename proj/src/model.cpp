#include <warmpref/model.hpp>

#include <algorithm>
#include <cmath>

namespace warmpref {

PriorSpec PriorSpec::standard(Eigen::Index d) {
    return PriorSpec{Vector::Zero(d), Matrix::Identity(d, d)};
}

void PriorSpec::validate() const {
    if (mu0.size() < 1)
        throw ConfigError("prior: dimension must be at least 1");
    if (Sigma0.rows() != mu0.size() || Sigma0.cols() != mu0.size())
        throw ConfigError("prior: Sigma0 must be d x d");
    if (!Sigma0.isApprox(Sigma0.transpose(), 1e-12))
        throw ConfigError("prior: Sigma0 must be symmetric");
    Eigen::LLT<Matrix> llt(Sigma0);
    if (llt.info() != Eigen::Success)
        throw ConfigError("prior: Sigma0 must be positive definite");
}

Matrix PriorSpec::chol() const {
    Eigen::LLT<Matrix> llt(Sigma0);
    if (llt.info() != Eigen::Success)
        throw NumericalError("prior: Cholesky factorization of Sigma0 failed");
    return llt.matrixL();
}

double Environment::mean_reward(int arm) const {
    if (arm < 0 || arm >= K())
        throw DomainError("arm index out of range");
    return actions[arm].dot(theta);
}

int Environment::best_arm() const {
    int best = 0;
    double v = mean_reward(0);
    for (int i = 1; i < K(); ++i) {
        const double r = mean_reward(i);
        if (r > v) {
            v = r;
            best = i;
        }
    }
    return best;
}

double Environment::gap(int arm) const { return mean_reward(best_arm()) - mean_reward(arm); }

void Environment::validate() const {
    if (K() < 2)
        throw ConfigError("environment: need K >= 2 arms");
    if (dim() < 1)
        throw ConfigError("environment: need d >= 1");
    if (!(noise_sigma >= 0.0))
        throw ConfigError("environment: noise_sigma must be nonnegative");
    for (const auto & a : actions) {
        if (a.size() != dim())
            throw ConfigError("environment: arm dimension mismatch");
        if (a.norm() > 1.0 + 1e-12)
            throw ConfigError("environment: arm norm exceeds 1");
    }
}

SamplingDist::SamplingDist(Vector weights) : weights_(std::move(weights)) {
    if (weights_.size() < 1)
        throw ConfigError("sampling distribution: empty support");
    for (Eigen::Index i = 0; i < weights_.size(); ++i)
        if (!(weights_[i] > 0.0 && weights_[i] < 1.0) && weights_.size() > 1)
            throw ConfigError("sampling distribution: weights must lie in (0,1)");
    if (std::abs(weights_.sum() - 1.0) > 1e-9)
        throw ConfigError("sampling distribution: weights must sum to 1");
    cumulative_.resize(weights_.size());
    double acc = 0.0;
    for (Eigen::Index i = 0; i < weights_.size(); ++i) {
        acc += weights_[i];
        cumulative_[i] = acc;
    }
    cumulative_.back() = 1.0;
}

SamplingDist SamplingDist::uniform(int K) {
    if (K < 1)
        throw ConfigError("sampling distribution: K must be positive");
    return SamplingDist(Vector::Constant(K, 1.0 / K));
}

int SamplingDist::sample(Rng & rng) const {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double x = u(rng);
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), x);
    return static_cast<int>(std::min<std::ptrdiff_t>(it - cumulative_.begin(),
                                                     static_cast<std::ptrdiff_t>(cumulative_.size()) - 1));
}

void OfflinePrefDataset::validate(int K) const {
    for (const auto & e : entries) {
        if (e.idx0 < 0 || e.idx0 >= K || e.idx1 < 0 || e.idx1 >= K)
            throw ConfigError("dataset: arm index out of range");
        if (e.y != 0 && e.y != 1)
            throw ConfigError("dataset: label must be 0 or 1");
    }
}

Environment sample_environment(int d, int K, Rng & rng, const PriorSpec & prior, double noise_sigma,
                               ArmNorm norm) {
    if (d < 1 || K < 2)
        throw ConfigError("sample_environment: need d >= 1 and K >= 2");
    if (prior.dim() != d)
        throw ConfigError("sample_environment: prior dimension does not match d");
    const double radius = norm == ArmNorm::UnitSphere ? 1.0 : 1.0 / std::sqrt(static_cast<double>(d));
    Environment env;
    env.noise_sigma = noise_sigma;
    env.actions.reserve(K);
    for (int k = 0; k < K; ++k) {
        Vector a = standard_normal(d, rng);
        double n = a.norm();
        while (n == 0.0) {
            a = standard_normal(d, rng);
            n = a.norm();
        }
        env.actions.push_back(a * (radius / n));
    }
    env.theta = sample_gaussian(prior.mu0, prior.chol(), rng);
    env.validate();
    return env;
}

Environment sample_environment(int d, int K, std::uint64_t seed) {
    if (d < 1 || K < 2)
        throw ConfigError("sample_environment: need d >= 1 and K >= 2");
    Rng rng = make_rng(seed);
    return sample_environment(d, K, rng, PriorSpec::standard(d));
}

Vector rater_estimate(const Vector & theta, double lambda, Rng & rng) {
    if (!(lambda > 0.0))
        throw DomainError("rater_estimate: lambda must be positive");
    return theta + standard_normal(theta.size(), rng) / lambda;
}

Vector rater_estimate(const Vector & theta, double lambda, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    return rater_estimate(theta, lambda, rng);
}

Rater make_rater(const Vector & theta, double beta, double lambda, Rng & rng) {
    if (!(beta >= 0.0))
        throw DomainError("rater: beta must be nonnegative");
    return Rater{beta, lambda, rater_estimate(theta, lambda, rng)};
}

double preference_prob(const Vector & a0, const Vector & a1, const Vector & vartheta, double beta) {
    // exp(u0) / (exp(u0) + exp(u1)) = sigma(u0 - u1); computing the difference
    // first keeps the complement exact.
    if (beta == 0.0)
        return 0.5;
    const double u = beta * (a0.dot(vartheta) - a1.dot(vartheta));
    return sigmoid(u);
}

int sample_preference(const Vector & a0, const Vector & a1, const Rater & rater, Rng & rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return u(rng) < preference_prob(a0, a1, rater.vartheta, rater.beta) ? 0 : 1;
}

OfflinePrefDataset generate_offline_dataset(const Environment & env, const Rater & rater,
                                            const SamplingDist & mu, int N, Rng & rng) {
    if (N < 0)
        throw ConfigError("generate_offline_dataset: N must be nonnegative");
    if (mu.K() != env.K())
        throw ConfigError("generate_offline_dataset: sampling distribution has wrong support");
    OfflinePrefDataset D;
    D.entries.reserve(N);
    for (int n = 0; n < N; ++n) {
        const int i0 = mu.sample(rng);
        const int i1 = mu.sample(rng);
        const int y = sample_preference(env.actions[i0], env.actions[i1], rater, rng);
        D.entries.push_back({i0, i1, y});
    }
    return D;
}

OfflinePrefDataset generate_offline_dataset(const Environment & env, const Rater & rater,
                                            const SamplingDist & mu, int N, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    return generate_offline_dataset(env, rater, mu, N, rng);
}

double reward_sample(const Environment & env, int arm, Rng & rng) {
    const double mean = env.mean_reward(arm);
    if (env.noise_sigma == 0.0)
        return mean;
    std::normal_distribution<double> noise(0.0, env.noise_sigma);
    return mean + noise(rng);
}

double reward_sample(const Environment & env, int arm, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    return reward_sample(env, arm, rng);
}

} // namespace warmpref
