#ifndef WARMPREF_BANDIT_PS_HPP
#define WARMPREF_BANDIT_PS_HPP

#include <set>

#include <warmpref/model.hpp>

namespace warmpref {

struct GaussianBelief {
    Vector mean;
    Matrix cov;

    static GaussianBelief from_prior(const PriorSpec & prior) { return {prior.mu0, prior.Sigma0}; }
};

/// Joint (theta, vartheta) particle cloud with normalized weights.
struct ParticleBelief {
    Matrix thetas;    ///< d x M
    Matrix varthetas; ///< d x M
    Vector weights;   ///< M, sums to 1
    bool tempered = false; ///< the likelihood had to be flattened to avoid total underflow

    Eigen::Index size() const { return weights.size(); }
    Vector mean_theta() const { return thetas * weights; }
    double ess() const { return 1.0 / weights.squaredNorm(); }
};

struct HistoryStep {
    int arm;
    double reward;
};

struct History {
    std::vector<HistoryStep> steps;

    std::size_t size() const { return steps.size(); }
};

struct StepResult {
    int arm;
    double reward;
};

/// Index of the best arm under a parameter; ties to the lowest index.
int greedy_arm(const std::vector<Vector> & actions, const Vector & theta);

/// Linear-Gaussian Bayes step. Throws NumericalError if the predictive variance is not positive.
GaussianBelief conjugate_update(const GaussianBelief & belief, const Vector & arm, double reward, double sigma);

/// Posterior sampling with a conjugate Gaussian belief. Updates belief in place.
StepResult vanilla_ps_step(GaussianBelief & belief, const Environment & env, Rng & rng);

/// Thompson sampling with covariance scaled by inflation (inflation -> 0 is greedy on the mean).
StepResult lin_ts_step(GaussianBelief & belief, const Environment & env, Rng & rng, double inflation = 1.0);

/// Arm that a draw from N(mean, inflation * cov) would select.
int sample_gaussian_arm(const GaussianBelief & belief, const std::vector<Vector> & actions, Rng & rng,
                        double inflation = 1.0);

/// Log-likelihood of D0 given a rater estimate.
double offline_log_likelihood(const OfflinePrefDataset & D0, const std::vector<Vector> & actions,
                              const Vector & vartheta, double beta);

/// Importance-weighted particle approximation of the informed prior.
ParticleBelief informed_prior_particles(const PriorSpec & prior, double lambda, double beta,
                                        const OfflinePrefDataset & D0, const std::vector<Vector> & actions,
                                        int M, Rng & rng);

/// Systematic resampling to uniform weights (unconditional).
ParticleBelief sir_resample(const ParticleBelief & belief, Rng & rng);

/// Resamples only if ESS < M * threshold_frac. Returns true when it resampled.
bool maybe_resample(ParticleBelief & belief, Rng & rng, double threshold_frac = 0.5);

/// Draws one particle index by weight.
int sample_particle(const ParticleBelief & belief, Rng & rng);

/// Multiplies weights by the Gaussian reward likelihood of (arm, reward) and renormalizes.
void reweight_reward(ParticleBelief & belief, const Vector & arm, double reward, double sigma);

/// One step of the particle warmPref-PS learner. Updates belief in place.
StepResult warmpref_ps_step(ParticleBelief & belief, const Environment & env, double sigma, Rng & rng,
                            double ess_frac = 0.5);

/// Arms that won at least once, plus arms never compared.
std::set<int> build_info_set(const OfflinePrefDataset & D0, int K);

struct GridSpec {
    int points_per_axis = 2049; ///< outer theta lattice, at least 256
    double half_width_sd = 8.0; ///< lattice spans mu0 +- half_width_sd * sqrt(Sigma0_ii)
};

struct GridPosterior {
    std::vector<Vector> axes; ///< one per dimension
    Vector mass;              ///< normalized probability per lattice node, first axis fastest
    Vector arm_opt_prob;      ///< P(a_i = A* | D0, history)
    Vector mean;              ///< posterior mean of theta

    /// Marginal CDF of theta_0 at the lattice nodes (d = 1 use).
    std::vector<double> cdf_first_axis() const;
};

/// Lattice quadrature of the informed posterior for d <= 2.
///
/// The inner integral over vartheta is a discrete Gaussian convolution on a
/// lattice with the same pitch as the outer grid, extended to cover 8/lambda
/// beyond it. Throws UnsupportedDimension for d > 2.
GridPosterior exact_posterior_grid(const PriorSpec & prior, double lambda, double beta,
                                   const OfflinePrefDataset & D0, const std::vector<Vector> & actions,
                                   const History & history, double sigma, const GridSpec & grid = {});

class UnsupportedDimension : public ConfigError {
    public:
        using ConfigError::ConfigError;
};

} // namespace warmpref

#endif
