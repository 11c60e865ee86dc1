#ifndef WARMPREF_BOOTSTRAP_HPP
#define WARMPREF_BOOTSTRAP_HPP

#include <warmpref/bandit_ps.hpp>
#include <warmpref/optim.hpp>

namespace warmpref {

/// Additional offline rater with its own estimate block in the loss.
struct ExtraRater {
    double beta = 0.0;
    double lambda = 1.0;
    OfflinePrefDataset data;
};

struct LossParams {
    double beta = 0.0;
    double lambda = 1.0;
    PriorSpec prior;
    std::vector<Vector> actions;
    OfflinePrefDataset D0;
    History history;
    double noise_sigma = 1.0; ///< reward noise; the online term is scaled by 1 / sigma^2
    std::vector<ExtraRater> extra_raters;

    Eigen::Index dim() const { return prior.dim(); }
    /// Length of the optimization variable: theta, vartheta, then one block per extra rater.
    Eigen::Index n_vars() const { return dim() * (2 + static_cast<Eigen::Index>(extra_raters.size())); }
    void validate() const;
};

struct PerturbationSet {
    Vector zeta;                ///< one per history step
    std::vector<double> omega;  ///< one per D0 entry
    Vector theta_prime;
    Vector vartheta_prime;
    std::vector<std::vector<double>> extra_omega;
    std::vector<Vector> extra_vartheta_prime;

    /// zeta = 0, omega = 1, primes = 0: the plain MAP problem.
    static PerturbationSet none(const LossParams & p);
};

struct LossValue {
    double value;
    Vector gradient;
};

/// Perturbed surrogate loss at the stacked variable x. Fills grad and hess when non-null.
double perturbed_loss(const Vector & x, const LossParams & p, const PerturbationSet & pert, Vector * grad,
                      Matrix * hess);

/// Unperturbed loss at (theta, vartheta); gradient is over the stacked (theta, vartheta).
/// Extra raters are ignored here; use perturbed_loss with PerturbationSet::none for those.
LossValue surrogate_loss(const Vector & theta, const Vector & vartheta, const LossParams & p);

/// Fresh perturbations: zeta ~ N(0, sigma^2), omega ~ Bern(0.5),
/// theta' ~ N(0, Sigma0), vartheta' ~ N(0, I / lambda^2).
PerturbationSet perturb(const LossParams & p, Rng & rng);
PerturbationSet perturb(const LossParams & p, std::uint64_t seed);

struct MapResult {
    Vector theta;
    Vector vartheta;
    Vector x; ///< full stacked minimizer
    bool converged = false;
    int iters = 0;
};

/// Minimizes the perturbed loss. x0 overrides the initial point chosen by opt.init.
MapResult perturbed_map(const LossParams & p, const PerturbationSet & pert, const OptimizerSpec & opt = {},
                        const Vector * x0 = nullptr);

struct BootStepResult {
    int arm;
    double reward;
    bool converged;
};

/// perturb -> perturbed MAP -> greedy arm -> reward -> append to history.
/// warm holds the previous minimizer for OptimizerSpec::Init::WarmStart.
BootStepResult bootstrapped_step(LossParams & p, const Environment & env, Rng & rng,
                                 const OptimizerSpec & opt = {}, Vector * warm = nullptr);

/// MLE of v = beta * vartheta from D0 with ridge 1e-6; returns ||v||.
/// prior and lambda do not enter the fit under the unit-norm convention.
double estimate_beta_mle(const OfflinePrefDataset & D0, const std::vector<Vector> & actions,
                         const PriorSpec & prior, double lambda);

struct EntropyEstimate {
    double beta_hat;
    double entropy;
    bool capped = false;
};

/// beta_hat = c / H where H is the Shannon entropy of arm occurrences in D0.
EntropyEstimate estimate_beta_entropy(const OfflinePrefDataset & D0, int K, double c, double beta_max = 1e6);

} // namespace warmpref

#endif
