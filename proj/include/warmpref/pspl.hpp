#ifndef WARMPREF_PSPL_HPP
#define WARMPREF_PSPL_HPP

#include <utility>

#include <warmpref/model.hpp>
#include <warmpref/optim.hpp>

namespace warmpref {

struct TabularMDP {
    int S = 0;
    int A = 0;
    int H = 0;
    std::vector<double> trans; ///< S*A*S, index (s*A + a)*S + s2
    Matrix reward;             ///< S x A, entries in [0,1]
    Vector rho;                ///< initial-state distribution

    double P(int s, int a, int s2) const { return trans[(static_cast<std::size_t>(s) * A + a) * S + s2]; }
    double & P(int s, int a, int s2) { return trans[(static_cast<std::size_t>(s) * A + a) * S + s2]; }
    /// Reward as a flat parameter vector, index s*A + a.
    Vector theta() const;
    void validate() const;
};

/// Initial-state convention for RiverSwim.
enum class RiverStart {
    FirstTwo, ///< uniform over states {0, 1}
    Leftmost, ///< always state 0
    Uniform,  ///< uniform over all states
};

/// Chain MDP with actions 0 = left, 1 = right.
TabularMDP riverswim_env(int S, int H, RiverStart start = RiverStart::FirstTwo);

/// Dirichlet(1) transition rows, U[0,1] rewards, uniform start.
TabularMDP random_mdp(int S, int A, int H, Rng & rng);

struct Trajectory {
    std::vector<std::pair<int, int>> steps; ///< (state, action) for h = 1..H
};

struct TrajPrefEntry {
    Trajectory tau0;
    Trajectory tau1;
    int y; ///< 0 means tau0 was preferred
};

struct TrajPrefDataset {
    std::vector<TrajPrefEntry> entries;

    std::size_t size() const { return entries.size(); }
    bool empty() const { return entries.empty(); }
};

struct PolicyTable {
    int H = 0;
    int S = 0;
    int A = 0;
    std::vector<double> probs; ///< index (h*S + s)*A + a, h zero-based

    double p(int h, int s, int a) const { return probs[(static_cast<std::size_t>(h) * S + s) * A + a]; }
    double & p(int h, int s, int a) { return probs[(static_cast<std::size_t>(h) * S + s) * A + a]; }
    static PolicyTable uniform(int H, int S, int A);
    /// Throws ConfigError unless every row is a distribution.
    void validate() const;
};

/// Counts of (s, a) pairs scaled by 1/H, so the L1 norm is 1.
Vector trajectory_embedding(const Trajectory & tau, int S, int A);

/// sigma(beta <phi(tau0) - phi(tau1), vartheta>).
double traj_preference_prob(const Trajectory & tau0, const Trajectory & tau1, const Vector & vartheta, double beta,
                            int S, int A);

/// Sum of r(s_h, a_h) along the trajectory.
double trajectory_return(const TabularMDP & mdp, const Trajectory & tau);

Trajectory rollout(const TabularMDP & mdp, const PolicyTable & policy, Rng & rng);

/// Rolls out 2N behavior trajectories, pairs them consecutively and labels each pair.
TrajPrefDataset generate_offline_trajectories(const TabularMDP & mdp, const PolicyTable & behavior,
                                              const Rater & rater, int N, Rng & rng);

struct DirichletBelief {
    int S = 0;
    int A = 0;
    std::vector<double> alpha; ///< S*A*S, same layout as TabularMDP::trans

    double & at(int s, int a, int s2) { return alpha[(static_cast<std::size_t>(s) * A + a) * S + s2]; }
    double at(int s, int a, int s2) const { return alpha[(static_cast<std::size_t>(s) * A + a) * S + s2]; }
    std::vector<double> mean() const;
    /// Per-row mode where it exists; rows with some alpha <= 1 use max(alpha - 1, 0), then the mean.
    std::vector<double> mode() const;
    std::vector<double> sample(Rng & rng) const;
};

/// Adds the H-1 observed transitions of tau with weight w.
void add_transitions(std::vector<double> & counts, const Trajectory & tau, int S, int A, double w = 1.0);

/// alpha = alpha0 + transition counts over every offline trajectory.
DirichletBelief informed_prior_eta(const TrajPrefDataset & D0, int S, int A, double alpha0 = 1.0);

struct PlanResult {
    PolicyTable policy;
    Matrix V; ///< (H+1) x S, row H is zero
};

/// Backward induction with greedy deterministic policy; ties to the lowest action.
PlanResult finite_horizon_plan(const Matrix & reward_hat, const std::vector<double> & trans_hat, int H);

/// Exact value table of a (possibly stochastic) policy, (H+1) x S.
Matrix policy_value(const TabularMDP & mdp, const PolicyTable & policy);

/// Expected return under rho.
double expected_return(const TabularMDP & mdp, const PolicyTable & policy);

struct SimpleRegret {
    double exact = 0.0;
    double sampled = 0.0;
    double sampled_se = 0.0;
};

/// V*(rho) - V^pi(rho) by dynamic programming; trials > 0 adds a rollout estimate.
SimpleRegret simple_regret(const TabularMDP & mdp, const PolicyTable & policy, int trials, Rng * rng = nullptr);

enum class OfflinePolicyRule {
    NetCount, ///< decided iff sum_a c_h(s,a) >= delta N
    Visits,   ///< decided iff sum_a (w_h + l_h)(s,a) >= delta N
};

/// Offline optimal-policy estimate from winning minus losing counts.
PolicyTable estimate_optimal_policy_offline(const TrajPrefDataset & D0, int S, int A, int H, double delta,
                                            OfflinePolicyRule rule = OfflinePolicyRule::NetCount);

/// Set of optimal actions per (h, s) for the true MDP, within tol.
std::vector<std::vector<char>> optimal_action_sets(const TabularMDP & mdp, double tol = 1e-12);

/// States with positive probability at step h under pi*, per h.
std::vector<std::vector<char>> reachable_under_optimal(const TabularMDP & mdp);

struct VisitationMinima {
    double p_min = 0.0;      ///< min over (h, s) of max over policies of P(s_h = s)
    double p_star_min = 0.0; ///< min over pi*-reachable (h, s) of P(s_h = s) under pi*
};

/// Analysis-only diagnostic; drives no algorithm.
VisitationMinima visitation_minima(const TabularMDP & mdp);

// ---------------------------------------------------------------------------
// Posterior sampling for preference learning
// ---------------------------------------------------------------------------

enum class EtaMode {
    ExactDirichlet, ///< eta sampled from the Dirichlet posterior
    Bootstrap,      ///< eta from the perturbed closed-form minimizer
};

enum class DirichletPriorWeight {
    StateActionScaled, ///< -S*A * sum (alpha0 - 1) ln eta
    Unit,              ///< -sum (alpha0 - 1) ln eta
};

struct PsplParams {
    double beta = 10.0;
    double lambda = 50.0;
    double alpha0 = 1.0;
    PriorSpec prior; ///< over theta in R^{S*A}; N(0, I) when empty
    EtaMode eta_mode = EtaMode::ExactDirichlet;
    DirichletPriorWeight prior_weight = DirichletPriorWeight::StateActionScaled;
    double zeta_p = 0.75;  ///< online weight Bernoulli parameter
    double omega_p = 0.6;  ///< offline weight Bernoulli parameter
    OptimizerSpec opt;
};

/// Preference and transition data in the form the loss consumes.
struct PsplData {
    int S = 0;
    int A = 0;
    Matrix offline_deltas; ///< SA x N, columns phi(loser) - phi(winner)
    Matrix online_deltas;  ///< SA x k
    std::vector<std::vector<double>> offline_counts; ///< per pair, S*A*S transition counts
    std::vector<std::vector<double>> online_counts;

    void add_offline(const TrajPrefEntry & e);
    void add_online(const TrajPrefEntry & e);
};

struct PsplPerturbation {
    Vector zeta;  ///< online weights
    Vector omega; ///< offline weights
    Vector theta_prime;
    Vector vartheta_prime;

    static PsplPerturbation none(const PsplData & data, Eigen::Index dim);
};

struct PsplLossValue {
    double value;
    Vector gradient; ///< over (theta, vartheta)
};

/// Three-term loss. eta must be positive wherever a weighted count or prior term is nonzero.
PsplLossValue pspl_surrogate_loss(const Vector & theta, const Vector & vartheta, const std::vector<double> & eta,
                                  const PsplData & data, const PsplParams & params, const PsplPerturbation & pert);

/// Closed-form minimizer of the eta part: per-row normalized max(0, w (alpha0-1) + weighted counts),
/// uniform on empty rows.
std::vector<double> pspl_eta_map(const PsplData & data, const PsplParams & params, const PsplPerturbation & pert);

struct PsplMap {
    Vector theta;
    Vector vartheta;
    bool converged;
};

/// Minimizer of the (theta, vartheta) part.
PsplMap pspl_theta_map(const PsplData & data, const PsplParams & params, const PsplPerturbation & pert);

struct EpisodeResult {
    Trajectory tau0;
    Trajectory tau1;
    int y;
    bool converged;
};

/// Top-two posterior sampling learner over a fixed tabular MDP shape.
class PsplLearner {
    public:
        PsplLearner(int S, int A, int H, const TrajPrefDataset & D0, PsplParams params);

        /// Samples two (theta, eta), plans, rolls out both, asks the rater and updates.
        EpisodeResult episode(const TabularMDP & mdp, const Rater & rater, Rng & rng);

        /// Policy from the unperturbed theta MAP and the Dirichlet mode.
        PolicyTable output_policy() const;

        const DirichletBelief & dirichlet() const { return dirichlet_; }
        const PsplData & data() const { return data_; }
        const PsplParams & params() const { return params_; }
        int episodes() const { return static_cast<int>(data_.online_counts.size()); }
        bool all_converged() const { return all_converged_; }

    private:
        PsplPerturbation draw_perturbation(Rng & rng) const;

        int S_, A_, H_;
        PsplParams params_;
        PsplData data_;
        DirichletBelief dirichlet_;
        bool all_converged_ = true;
};

/// One episode of the learner (thin wrapper kept for symmetry with the bandit steps).
EpisodeResult pspl_episode(PsplLearner & learner, const TabularMDP & mdp, const Rater & rater, Rng & rng);

} // namespace warmpref

#endif
