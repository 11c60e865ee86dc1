#ifndef WARMPREF_HARNESS_HPP
#define WARMPREF_HARNESS_HPP

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <warmpref/config.hpp>
#include <warmpref/model.hpp>
#include <warmpref/pspl.hpp>

namespace warmpref {

/// One row of the results CSV.
///
/// Bandit mode: action is the played arm and inst_regret = <A* - A_t, theta>
/// (plus the feedback cost on a warmTSOF query step).
/// PSPL mode: t is the episode, action is the preference label y of that
/// episode, reward is the return of the first trajectory and inst_regret is
/// the exact simple regret of the output policy after the episode.
struct RunRecord {
    int seed;
    int t;
    std::string algo;
    int action;
    double reward;
    double inst_regret;
    double cum_regret;
};

/// Counters for numerical-failure conditions seen during a run.
struct NumericalFlags {
    long optimizer_nonconverged = 0;
    long particles_tempered = 0;

    bool any() const { return optimizer_nonconverged > 0 || particles_tempered > 0; }
    NumericalFlags & operator+=(const NumericalFlags & o);
};

struct RunOutput {
    std::vector<RunRecord> records; ///< sorted by (seed, algorithm order, t)
    NumericalFlags flags;
};

/// The per-seed problem instance shared by all algorithms.
struct BanditInstance {
    Environment env;
    Rater rater;
    OfflinePrefDataset D0;
    PriorSpec prior;
};

/// Environment, rater and D0 for one seed index, each from its own stream.
BanditInstance make_bandit_instance(const ExperimentConfig & cfg, int seed);

/// Random stream for (seed, algorithm); independent of which other algorithms are listed.
Rng algorithm_rng(std::uint64_t master, int seed, const std::string & tag);

/// Runs one bandit algorithm for cfg.T rounds on a fixed instance.
std::vector<RunRecord> run_bandit_algorithm(const ExperimentConfig & cfg, const BanditInstance & inst,
                                            const std::string & tag, int seed, NumericalFlags & flags);

/// Runs every listed algorithm over every seed (bandit or pspl mode).
RunOutput run_experiment(const ExperimentConfig & cfg);

struct DpoResult {
    std::vector<int> actions;
    std::vector<double> rewards;
    Vector fitted_reward; ///< offline reward estimate after the shift
    bool fit_converged;
};

/// Softmax-policy DPO fit on D0 with a uniform reference, then epsilon-greedy
/// online refinement with per-arm running means. The offline estimate counts as
/// one pseudo-observation in each running mean.
DpoResult hybrid_dpo_baseline(const OfflinePrefDataset & D0, const Environment & env, double eps, int T, double tau,
                              double min_reward, Rng & rng, int max_steps = 20000);

/// Fitted reward r(a) = tau * log(pi(a) / pi_ref(a)), before the shift.
Vector dpo_fit_reward(const OfflinePrefDataset & D0, int K, double tau, int max_steps, bool * converged = nullptr);

struct SummaryRow {
    std::string algo;
    int t;
    int n;
    double mean_cum_regret;
    double std_cum_regret;
    double reduction_vs_vanilla; ///< 1 - mean(algo)/mean(vanilla-ps) at the final t; NaN elsewhere
};

/// Per (algorithm, t) mean and sample standard deviation of the cumulative regret.
std::vector<SummaryRow> summarize(const std::vector<RunRecord> & records);

void write_csv(std::ostream & os, const std::vector<RunRecord> & records);
void write_summary_csv(std::ostream & os, const std::vector<SummaryRow> & rows);
/// JSON sidecar: config echo, wall time, versions, numerical flags.
void write_metadata(std::ostream & os, const ExperimentConfig & cfg, double wall_seconds, const NumericalFlags & flags);

} // namespace warmpref

#endif
