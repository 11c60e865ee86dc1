#ifndef WARMPREF_CONFIG_HPP
#define WARMPREF_CONFIG_HPP

#include <map>
#include <string>
#include <vector>

#include <warmpref/optim.hpp>
#include <warmpref/warmtsof.hpp>

namespace warmpref {

/// Flat experiment configuration.
///
/// File grammar: one `key = value` per line; `#` starts a comment; blank lines
/// are ignored; keys are case-sensitive; later assignments win. The same
/// `key=value` form is accepted for command-line overrides.
struct ExperimentConfig {
    std::string mode = "bandit"; ///< bandit | pspl | theory
    std::vector<std::string> algorithms{"vanilla-ps", "lints", "warmpref-exact", "warmpref-boot", "hybrid-dpo"};

    // Bandit problem.
    int K = 50;
    int d = 6;
    int T = 300;
    int N = 20;
    double beta = 10.0;
    double lambda = 100.0;
    double sigma = 1.0;
    std::string arm_norm = "unit"; ///< unit | scaled

    // Learner assumptions (default: the generating values).
    double learner_beta = -1.0;   ///< < 0 means use beta
    double learner_lambda = -1.0; ///< < 0 means use lambda

    int seeds = 20;
    std::uint64_t master_seed = 12345;
    int threads = 0; ///< 0 means hardware concurrency

    int particles = 4096;
    double ess_frac = 0.5;
    double lints_inflation = 1.0;

    OptimizerSpec optimizer;
    FeedbackConfig feedback;

    double dpo_eps = 0.16;
    double dpo_tau = 0.1;
    std::string dpo_min_reward = "oracle"; ///< "oracle" (true min reward) or a number
    int dpo_max_steps = 20000;

    // Tabular preference RL.
    std::string env = "riverswim"; ///< riverswim | random
    int S = 6;
    int A = 2;
    int H = 20;
    int episodes = 200;
    int pspl_N = 1000;
    double pspl_beta = 10.0;
    double pspl_lambda = 50.0;
    double alpha0 = 1.0;
    std::string river_start = "first-two"; ///< first-two | leftmost | uniform
    std::string dirichlet_weight = "sa"; ///< sa | unit
    int eval_every = 1;

    // Theory.
    double T_theory = 500.0;
    double mu_min = 0.1;
    double pspl_B = 1.0;         ///< bound on ||theta|| in the PSPL constants
    double pspl_delta_min = 0.1; ///< minimum return gap in the PSPL constants
    double delta1 = 0.1;         ///< confidence parameter of the simple-regret bound

    std::string out = "results.csv";

    /// Throws ConfigError on unknown keys or bad values.
    void set(const std::string & key, const std::string & value);
    /// Parses "key=value".
    void apply_override(const std::string & kv);
    /// Checks ranges and mode-required fields.
    void validate() const;
    /// Canonical key/value echo (used in the JSON sidecar).
    std::map<std::string, std::string> to_map() const;

    double effective_learner_beta() const { return learner_beta < 0.0 ? beta : learner_beta; }
    double effective_learner_lambda() const { return learner_lambda < 0.0 ? lambda : learner_lambda; }
};

/// Reads a config file into cfg (on top of its current values).
void load_config_file(ExperimentConfig & cfg, const std::string & path);

/// Valid algorithm tags for a mode.
const std::vector<std::string> & valid_algorithms(const std::string & mode);

} // namespace warmpref

#endif
