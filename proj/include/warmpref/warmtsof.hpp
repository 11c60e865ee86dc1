#ifndef WARMPREF_WARMTSOF_HPP
#define WARMPREF_WARMTSOF_HPP

#include <warmpref/bootstrap.hpp>

namespace warmpref {

struct FeedbackConfig {
    double cost_c = 0.0;
    double eps_scale = 1.0;

    void validate() const;
};

/// Query threshold eps_t = c0 * sqrt(ln(t+1) / (t+1)) / (1 + cost_c).
/// lambda and beta are accepted for interface stability and do not enter the schedule.
double get_epsilon(const FeedbackConfig & cfg, int t, double lambda, double beta);

struct TsofStepResult {
    int arm;
    double reward;     ///< raw reward
    double net_reward; ///< reward - cost charged this step
    bool queried;
    bool converged;
};

/// One warmTSOF step at round t >= 1. A queried pair is appended to p.D0 and
/// labeled by the same rater; p.history grows by the played step.
TsofStepResult warmtsof_step(LossParams & p, const Environment & env, const Rater & rater, const FeedbackConfig & cfg,
                             int t, Rng & rng, const OptimizerSpec & opt = {});

} // namespace warmpref

#endif
