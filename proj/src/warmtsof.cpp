#include <warmpref/warmtsof.hpp>

#include <cmath>
#include <limits>

namespace warmpref {

void FeedbackConfig::validate() const {
    if (!(cost_c >= 0.0))
        throw ConfigError("feedback: cost must be nonnegative");
    if (!(eps_scale > 0.0))
        throw ConfigError("feedback: eps_scale must be positive");
}

double get_epsilon(const FeedbackConfig & cfg, int t, double lambda, double beta) {
    (void)lambda;
    (void)beta;
    if (t < 1)
        throw DomainError("get_epsilon: t must be at least 1");
    cfg.validate();
    if (std::isinf(cfg.cost_c))
        return 0.0;
    const double tp = static_cast<double>(t) + 1.0;
    return cfg.eps_scale * std::sqrt(std::log(tp) / tp) / (1.0 + cfg.cost_c);
}

TsofStepResult warmtsof_step(LossParams & p, const Environment & env, const Rater & rater, const FeedbackConfig & cfg,
                             int t, Rng & rng, const OptimizerSpec & opt) {
    const int K = static_cast<int>(p.actions.size());
    if (K < 2)
        throw ConfigError("warmtsof: need at least two arms");
    PerturbationSet pert = perturb(p, rng);
    MapResult m = perturbed_map(p, pert, opt);
    bool converged = m.converged;

    // Top two arms under the sampled parameter, ties to the lowest index.
    int a1 = -1, a2 = -1;
    double v1 = -std::numeric_limits<double>::infinity(), v2 = v1;
    for (int k = 0; k < K; ++k) {
        const double v = p.actions[k].dot(m.theta);
        if (v > v1) {
            a2 = a1;
            v2 = v1;
            a1 = k;
            v1 = v;
        } else if (v > v2) {
            a2 = k;
            v2 = v;
        }
    }

    const double eps = get_epsilon(cfg, t, p.lambda, p.beta);
    bool queried = false;
    int arm = a1;
    if (std::abs(v1 - v2) < eps) {
        queried = true;
        const int y = sample_preference(p.actions[a1], p.actions[a2], rater, rng);
        p.D0.entries.push_back({a1, a2, y});
        std::bernoulli_distribution coin(0.5);
        pert.omega.push_back(coin(rng) ? 1.0 : 0.0);
        m = perturbed_map(p, pert, opt, &m.x);
        converged = converged && m.converged;
        arm = greedy_arm(p.actions, m.theta);
    }
    const double r = reward_sample(env, arm, rng);
    p.history.steps.push_back({arm, r});
    const double cost = queried ? cfg.cost_c : 0.0;
    return {arm, r, r - cost, queried, converged};
}

} // namespace warmpref
