#include <warmpref/harness.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include <json.hpp>

#include <warmpref/bandit_ps.hpp>
#include <warmpref/bootstrap.hpp>
#include <warmpref/warmtsof.hpp>

namespace warmpref {

NumericalFlags & NumericalFlags::operator+=(const NumericalFlags & o) {
    optimizer_nonconverged += o.optimizer_nonconverged;
    particles_tempered += o.particles_tempered;
    return *this;
}

Rng algorithm_rng(std::uint64_t master, int seed, const std::string & tag) {
    return make_rng(derive_seed(master, static_cast<std::uint64_t>(seed), stable_hash(tag)));
}

BanditInstance make_bandit_instance(const ExperimentConfig & cfg, int seed) {
    BanditInstance inst;
    inst.prior = PriorSpec::standard(cfg.d);
    Rng env_rng = algorithm_rng(cfg.master_seed, seed, "env");
    inst.env = sample_environment(cfg.d, cfg.K, env_rng, inst.prior, cfg.sigma,
                                  cfg.arm_norm == "unit" ? ArmNorm::UnitSphere : ArmNorm::ScaledSphere);
    Rng rater_rng = algorithm_rng(cfg.master_seed, seed, "rater");
    inst.rater = make_rater(inst.env.theta, cfg.beta, cfg.lambda, rater_rng);
    Rng data_rng = algorithm_rng(cfg.master_seed, seed, "dataset");
    inst.D0 = generate_offline_dataset(inst.env, inst.rater, SamplingDist::uniform(cfg.K), cfg.N, data_rng);
    return inst;
}

// ---------------------------------------------------------------------------
// Hybrid-DPO
// ---------------------------------------------------------------------------

Vector dpo_fit_reward(const OfflinePrefDataset & D0, int K, double tau, int max_steps, bool * converged) {
    if (K < 1 || !(tau > 0.0) || max_steps < 1)
        throw ConfigError("dpo: need K >= 1, tau > 0, max_steps >= 1");
    D0.validate(K);
    const double n = std::max<double>(1.0, static_cast<double>(D0.size()));
    // Mean DPO loss over logits psi with a uniform reference:
    // softplus(-tau (psi_w - psi_l)); the log-normalizer cancels within a pair.
    const Objective f = [&](const Vector & psi, Vector * g, Matrix *) {
        double v = 0.0;
        if (g)
            g->setZero(psi.size());
        for (const auto & e : D0.entries) {
            const double m = tau * (psi[e.winner()] - psi[e.loser()]);
            v += softplus(-m);
            if (g) {
                const double s = -tau * sigmoid(-m) / n;
                (*g)[e.winner()] += s;
                (*g)[e.loser()] -= s;
            }
        }
        return v / n;
    };
    Vector psi = Vector::Zero(K);
    bool conv = true;
    if (!D0.empty()) {
        OptimizerSpec spec;
        spec.method = OptimizerSpec::Method::GradientDescent;
        spec.max_iters = max_steps;
        spec.grad_tol = 1e-6;
        const OptimResult res = minimize(f, psi, spec);
        psi = res.x;
        conv = res.converged;
    }
    if (converged)
        *converged = conv;
    const double lse = std::log((psi.array() - psi.maxCoeff()).exp().sum()) + psi.maxCoeff();
    return (tau * (psi.array() - lse + std::log(static_cast<double>(K)))).matrix();
}

DpoResult hybrid_dpo_baseline(const OfflinePrefDataset & D0, const Environment & env, double eps, int T, double tau,
                              double min_reward, Rng & rng, int max_steps) {
    if (!(eps >= 0.0 && eps <= 1.0))
        throw ConfigError("hybrid_dpo: eps must lie in [0,1]");
    if (T < 0)
        throw ConfigError("hybrid_dpo: T must be nonnegative");
    const int K = env.K();
    DpoResult out;
    Vector r = dpo_fit_reward(D0, K, tau, max_steps, &out.fit_converged);
    r.array() += min_reward - r.minCoeff();
    out.fitted_reward = r;
    std::vector<double> n(K, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> pick(0, K - 1);
    out.actions.reserve(T);
    out.rewards.reserve(T);
    for (int t = 0; t < T; ++t) {
        const int a = u(rng) < eps ? pick(rng) : static_cast<int>(argmax_lowest(r));
        const double y = reward_sample(env, a, rng);
        r[a] = (r[a] * n[a] + y) / (n[a] + 1.0);
        n[a] += 1.0;
        out.actions.push_back(a);
        out.rewards.push_back(y);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Bandit runner
// ---------------------------------------------------------------------------

std::vector<RunRecord> run_bandit_algorithm(const ExperimentConfig & cfg, const BanditInstance & inst,
                                            const std::string & tag, int seed, NumericalFlags & flags) {
    const Environment & env = inst.env;
    const double best = env.mean_reward(env.best_arm());
    Rng rng = algorithm_rng(cfg.master_seed, seed, tag);
    std::vector<RunRecord> recs;
    recs.reserve(cfg.T);
    double cum = 0.0;
    auto emit = [&](int t, int arm, double reward, double extra_cost) {
        const double inst_regret = std::max(0.0, best - env.mean_reward(arm)) + extra_cost;
        cum += inst_regret;
        recs.push_back({seed, t, tag, arm, reward, inst_regret, cum});
    };

    const double lb = cfg.effective_learner_beta();
    const double ll = cfg.effective_learner_lambda();

    if (tag == "vanilla-ps" || tag == "lints") {
        GaussianBelief belief = GaussianBelief::from_prior(inst.prior);
        const double infl = tag == "lints" ? cfg.lints_inflation : 1.0;
        for (int t = 1; t <= cfg.T; ++t) {
            const StepResult s = lin_ts_step(belief, env, rng, infl);
            emit(t, s.arm, s.reward, 0.0);
        }
    } else if (tag == "warmpref-exact") {
        ParticleBelief belief =
            informed_prior_particles(inst.prior, ll, lb, inst.D0, env.actions, cfg.particles, rng);
        for (int t = 1; t <= cfg.T; ++t) {
            const StepResult s = warmpref_ps_step(belief, env, cfg.sigma, rng, cfg.ess_frac);
            emit(t, s.arm, s.reward, 0.0);
        }
        if (belief.tempered)
            ++flags.particles_tempered;
    } else if (tag == "warmpref-boot" || tag == "warmtsof") {
        LossParams p;
        p.beta = lb;
        p.lambda = ll;
        p.prior = inst.prior;
        p.actions = env.actions;
        p.D0 = inst.D0;
        p.noise_sigma = cfg.sigma;
        Vector warm;
        for (int t = 1; t <= cfg.T; ++t) {
            if (tag == "warmpref-boot") {
                const BootStepResult s = bootstrapped_step(p, env, rng, cfg.optimizer, &warm);
                if (!s.converged)
                    ++flags.optimizer_nonconverged;
                emit(t, s.arm, s.reward, 0.0);
            } else {
                const TsofStepResult s = warmtsof_step(p, env, inst.rater, cfg.feedback, t, rng, cfg.optimizer);
                if (!s.converged)
                    ++flags.optimizer_nonconverged;
                emit(t, s.arm, s.reward, s.queried ? cfg.feedback.cost_c : 0.0);
            }
        }
    } else if (tag == "hybrid-dpo") {
        double min_r = 0.0;
        if (cfg.dpo_min_reward == "oracle") {
            min_r = std::numeric_limits<double>::infinity();
            for (int k = 0; k < env.K(); ++k)
                min_r = std::min(min_r, env.mean_reward(k));
        } else {
            min_r = std::stod(cfg.dpo_min_reward);
        }
        const DpoResult res =
            hybrid_dpo_baseline(inst.D0, env, cfg.dpo_eps, cfg.T, cfg.dpo_tau, min_r, rng, cfg.dpo_max_steps);
        for (int t = 1; t <= cfg.T; ++t)
            emit(t, res.actions[t - 1], res.rewards[t - 1], 0.0);
    } else {
        std::string msg = "unknown algorithm '" + tag + "'; valid tags:";
        for (const auto & v : valid_algorithms("bandit"))
            msg += " " + v;
        throw ConfigError(msg);
    }
    return recs;
}

// ---------------------------------------------------------------------------
// PSPL runner
// ---------------------------------------------------------------------------

namespace {

std::vector<RunRecord> run_pspl_seed(const ExperimentConfig & cfg, int seed, NumericalFlags & flags) {
    Rng env_rng = algorithm_rng(cfg.master_seed, seed, "env");
    TabularMDP mdp;
    if (cfg.env == "riverswim") {
        const RiverStart start = cfg.river_start == "first-two" ? RiverStart::FirstTwo
                                 : cfg.river_start == "leftmost" ? RiverStart::Leftmost
                                                                 : RiverStart::Uniform;
        mdp = riverswim_env(cfg.S, cfg.H, start);
    } else {
        mdp = random_mdp(cfg.S, cfg.A, cfg.H, env_rng);
    }
    Rng rater_rng = algorithm_rng(cfg.master_seed, seed, "rater");
    const Rater rater = make_rater(mdp.theta(), cfg.pspl_beta, cfg.pspl_lambda, rater_rng);
    Rng data_rng = algorithm_rng(cfg.master_seed, seed, "dataset");
    const TrajPrefDataset D0 =
        generate_offline_trajectories(mdp, PolicyTable::uniform(mdp.H, mdp.S, mdp.A), rater, cfg.pspl_N, data_rng);

    std::vector<RunRecord> recs;
    for (const auto & tag : cfg.algorithms) {
        PsplParams params;
        params.beta = cfg.learner_beta < 0.0 ? cfg.pspl_beta : cfg.learner_beta;
        params.lambda = cfg.learner_lambda < 0.0 ? cfg.pspl_lambda : cfg.learner_lambda;
        params.alpha0 = cfg.alpha0;
        params.prior = PriorSpec::standard(mdp.S * mdp.A);
        params.eta_mode = tag == "pspl-boot" ? EtaMode::Bootstrap : EtaMode::ExactDirichlet;
        params.prior_weight =
            cfg.dirichlet_weight == "sa" ? DirichletPriorWeight::StateActionScaled : DirichletPriorWeight::Unit;
        params.opt = cfg.optimizer;
        PsplLearner learner(mdp.S, mdp.A, mdp.H, D0, params);
        Rng rng = algorithm_rng(cfg.master_seed, seed, tag);
        double cum = 0.0;
        for (int k = 1; k <= cfg.episodes; ++k) {
            const EpisodeResult ep = learner.episode(mdp, rater, rng);
            if (k % cfg.eval_every != 0 && k != cfg.episodes)
                continue;
            const double reg = std::max(0.0, simple_regret(mdp, learner.output_policy(), 0).exact);
            cum += reg;
            recs.push_back({seed, k, tag, ep.y, trajectory_return(mdp, ep.tau0), reg, cum});
        }
        if (!learner.all_converged())
            ++flags.optimizer_nonconverged;
    }
    return recs;
}

} // namespace

RunOutput run_experiment(const ExperimentConfig & cfg) {
    cfg.validate();
    if (cfg.mode == "theory")
        throw ConfigError("run_experiment: theory mode has no simulation records");
    const int n = cfg.seeds;
    std::vector<std::vector<RunRecord>> per_seed(n);
    std::vector<NumericalFlags> per_flags(n);
    std::vector<std::string> errors(n);
    std::atomic<int> next{0};

    auto worker = [&]() {
        for (int s = next.fetch_add(1); s < n; s = next.fetch_add(1)) {
            try {
                if (cfg.mode == "bandit") {
                    const BanditInstance inst = make_bandit_instance(cfg, s);
                    for (const auto & tag : cfg.algorithms) {
                        auto r = run_bandit_algorithm(cfg, inst, tag, s, per_flags[s]);
                        per_seed[s].insert(per_seed[s].end(), r.begin(), r.end());
                    }
                } else {
                    per_seed[s] = run_pspl_seed(cfg, s, per_flags[s]);
                }
            } catch (const std::exception & e) {
                errors[s] = e.what();
            }
        }
    };
    int threads = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::clamp(threads, 1, n);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < threads; ++i)
            pool.emplace_back(worker);
        for (auto & th : pool)
            th.join();
    }
    // Report the first failure in seed order so the message is deterministic.
    for (int s = 0; s < n; ++s)
        if (!errors[s].empty())
            throw NumericalError("seed " + std::to_string(s) + ": " + errors[s]);

    RunOutput out;
    for (int s = 0; s < n; ++s) {
        out.records.insert(out.records.end(), per_seed[s].begin(), per_seed[s].end());
        out.flags += per_flags[s];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Summary and persistence
// ---------------------------------------------------------------------------

std::vector<SummaryRow> summarize(const std::vector<RunRecord> & records) {
    std::vector<std::string> order;
    std::map<std::pair<std::string, int>, std::vector<double>> groups;
    for (const auto & r : records) {
        if (std::find(order.begin(), order.end(), r.algo) == order.end())
            order.push_back(r.algo);
        groups[{r.algo, r.t}].push_back(r.cum_regret);
    }
    std::map<std::string, int> final_t;
    for (const auto & [key, v] : groups)
        final_t[key.first] = std::max(final_t[key.first], key.second);

    std::vector<SummaryRow> rows;
    std::map<std::string, double> final_mean;
    for (const auto & algo : order)
        for (const auto & [key, v] : groups) {
            if (key.first != algo)
                continue;
            const double n = static_cast<double>(v.size());
            double mean = 0.0;
            for (double x : v)
                mean += x;
            mean /= n;
            double ss = 0.0;
            for (double x : v)
                ss += (x - mean) * (x - mean);
            const double sd = v.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
            rows.push_back({algo, key.second, static_cast<int>(v.size()), mean, sd,
                            std::numeric_limits<double>::quiet_NaN()});
            if (key.second == final_t[algo])
                final_mean[algo] = mean;
        }
    const auto van = final_mean.find("vanilla-ps");
    if (van != final_mean.end() && van->second != 0.0)
        for (auto & row : rows)
            if (row.t == final_t[row.algo])
                row.reduction_vs_vanilla = 1.0 - final_mean[row.algo] / van->second;
    return rows;
}

namespace {

std::string num(double v) {
    if (std::isnan(v))
        return "";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

void write_csv(std::ostream & os, const std::vector<RunRecord> & records) {
    os << "seed,t,algo,action,reward,inst_regret,cum_regret\n";
    for (const auto & r : records)
        os << r.seed << ',' << r.t << ',' << r.algo << ',' << r.action << ',' << num(r.reward) << ','
           << num(r.inst_regret) << ',' << num(r.cum_regret) << '\n';
}

void write_summary_csv(std::ostream & os, const std::vector<SummaryRow> & rows) {
    os << "algo,t,n,mean_cum_regret,std_cum_regret,reduction_vs_vanilla\n";
    for (const auto & r : rows)
        os << r.algo << ',' << r.t << ',' << r.n << ',' << num(r.mean_cum_regret) << ',' << num(r.std_cum_regret)
           << ',' << num(r.reduction_vs_vanilla) << '\n';
}

void write_metadata(std::ostream & os, const ExperimentConfig & cfg, double wall_seconds,
                    const NumericalFlags & flags) {
    nlohmann::json j;
    j["config"] = cfg.to_map();
    j["wall_seconds"] = wall_seconds;
    j["versions"] = {{"warmpref", WARMPREF_VERSION},
                     {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                   std::to_string(EIGEN_MINOR_VERSION)},
                     {"compiler", __VERSION__},
                     {"cxx_standard", static_cast<long>(__cplusplus)}};
    j["numerical_flags"] = {{"optimizer_nonconverged", flags.optimizer_nonconverged},
                            {"particles_tempered", flags.particles_tempered}};
    os << j.dump(2) << '\n';
}

} // namespace warmpref
