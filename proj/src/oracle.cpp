#include <warmpref/oracle.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

#include <warmpref/bandit_ps.hpp>
#include <warmpref/bootstrap.hpp>

namespace warmpref {

Vector brute_force_optimal_values(const TabularMDP & mdp, double max_policies) {
    const int slots = mdp.S * mdp.H;
    const double count = std::pow(static_cast<double>(mdp.A), slots);
    if (count > max_policies)
        throw ConfigError("brute_force_optimal_values: too many policies");
    const long n = std::lround(count);
    std::vector<int> act(slots, 0);
    Vector best = Vector::Constant(mdp.S, -std::numeric_limits<double>::infinity());
    Vector v(mdp.S), next(mdp.S);
    for (long idx = 0; idx < n; ++idx) {
        long rem = idx;
        for (int i = 0; i < slots; ++i) {
            act[i] = static_cast<int>(rem % mdp.A);
            rem /= mdp.A;
        }
        // Backward evaluation of a fixed deterministic policy; no maximization inside.
        next.setZero();
        for (int h = mdp.H - 1; h >= 0; --h) {
            for (int s = 0; s < mdp.S; ++s) {
                const int a = act[h * mdp.S + s];
                double q = mdp.reward(s, a);
                for (int s2 = 0; s2 < mdp.S; ++s2)
                    q += mdp.P(s, a, s2) * next[s2];
                v[s] = q;
            }
            next = v;
        }
        best = best.cwiseMax(next);
    }
    return best;
}

double gradient_check(const std::function<double(const Vector &, Vector *)> & f, const Vector & x, double h) {
    Vector g;
    f(x, &g);
    double worst = 0.0;
    Vector xp = x, xm = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        xp[i] = x[i] + h;
        xm[i] = x[i] - h;
        const double fd = (f(xp, nullptr) - f(xm, nullptr)) / (2.0 * h);
        xp[i] = xm[i] = x[i];
        const double scale = std::max({1.0, std::abs(g[i]), std::abs(fd)});
        worst = std::max(worst, std::abs(g[i] - fd) / scale);
    }
    return worst;
}

namespace {

OracleReport planning_suite(Rng & rng) {
    double worst = 0.0;
    int instances = 0;
    const int shapes[][3] = {{2, 2, 3}, {3, 2, 3}, {2, 3, 3}, {4, 2, 2}, {2, 2, 6}};
    for (const auto & sh : shapes)
        for (int rep = 0; rep < 4; ++rep) {
            const TabularMDP mdp = random_mdp(sh[0], sh[1], sh[2], rng);
            const PlanResult plan = finite_horizon_plan(mdp.reward, mdp.trans, mdp.H);
            const Vector bf = brute_force_optimal_values(mdp);
            worst = std::max(worst, (plan.V.row(0).transpose() - bf).cwiseAbs().maxCoeff());
            ++instances;
        }
    std::ostringstream os;
    os << instances << " instances, max |V_plan - V_brute| = " << worst;
    return {"planning-vs-brute-force", worst <= 1e-10, os.str()};
}

OracleReport gradient_suite(Rng & rng) {
    double worst = 0.0;
    const Environment env = sample_environment(3, 6, rng, PriorSpec::standard(3));
    const Rater rater = make_rater(env.theta, 5.0, 3.0, rng);
    LossParams p;
    p.beta = 5.0;
    p.lambda = 3.0;
    p.prior = PriorSpec::standard(3);
    p.actions = env.actions;
    p.D0 = generate_offline_dataset(env, rater, SamplingDist::uniform(6), 12, rng);
    for (int t = 0; t < 6; ++t)
        p.history.steps.push_back({t % 6, reward_sample(env, t % 6, rng)});
    const PerturbationSet pert = perturb(p, rng);
    for (int i = 0; i < 20; ++i) {
        const Vector x = standard_normal(p.n_vars(), rng);
        worst = std::max(worst, gradient_check([&](const Vector & z, Vector * g) {
                             return perturbed_loss(z, p, pert, g, nullptr);
                         }, x));
    }

    const TabularMDP mdp = random_mdp(3, 2, 4, rng);
    const Rater prater = make_rater(mdp.theta(), 4.0, 5.0, rng);
    const TrajPrefDataset D0 = generate_offline_trajectories(mdp, PolicyTable::uniform(4, 3, 2), prater, 6, rng);
    PsplParams pp;
    pp.beta = 4.0;
    pp.lambda = 5.0;
    pp.prior = PriorSpec::standard(6);
    PsplData data;
    data.S = 3;
    data.A = 2;
    for (const auto & e : D0.entries)
        data.add_offline(e);
    PsplPerturbation ppert = PsplPerturbation::none(data, 6);
    const std::vector<double> eta = pspl_eta_map(data, pp, ppert);
    for (int i = 0; i < 20; ++i) {
        const Vector x = standard_normal(12, rng);
        worst = std::max(worst, gradient_check([&](const Vector & z, Vector * g) {
                             const PsplLossValue lv = pspl_surrogate_loss(z.head(6), z.tail(6), eta, data, pp, ppert);
                             if (g)
                                 *g = lv.gradient;
                             return lv.value;
                         }, x));
    }
    std::ostringstream os;
    os << "40 points, max relative error = " << worst;
    return {"loss-gradients", worst <= 1e-5, os.str()};
}

OracleReport posterior_suite(Rng & rng) {
    const PriorSpec prior = PriorSpec::standard(1);
    Environment env;
    env.theta = Vector::Constant(1, 0.8);
    env.actions = {Vector::Constant(1, 1.0), Vector::Constant(1, -1.0)};
    env.noise_sigma = 1.0;
    const Rater rater = make_rater(env.theta, 2.0, 2.0, rng);
    const OfflinePrefDataset D0 = generate_offline_dataset(env, rater, SamplingDist::uniform(2), 5, rng);
    History hist;
    for (int t = 0; t < 5; ++t)
        hist.steps.push_back({t % 2, reward_sample(env, t % 2, rng)});

    GridSpec gs;
    gs.points_per_axis = 0;
    const GridPosterior gp = exact_posterior_grid(prior, 2.0, 2.0, D0, env.actions, hist, 1.0, gs);

    ParticleBelief pb = informed_prior_particles(prior, 2.0, 2.0, D0, env.actions, 20000, rng);
    for (const auto & st : hist.steps)
        reweight_reward(pb, env.actions[st.arm], st.reward, 1.0);
    const double pm = pb.mean_theta()[0];
    const double rel = std::abs(pm - gp.mean[0]) / std::max(1e-12, std::abs(gp.mean[0]));

    LossParams p;
    p.beta = 2.0;
    p.lambda = 2.0;
    p.prior = prior;
    p.actions = env.actions;
    p.D0 = D0;
    p.history = hist;
    std::vector<double> draws;
    for (int i = 0; i < 10000; ++i)
        draws.push_back(perturbed_map(p, perturb(p, rng)).theta[0]);
    std::vector<double> grid(gp.axes[0].data(), gp.axes[0].data() + gp.axes[0].size());
    const double ks = ks_statistic(draws, grid, gp.cdf_first_axis());

    std::ostringstream os;
    os << "particle mean rel. error = " << rel << ", perturbed-MAP KS = " << ks;
    return {"posterior-vs-grid", rel <= 0.05 && ks <= 0.08, os.str()};
}

} // namespace

std::vector<OracleReport> run_oracle_suites(std::uint64_t seed) {
    Rng rng = make_rng(seed);
    std::vector<OracleReport> out;
    out.push_back(planning_suite(rng));
    out.push_back(gradient_suite(rng));
    out.push_back(posterior_suite(rng));
    return out;
}

} // namespace warmpref
