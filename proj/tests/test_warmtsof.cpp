#include <doctest.h>

#include <cmath>
#include <limits>
#include <map>

#include <warmpref/harness.hpp>
#include <warmpref/warmtsof.hpp>

using namespace warmpref;

namespace {

LossParams params_for(const Environment & e, int N, double beta, double lambda, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    LossParams p;
    p.beta = beta;
    p.lambda = lambda;
    p.prior = PriorSpec::standard(e.dim());
    p.actions = e.actions;
    const Rater r = make_rater(e.theta, beta, lambda, rng);
    p.D0 = generate_offline_dataset(e, r, SamplingDist::uniform(e.K()), N, rng);
    return p;
}

} // namespace

TEST_CASE("query threshold schedule") {
    FeedbackConfig cfg;
    CHECK(get_epsilon(cfg, 1, 10.0, 10.0) == doctest::Approx(0.588705011257737).epsilon(1e-14));
    // sqrt(ln x / x) peaks at x = e, so the schedule rises from t=1 to t=2 and decreases after.
    CHECK(get_epsilon(cfg, 2, 1.0, 1.0) > get_epsilon(cfg, 1, 1.0, 1.0));
    double prev = get_epsilon(cfg, 2, 1.0, 1.0);
    for (int t = 3; t < 500; ++t) {
        const double e = get_epsilon(cfg, t, 1.0, 1.0);
        CHECK(e < prev);
        prev = e;
    }
    cfg.cost_c = 1e12;
    CHECK(get_epsilon(cfg, 1, 1.0, 1.0) <= 1e-12);
    cfg.cost_c = std::numeric_limits<double>::infinity();
    CHECK(get_epsilon(cfg, 1, 1.0, 1.0) == 0.0);
    cfg.cost_c = -1.0;
    CHECK_THROWS(cfg.validate());
}

TEST_CASE("zero threshold never queries and follows bootstrapped_step exactly") {
    const Environment e = sample_environment(3, 10, 42);
    FeedbackConfig never;
    never.cost_c = std::numeric_limits<double>::infinity();
    LossParams a = params_for(e, 10, 5.0, 10.0, 1), b = a;
    Rng ra = make_rng(7), rb = make_rng(7);
    Rng rr = make_rng(8);
    const Rater rater = make_rater(e.theta, 5.0, 10.0, rr);
    for (int t = 1; t <= 40; ++t) {
        const TsofStepResult s = warmtsof_step(a, e, rater, never, t, ra);
        const BootStepResult q = bootstrapped_step(b, e, rb);
        CHECK_FALSE(s.queried);
        CHECK(s.arm == q.arm);
        CHECK(s.reward == q.reward);
        CHECK(s.net_reward == s.reward);
    }
    CHECK(a.D0.size() == 10);
}

TEST_CASE("point-mass belief with a clear top arm plays it without paying") {
    Environment e;
    e.theta = Vector::Zero(2);
    e.theta << 1.0, 0.0;
    e.actions = {Vector::Unit(2, 1), Vector::Unit(2, 0), -Vector::Unit(2, 0)};
    e.noise_sigma = 1.0;
    LossParams p;
    p.beta = 1.0;
    p.lambda = 1.0;
    p.prior.mu0 = e.theta;
    p.prior.Sigma0 = Matrix::Identity(2, 2) * 1e-12;
    p.actions = e.actions;
    FeedbackConfig cfg;
    cfg.cost_c = 0.5;
    const Rater rater{1.0, 1.0, e.theta};
    Rng rng = make_rng(3);
    for (int t = 1; t <= 10; ++t) {
        const TsofStepResult s = warmtsof_step(p, e, rater, cfg, t, rng);
        CHECK(s.arm == 1);
        CHECK_FALSE(s.queried);
        CHECK(s.net_reward == s.reward);
    }
}

TEST_CASE("a query appends one labeled pair and charges the cost") {
    const Environment e = sample_environment(2, 6, 9);
    LossParams p = params_for(e, 5, 3.0, 5.0, 2);
    FeedbackConfig cfg;
    cfg.cost_c = 0.25;
    cfg.eps_scale = 1e9;
    Rng rr = make_rng(1);
    const Rater rater = make_rater(e.theta, 3.0, 5.0, rr);
    Rng rng = make_rng(4);
    const TsofStepResult s = warmtsof_step(p, e, rater, cfg, 1, rng);
    CHECK(s.queried);
    CHECK(p.D0.size() == 6);
    CHECK(s.net_reward == doctest::Approx(s.reward - 0.25));
    CHECK(p.history.size() == 1);
}

TEST_CASE("free feedback does not hurt: warmTSOF regret is not above bootstrapped warmPref-PS") {
    ExperimentConfig cfg;
    cfg.algorithms = {"warmpref-boot", "warmtsof"};
    cfg.seeds = 100;
    cfg.lambda = 10.0;
    cfg.feedback.cost_c = 0.0;
    cfg.threads = 1;
    const RunOutput out = run_experiment(cfg);
    std::map<int, double> boot, tsof;
    for (const auto & r : out.records)
        if (r.t == cfg.T)
            (r.algo == "warmtsof" ? tsof : boot)[r.seed] = r.cum_regret;
    double s = 0.0, ss = 0.0;
    for (const auto & [seed, v] : boot) {
        const double d = tsof[seed] - v;
        s += d;
        ss += d * d;
    }
    const double n = static_cast<double>(boot.size());
    const double mean = s / n, se = std::sqrt((ss / n - mean * mean) / (n - 1.0));
    MESSAGE("mean paired difference warmtsof - boot = " << mean << " (SE " << se << ")");
    // Two-sided 95%: warmTSOF must not be significantly worse.
    CHECK(mean <= 1.96 * se);
}
