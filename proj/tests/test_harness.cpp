#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <warmpref/harness.hpp>

using namespace warmpref;

namespace {

ExperimentConfig small_bandit() {
    ExperimentConfig cfg;
    cfg.K = 8;
    cfg.d = 3;
    cfg.T = 25;
    cfg.N = 10;
    cfg.seeds = 3;
    cfg.particles = 512;
    cfg.threads = 1;
    cfg.algorithms = {"vanilla-ps", "lints", "warmpref-exact", "warmpref-boot", "warmtsof", "hybrid-dpo"};
    return cfg;
}

std::string csv_of(const std::vector<RunRecord> & recs) {
    std::ostringstream os;
    write_csv(os, recs);
    return os.str();
}

Environment two_arm_line(double theta) {
    Environment e;
    e.theta = Vector::Constant(1, theta);
    e.actions = {Vector::Constant(1, 1.0), Vector::Constant(1, -1.0)};
    return e;
}

} // namespace

TEST_CASE("config parsing") {
    ExperimentConfig cfg;
    cfg.set("K", "12");
    cfg.apply_override("beta=2.5");
    cfg.apply_override("algorithms=lints,warmpref-boot");
    CHECK(cfg.K == 12);
    CHECK(cfg.beta == 2.5);
    CHECK(cfg.algorithms == std::vector<std::string>{"lints", "warmpref-boot"});
    CHECK(cfg.effective_learner_beta() == 2.5);
    cfg.set("learner_beta", "4");
    CHECK(cfg.effective_learner_beta() == 4.0);

    CHECK_THROWS_AS(cfg.set("nosuchkey", "1"), ConfigError);
    CHECK_THROWS_AS(cfg.set("K", "abc"), ConfigError);
    CHECK_THROWS_AS(cfg.apply_override("K"), ConfigError);

    ExperimentConfig bad;
    bad.K = 1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = ExperimentConfig{};
    bad.lambda = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = ExperimentConfig{};
    bad.algorithms = {"ucb"};
    try {
        bad.validate();
        FAIL("unknown algorithm accepted");
    } catch (const ConfigError & e) {
        CHECK(std::string(e.what()).find("valid tags") != std::string::npos);
    }
    CHECK_NOTHROW(ExperimentConfig{}.validate());
}

TEST_CASE("config file grammar") {
    const std::string path = "test_harness_cfg.txt";
    {
        std::ofstream f(path);
        f << "# comment line\n\nK = 7   # trailing comment\n  d=2\nK = 9\nmode = bandit\n";
    }
    ExperimentConfig cfg;
    load_config_file(cfg, path);
    CHECK(cfg.K == 9);
    CHECK(cfg.d == 2);
    {
        std::ofstream f(path);
        f << "K 7\n";
    }
    CHECK_THROWS_AS(load_config_file(cfg, path), ConfigError);
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_config_file(cfg, "does/not/exist.cfg"), ConfigError);
}

TEST_CASE("record invariants") {
    const ExperimentConfig cfg = small_bandit();
    const RunOutput out = run_experiment(cfg);
    CHECK(out.records.size() == static_cast<std::size_t>(cfg.seeds * cfg.T * cfg.algorithms.size()));
    std::map<std::pair<int, std::string>, double> last;
    std::map<std::pair<int, std::string>, int> last_t;
    for (const auto & r : out.records) {
        CHECK(r.inst_regret >= 0.0);
        CHECK(r.action >= 0);
        CHECK(r.action < cfg.K);
        const auto key = std::make_pair(r.seed, r.algo);
        const double prev = last.count(key) ? last[key] : 0.0;
        CHECK(r.cum_regret == doctest::Approx(prev + r.inst_regret).epsilon(1e-12));
        CHECK(r.t == (last_t.count(key) ? last_t[key] : 0) + 1);
        last[key] = r.cum_regret;
        last_t[key] = r.t;
    }
}

TEST_CASE("determinism and thread independence") {
    ExperimentConfig cfg = small_bandit();
    const std::string a = csv_of(run_experiment(cfg).records);
    const std::string b = csv_of(run_experiment(cfg).records);
    CHECK(a == b);
    cfg.threads = 4;
    CHECK(csv_of(run_experiment(cfg).records) == a);
    cfg.master_seed += 1;
    CHECK(csv_of(run_experiment(cfg).records) != a);
}

TEST_CASE("adding an algorithm leaves the others unchanged") {
    ExperimentConfig cfg = small_bandit();
    cfg.algorithms = {"vanilla-ps", "warmpref-boot"};
    const RunOutput two = run_experiment(cfg);
    cfg.algorithms = {"lints", "vanilla-ps", "hybrid-dpo", "warmpref-boot"};
    const RunOutput four = run_experiment(cfg);
    std::vector<RunRecord> kept;
    for (const auto & r : four.records)
        if (r.algo == "vanilla-ps" || r.algo == "warmpref-boot")
            kept.push_back(r);
    std::map<std::string, std::string> lhs, rhs;
    for (const auto & r : two.records)
        lhs[r.algo] += csv_of({r});
    for (const auto & r : kept)
        rhs[r.algo] += csv_of({r});
    CHECK(lhs == rhs);
}

TEST_CASE("summary statistics") {
    std::vector<RunRecord> recs;
    // vanilla final cum regret 10 and 20; boot 5 and 5.
    recs.push_back({0, 1, "vanilla-ps", 0, 0.0, 4.0, 4.0});
    recs.push_back({0, 2, "vanilla-ps", 0, 0.0, 6.0, 10.0});
    recs.push_back({1, 1, "vanilla-ps", 0, 0.0, 8.0, 8.0});
    recs.push_back({1, 2, "vanilla-ps", 0, 0.0, 12.0, 20.0});
    recs.push_back({0, 1, "warmpref-boot", 0, 0.0, 1.0, 1.0});
    recs.push_back({0, 2, "warmpref-boot", 0, 0.0, 4.0, 5.0});
    recs.push_back({1, 1, "warmpref-boot", 0, 0.0, 1.0, 1.0});
    recs.push_back({1, 2, "warmpref-boot", 0, 0.0, 4.0, 5.0});
    const std::vector<SummaryRow> rows = summarize(recs);
    REQUIRE(rows.size() == 4u);
    for (const auto & row : rows) {
        CHECK(row.n == 2);
        if (row.algo == "vanilla-ps" && row.t == 2) {
            CHECK(row.mean_cum_regret == 15.0);
            CHECK(row.std_cum_regret == doctest::Approx(std::sqrt(50.0)));
            CHECK(row.reduction_vs_vanilla == 0.0);
        }
        if (row.algo == "warmpref-boot" && row.t == 2) {
            CHECK(row.std_cum_regret == 0.0);
            CHECK(row.reduction_vs_vanilla == doctest::Approx(1.0 - 5.0 / 15.0));
        }
        if (row.t == 1)
            CHECK(std::isnan(row.reduction_vs_vanilla));
    }
    const std::vector<SummaryRow> single = summarize({recs[0]});
    REQUIRE(single.size() == 1u);
    CHECK(single[0].std_cum_regret == 0.0);
}

TEST_CASE("csv header and formatting") {
    std::ostringstream os;
    write_csv(os, {{3, 1, "lints", 2, 0.1, 0.25, 0.25}});
    std::istringstream is(os.str());
    std::string header, row;
    std::getline(is, header);
    std::getline(is, row);
    CHECK(header == "seed,t,algo,action,reward,inst_regret,cum_regret");
    CHECK(row.rfind("3,1,lints,2,", 0) == 0);
    // Full precision round trip.
    CHECK(std::stod(row.substr(row.rfind(',') + 1)) == 0.25);
}

TEST_CASE("metadata sidecar") {
    std::ostringstream os;
    NumericalFlags f;
    f.optimizer_nonconverged = 2;
    write_metadata(os, ExperimentConfig{}, 1.5, f);
    const std::string s = os.str();
    CHECK(s.find("optimizer_nonconverged") != std::string::npos);
    CHECK(s.find("wall_seconds") != std::string::npos);
    CHECK(f.any());
    NumericalFlags g;
    CHECK(!g.any());
    g += f;
    CHECK(g.optimizer_nonconverged == 2);
}

TEST_CASE("hybrid dpo with full exploration is uniform") {
    const Environment env = two_arm_line(0.5);
    OfflinePrefDataset D0;
    Rng rng = make_rng(11);
    const int T = 10000;
    const DpoResult res = hybrid_dpo_baseline(D0, env, 1.0, T, 0.1, 0.0, rng);
    REQUIRE(res.actions.size() == static_cast<std::size_t>(T));
    double zeros = 0.0;
    for (int a : res.actions)
        zeros += a == 0;
    CHECK(std::abs(zeros / T - 0.5) <= 3.0 * std::sqrt(0.25 / T));
}

TEST_CASE("hybrid dpo greedy follows a separable dataset") {
    // Arm 2 beats every other arm in every comparison.
    Rng rng = make_rng(12);
    const Environment env = sample_environment(3, 5, rng, PriorSpec::standard(3));
    OfflinePrefDataset D0;
    for (int rep = 0; rep < 4; ++rep)
        for (int j = 0; j < 5; ++j)
            if (j != 2)
                D0.entries.push_back({2, j, 0});
    bool conv = false;
    const Vector r = dpo_fit_reward(D0, 5, 0.1, 20000, &conv);
    for (int j = 0; j < 5; ++j)
        if (j != 2)
            CHECK(r(2) > r(j));
    const DpoResult res = hybrid_dpo_baseline(D0, env, 0.0, 1, 0.1, -100.0, rng);
    CHECK(res.actions[0] == 2);
    CHECK(res.fitted_reward.minCoeff() == doctest::Approx(-100.0));
}

TEST_CASE("hybrid dpo fit on an empty dataset is flat") {
    bool conv = false;
    const Vector r = dpo_fit_reward(OfflinePrefDataset{}, 4, 0.1, 100, &conv);
    CHECK(conv);
    CHECK(r.maxCoeff() - r.minCoeff() <= 1e-12);
    CHECK_THROWS_AS(dpo_fit_reward(OfflinePrefDataset{}, 4, 0.0, 100), ConfigError);
    Rng rng = make_rng(1);
    CHECK_THROWS_AS(hybrid_dpo_baseline(OfflinePrefDataset{}, two_arm_line(1.0), 1.5, 5, 0.1, 0.0, rng),
                    ConfigError);
}

TEST_CASE("pspl mode records") {
    ExperimentConfig cfg;
    cfg.mode = "pspl";
    cfg.algorithms = {"pspl", "pspl-boot"};
    cfg.S = 3;
    cfg.H = 5;
    cfg.episodes = 6;
    cfg.pspl_N = 20;
    cfg.eval_every = 2;
    cfg.seeds = 2;
    cfg.threads = 2;
    const RunOutput out = run_experiment(cfg);
    CHECK(out.records.size() == 2u * 2u * 3u);
    std::map<std::pair<int, std::string>, double> cum;
    for (const auto & r : out.records) {
        CHECK(r.t % 2 == 0);
        CHECK(r.inst_regret >= -1e-12);
        CHECK((r.action == 0 || r.action == 1));
        cum[{r.seed, r.algo}] += r.inst_regret;
        CHECK(r.cum_regret == doctest::Approx(cum[{r.seed, r.algo}]));
    }
    cfg.threads = 1;
    CHECK(csv_of(run_experiment(cfg).records) == csv_of(out.records));
}
