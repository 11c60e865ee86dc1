#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include <warmpref/config.hpp>
#include <warmpref/harness.hpp>
#include <warmpref/oracle.hpp>
#include <warmpref/theory.hpp>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonOpts {
    std::string config;
    int seeds = 0;
    std::string out;
    std::vector<std::string> sets;
};

void add_common(CLI::App * sub, CommonOpts & o) {
    sub->add_option("--config", o.config, "flat key = value config file");
    sub->add_option("--seeds", o.seeds, "number of paired seeds")->check(CLI::PositiveNumber);
    sub->add_option("--out", o.out, "output CSV path");
    sub->add_option("--set", o.sets, "override, key=value (repeatable)")->take_all();
}

warmpref::ExperimentConfig build_config(const std::string & mode, const CommonOpts & o) {
    warmpref::ExperimentConfig cfg;
    cfg.mode = mode;
    if (mode == "pspl")
        cfg.algorithms = {"pspl"};
    if (!o.config.empty())
        warmpref::load_config_file(cfg, o.config);
    cfg.mode = mode;
    for (const auto & kv : o.sets)
        cfg.apply_override(kv);
    if (o.seeds > 0)
        cfg.seeds = o.seeds;
    if (!o.out.empty())
        cfg.out = o.out;
    cfg.validate();
    return cfg;
}

std::string sibling(const std::string & path, const std::string & suffix) {
    const auto dot = path.find_last_of('.');
    const auto slash = path.find_last_of('/');
    const std::string stem = dot != std::string::npos && (slash == std::string::npos || dot > slash) ? path.substr(0, dot)
                                                                                                   : path;
    return stem + suffix;
}

int run_sim(const warmpref::ExperimentConfig & cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const warmpref::RunOutput res = warmpref::run_experiment(cfg);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    {
        std::ofstream os(cfg.out, std::ios::binary);
        if (!os)
            throw warmpref::ConfigError("cannot write '" + cfg.out + "'");
        warmpref::write_csv(os, res.records);
    }
    std::ofstream sum(sibling(cfg.out, ".summary.csv"), std::ios::binary);
    const auto rows = warmpref::summarize(res.records);
    warmpref::write_summary_csv(sum, rows);
    std::ofstream meta(sibling(cfg.out, ".json"), std::ios::binary);
    warmpref::write_metadata(meta, cfg, wall, res.flags);

    for (const auto & r : rows)
        if (!std::isnan(r.reduction_vs_vanilla) || r.t == (cfg.mode == "bandit" ? cfg.T : cfg.episodes))
            std::printf("%-16s t=%-4d mean_cum_regret=%.4f sd=%.4f reduction_vs_vanilla=%s\n", r.algo.c_str(), r.t,
                        r.mean_cum_regret, r.std_cum_regret,
                        std::isnan(r.reduction_vs_vanilla) ? "-" : std::to_string(r.reduction_vs_vanilla).c_str());
    std::printf("wrote %s (%zu records) in %.1f s\n", cfg.out.c_str(), res.records.size(), wall);
    if (res.flags.any()) {
        std::fprintf(stderr, "numerical flags: optimizer_nonconverged=%ld particles_tempered=%ld\n",
                     res.flags.optimizer_nonconverged, res.flags.particles_tempered);
        return kExitNumerical;
    }
    return 0;
}

int run_theory(const warmpref::ExperimentConfig & cfg) {
    using namespace warmpref;
    const auto main = info_constants(cfg.K, cfg.T_theory, cfg.beta, cfg.lambda, cfg.d, cfg.mu_min, cfg.N,
                                     F2Variant::MainText);
    const auto proof =
        info_constants(cfg.K, cfg.T_theory, cfg.beta, cfg.lambda, cfg.d, cfg.mu_min, cfg.N, F2Variant::Proof);
    bool clamped = false;
    const double bound = regret_bound(main, cfg.K, cfg.T_theory, &clamped);
    std::printf("quantity,value\n");
    std::printf("delta_gap,%.17g\nalpha1,%.17g\nalpha2,%.17g\n", main.delta_gap, main.alpha1, main.alpha2);
    std::printf("f1_tilde,%.17g\nf1,%.17g\n", main.f1_tilde, main.f1);
    std::printf("f2_main,%.17g\nf2_main_capped,%d\n", main.f2, main.f2_capped ? 1 : 0);
    std::printf("f2_proof,%.17g\nf2_proof_capped,%d\n", proof.f2, proof.f2_capped ? 1 : 0);
    std::printf("regret_bound,%.17g\nregret_bound_clamped,%d\n", bound, clamped ? 1 : 0);
    if (cfg.pspl_N > 2) {
        const PsplConstants pc =
            pspl_constants(cfg.pspl_beta, cfg.pspl_lambda, cfg.pspl_N, cfg.pspl_B, cfg.pspl_delta_min, cfg.S * cfg.A);
        std::printf("pspl_gamma,%.17g\npspl_gamma_valid,%d\npspl_delta2,%.17g\n", pc.gamma, pc.valid ? 1 : 0,
                    pc.delta2);
        std::printf("pspl_simple_regret_bound,%.17g\n",
                    pspl_simple_regret_bound(cfg.S, cfg.A, cfg.H, cfg.episodes, cfg.delta1, pc));
    }
    return 0;
}

int run_oracles(std::uint64_t seed) {
    bool ok = true;
    for (const auto & r : warmpref::run_oracle_suites(seed)) {
        std::printf("%s %s: %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
        ok = ok && r.passed;
    }
    return ok ? 0 : kExitNumerical;
}

} // namespace

int main(int argc, char ** argv) {
    CLI::App app{"Offline-preference warm-started posterior sampling experiments"};
    app.set_version_flag("--version", WARMPREF_VERSION);
    app.require_subcommand(1);
    CommonOpts bandit_o, pspl_o, theory_o, oracle_o;
    auto * bandit = app.add_subcommand("bandit", "linear-bandit regret experiment");
    auto * pspl = app.add_subcommand("pspl", "tabular preference-RL experiment");
    auto * theory = app.add_subcommand("theory", "closed-form constants as CSV rows");
    auto * oracle = app.add_subcommand("oracle-check", "quadrature, grid and brute-force oracle suites");
    add_common(bandit, bandit_o);
    add_common(pspl, pspl_o);
    add_common(theory, theory_o);
    add_common(oracle, oracle_o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError & e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (bandit->parsed())
            return run_sim(build_config("bandit", bandit_o));
        if (pspl->parsed())
            return run_sim(build_config("pspl", pspl_o));
        if (theory->parsed())
            return run_theory(build_config("theory", theory_o));
        const auto cfg = build_config("theory", oracle_o);
        return run_oracles(cfg.master_seed);
    } catch (const warmpref::ConfigError & e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return kExitConfig;
    } catch (const warmpref::DomainError & e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception & e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kExitNumerical;
    }
}
