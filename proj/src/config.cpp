#include <warmpref/config.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace warmpref {

namespace {

std::string trim(const std::string & s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

int to_int(const std::string & key, const std::string & v) {
    int out = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size())
        throw ConfigError("config: '" + key + "' expects an integer, got '" + v + "'");
    return out;
}

std::uint64_t to_u64(const std::string & key, const std::string & v) {
    std::uint64_t out = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size())
        throw ConfigError("config: '" + key + "' expects an unsigned integer, got '" + v + "'");
    return out;
}

double to_double(const std::string & key, const std::string & v) {
    try {
        std::size_t pos = 0;
        const double out = std::stod(v, &pos);
        if (pos != v.size())
            throw std::invalid_argument("trailing");
        return out;
    } catch (const std::exception &) {
        throw ConfigError("config: '" + key + "' expects a number, got '" + v + "'");
    }
}

std::vector<std::string> split_list(const std::string & v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!trim(item).empty())
            out.push_back(trim(item));
    return out;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

void require_choice(const std::string & key, const std::string & v, std::initializer_list<const char *> ok) {
    for (const char * c : ok)
        if (v == c)
            return;
    std::string msg = "config: '" + key + "' must be one of:";
    for (const char * c : ok)
        msg += std::string(" ") + c;
    throw ConfigError(msg);
}

} // namespace

const std::vector<std::string> & valid_algorithms(const std::string & mode) {
    static const std::vector<std::string> bandit{"vanilla-ps",    "lints",    "warmpref-exact",
                                                 "warmpref-boot", "warmtsof", "hybrid-dpo"};
    static const std::vector<std::string> pspl{"pspl", "pspl-boot"};
    static const std::vector<std::string> none{};
    if (mode == "bandit")
        return bandit;
    if (mode == "pspl")
        return pspl;
    return none;
}

void ExperimentConfig::set(const std::string & key, const std::string & raw) {
    const std::string v = trim(raw);
    if (key == "mode") {
        require_choice(key, v, {"bandit", "pspl", "theory"});
        mode = v;
    } else if (key == "algorithms") {
        algorithms = split_list(v);
    } else if (key == "K") {
        K = to_int(key, v);
    } else if (key == "d") {
        d = to_int(key, v);
    } else if (key == "T") {
        T = to_int(key, v);
    } else if (key == "N") {
        N = to_int(key, v);
    } else if (key == "beta") {
        beta = to_double(key, v);
    } else if (key == "lambda") {
        lambda = to_double(key, v);
    } else if (key == "sigma") {
        sigma = to_double(key, v);
    } else if (key == "arm_norm") {
        require_choice(key, v, {"unit", "scaled"});
        arm_norm = v;
    } else if (key == "learner_beta") {
        learner_beta = to_double(key, v);
    } else if (key == "learner_lambda") {
        learner_lambda = to_double(key, v);
    } else if (key == "seeds") {
        seeds = to_int(key, v);
    } else if (key == "master_seed") {
        master_seed = to_u64(key, v);
    } else if (key == "threads") {
        threads = to_int(key, v);
    } else if (key == "particles") {
        particles = to_int(key, v);
    } else if (key == "ess_frac") {
        ess_frac = to_double(key, v);
    } else if (key == "lints_inflation") {
        lints_inflation = to_double(key, v);
    } else if (key == "optimizer") {
        require_choice(key, v, {"newton", "gd"});
        optimizer.method = v == "newton" ? OptimizerSpec::Method::Newton : OptimizerSpec::Method::GradientDescent;
    } else if (key == "optimizer_max_iters") {
        optimizer.max_iters = to_int(key, v);
    } else if (key == "optimizer_grad_tol") {
        optimizer.grad_tol = to_double(key, v);
    } else if (key == "optimizer_init") {
        require_choice(key, v, {"prior-mean", "warm-start", "zero"});
        optimizer.init = v == "prior-mean"   ? OptimizerSpec::Init::PriorMean
                         : v == "warm-start" ? OptimizerSpec::Init::WarmStart
                                             : OptimizerSpec::Init::Zero;
    } else if (key == "feedback_cost") {
        feedback.cost_c = to_double(key, v);
    } else if (key == "feedback_eps_scale") {
        feedback.eps_scale = to_double(key, v);
    } else if (key == "dpo_eps") {
        dpo_eps = to_double(key, v);
    } else if (key == "dpo_tau") {
        dpo_tau = to_double(key, v);
    } else if (key == "dpo_min_reward") {
        if (v != "oracle")
            to_double(key, v);
        dpo_min_reward = v;
    } else if (key == "dpo_max_steps") {
        dpo_max_steps = to_int(key, v);
    } else if (key == "env") {
        require_choice(key, v, {"riverswim", "random"});
        env = v;
    } else if (key == "S") {
        S = to_int(key, v);
    } else if (key == "A") {
        A = to_int(key, v);
    } else if (key == "H") {
        H = to_int(key, v);
    } else if (key == "episodes") {
        episodes = to_int(key, v);
    } else if (key == "pspl_N") {
        pspl_N = to_int(key, v);
    } else if (key == "pspl_beta") {
        pspl_beta = to_double(key, v);
    } else if (key == "pspl_lambda") {
        pspl_lambda = to_double(key, v);
    } else if (key == "alpha0") {
        alpha0 = to_double(key, v);
    } else if (key == "river_start") {
        require_choice(key, v, {"first-two", "leftmost", "uniform"});
        river_start = v;
    } else if (key == "dirichlet_weight") {
        require_choice(key, v, {"sa", "unit"});
        dirichlet_weight = v;
    } else if (key == "eval_every") {
        eval_every = to_int(key, v);
    } else if (key == "T_theory") {
        T_theory = to_double(key, v);
    } else if (key == "mu_min") {
        mu_min = to_double(key, v);
    } else if (key == "pspl_B") {
        pspl_B = to_double(key, v);
    } else if (key == "pspl_delta_min") {
        pspl_delta_min = to_double(key, v);
    } else if (key == "delta1") {
        delta1 = to_double(key, v);
    } else if (key == "out") {
        out = v;
    } else {
        throw ConfigError("config: unknown key '" + key + "'");
    }
}

void ExperimentConfig::apply_override(const std::string & kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
        throw ConfigError("config: override must look like key=value, got '" + kv + "'");
    set(trim(kv.substr(0, eq)), kv.substr(eq + 1));
}

void ExperimentConfig::validate() const {
    if (seeds < 1)
        throw ConfigError("config: seeds must be positive");
    if (threads < 0)
        throw ConfigError("config: threads must be nonnegative");
    if (mode == "bandit") {
        if (K < 2 || d < 1 || T < 1 || N < 0)
            throw ConfigError("config: bandit mode needs K >= 2, d >= 1, T >= 1, N >= 0");
        if (!(beta >= 0.0) || !(lambda > 0.0) || !(sigma > 0.0))
            throw ConfigError("config: need beta >= 0, lambda > 0, sigma > 0");
        if (particles < 1 || !(ess_frac > 0.0 && ess_frac <= 1.0))
            throw ConfigError("config: particles must be positive and ess_frac in (0,1]");
        if (!(lints_inflation > 0.0))
            throw ConfigError("config: lints_inflation must be positive");
        if (!(dpo_eps >= 0.0 && dpo_eps <= 1.0) || !(dpo_tau > 0.0) || dpo_max_steps < 1)
            throw ConfigError("config: need dpo_eps in [0,1], dpo_tau > 0, dpo_max_steps >= 1");
        feedback.validate();
    } else if (mode == "pspl") {
        if (S < 2 || A < 1 || H < 1 || episodes < 1 || pspl_N < 0 || eval_every < 1)
            throw ConfigError("config: pspl mode needs S >= 2, A, H, episodes, eval_every >= 1, pspl_N >= 0");
        if (env == "riverswim" && A != 2)
            throw ConfigError("config: riverswim has A = 2");
        if (!(pspl_beta >= 0.0) || !(pspl_lambda > 0.0) || !(alpha0 > 0.0))
            throw ConfigError("config: need pspl_beta >= 0, pspl_lambda > 0, alpha0 > 0");
    } else if (mode == "theory") {
        if (K < 2 || d < 1 || !(T_theory >= 1.0) || !(mu_min > 0.0 && mu_min < 1.0))
            throw ConfigError("config: theory mode needs K >= 2, d >= 1, T_theory >= 1, mu_min in (0,1)");
    }
    if (mode != "theory") {
        if (algorithms.empty())
            throw ConfigError("config: algorithm list is empty");
        const auto & ok = valid_algorithms(mode);
        for (const auto & a : algorithms)
            if (std::find(ok.begin(), ok.end(), a) == ok.end()) {
                std::string msg = "config: unknown algorithm '" + a + "'; valid tags:";
                for (const auto & t : ok)
                    msg += " " + t;
                throw ConfigError(msg);
            }
    }
}

std::map<std::string, std::string> ExperimentConfig::to_map() const {
    std::map<std::string, std::string> m;
    m["mode"] = mode;
    std::string algs;
    for (const auto & a : algorithms)
        algs += (algs.empty() ? "" : ",") + a;
    m["algorithms"] = algs;
    m["K"] = std::to_string(K);
    m["d"] = std::to_string(d);
    m["T"] = std::to_string(T);
    m["N"] = std::to_string(N);
    m["beta"] = fmt(beta);
    m["lambda"] = fmt(lambda);
    m["sigma"] = fmt(sigma);
    m["arm_norm"] = arm_norm;
    m["learner_beta"] = fmt(effective_learner_beta());
    m["learner_lambda"] = fmt(effective_learner_lambda());
    m["seeds"] = std::to_string(seeds);
    m["master_seed"] = std::to_string(master_seed);
    m["particles"] = std::to_string(particles);
    m["ess_frac"] = fmt(ess_frac);
    m["lints_inflation"] = fmt(lints_inflation);
    m["optimizer"] = optimizer.method == OptimizerSpec::Method::Newton ? "newton" : "gd";
    m["optimizer_max_iters"] = std::to_string(optimizer.max_iters);
    m["optimizer_grad_tol"] = fmt(optimizer.grad_tol);
    m["optimizer_init"] = optimizer.init == OptimizerSpec::Init::PriorMean   ? "prior-mean"
                          : optimizer.init == OptimizerSpec::Init::WarmStart ? "warm-start"
                                                                             : "zero";
    m["feedback_cost"] = fmt(feedback.cost_c);
    m["feedback_eps_scale"] = fmt(feedback.eps_scale);
    m["dpo_eps"] = fmt(dpo_eps);
    m["dpo_tau"] = fmt(dpo_tau);
    m["dpo_min_reward"] = dpo_min_reward;
    m["dpo_max_steps"] = std::to_string(dpo_max_steps);
    m["env"] = env;
    m["S"] = std::to_string(S);
    m["A"] = std::to_string(A);
    m["H"] = std::to_string(H);
    m["episodes"] = std::to_string(episodes);
    m["pspl_N"] = std::to_string(pspl_N);
    m["pspl_beta"] = fmt(pspl_beta);
    m["pspl_lambda"] = fmt(pspl_lambda);
    m["alpha0"] = fmt(alpha0);
    m["river_start"] = river_start;
    m["dirichlet_weight"] = dirichlet_weight;
    m["eval_every"] = std::to_string(eval_every);
    m["T_theory"] = fmt(T_theory);
    m["mu_min"] = fmt(mu_min);
    m["pspl_B"] = fmt(pspl_B);
    m["pspl_delta_min"] = fmt(pspl_delta_min);
    m["delta1"] = fmt(delta1);
    m["out"] = out;
    return m;
}

void load_config_file(ExperimentConfig & cfg, const std::string & path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config: cannot open '" + path + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: " + path + ":" + std::to_string(lineno) + ": expected key = value");
        cfg.set(trim(line.substr(0, eq)), line.substr(eq + 1));
    }
}

} // namespace warmpref
