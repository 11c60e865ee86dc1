#include <warmpref/theory.hpp>

#include <cmath>
#include <limits>

#include <warmpref/bandit_ps.hpp>

namespace warmpref {

InfoConstants info_constants(int K, double T, double beta, double lambda, int d, double mu_min, double N,
                             F2Variant variant) {
    if (K < 1 || !(T >= 1.0) || !(beta > 0.0) || !(lambda > 0.0) || d < 1 || !(N >= 0.0))
        throw DomainError("info_constants: need K, d >= 1, T >= 1, beta > 0, lambda > 0, N >= 0");
    if (!(mu_min > 0.0 && mu_min < 1.0))
        throw DomainError("info_constants: mu_min must lie in (0,1)");
    InfoConstants ic;
    const double Kd = static_cast<double>(K);
    ic.delta_gap = std::log(T * beta) / beta;
    const double m1 = std::min(1.0, ic.delta_gap);
    ic.alpha1 = Kd * m1;
    ic.alpha2 = std::sqrt(2.0 * std::log(2.0 * std::sqrt(static_cast<double>(d)) * T)) / lambda;

    ic.log_rater_term = N * log_sigmoid(beta * (m1 + ic.alpha2 - ic.alpha1));
    ic.f1_tilde = std::exp(ic.log_rater_term) + std::exp(2.0 * N * std::log1p(-mu_min));
    ic.f1 = ic.f1_tilde + 1.0 / T;

    double raw = 0.0;
    if (variant == F2Variant::MainText) {
        const double tail = std::exp(-N * softplus(-beta * ic.alpha2 + ic.alpha1));
        raw = ic.alpha1 * ic.alpha1 + (N * Kd / (T * beta)) * tail + 2.0 / T;
    } else {
        const double tail = std::exp(-N * softplus(-beta * (ic.alpha2 + (Kd - 1.0) * m1)));
        raw = Kd * std::min(1.0, ic.delta_gap * ic.delta_gap / 2.0) + (N * Kd / (T * beta)) * tail + 1.0 / T;
    }
    ic.f2_capped = raw > Kd;
    ic.f2 = std::min(raw, Kd);
    return ic;
}

double regret_bound(const InfoConstants & ic, int K, double T, bool * clamped) {
    bool c = false;
    double inner = 0.0;
    if (ic.f2 > 0.0)
        inner += std::log(ic.f2);
    if (ic.f1 > 0.0)
        inner += ic.f1 * std::log(static_cast<double>(K) / ic.f1);
    double arg = T * ic.f2 * inner;
    if (!(arg >= 0.0)) {
        arg = 0.0;
        c = true;
    }
    double second_arg = 2.0 * std::log(static_cast<double>(K));
    if (!(second_arg >= 0.0)) {
        second_arg = 0.0;
        c = true;
    }
    if (clamped)
        *clamped = c;
    return std::sqrt(arg) + 2.0 * std::sqrt(second_arg) * T * (ic.f1_tilde + 1.0 / T);
}

namespace {

double standardized_margin(const Vector & diff, const PriorSpec & prior) {
    const double v = diff.dot(prior.Sigma0 * diff);
    if (!(v > 0.0))
        throw DomainError("sample complexity: zero prior variance along the arm difference");
    return diff.dot(prior.mu0) / std::sqrt(v);
}

/// ln((c - 1)(1/Phi(x) - 1)) with the complement computed without cancellation.
double log_odds_term(double c, double x, bool & clamped) {
    const double phi = normal_cdf(x);
    const double odds = normal_cdf(-x) / phi; // 1/Phi(x) - 1
    const double arg = (c - 1.0) * odds;
    if (!(arg > 0.0)) {
        clamped = true;
        return -std::numeric_limits<double>::infinity();
    }
    return std::log(arg);
}

} // namespace

SampleComplexity sample_complexity_two_actions(const Vector & a0, const Vector & a1, const Vector & theta0,
                                               const PriorSpec & prior, double beta, double eps) {
    if (!(beta > 0.0))
        throw DomainError("sample complexity: beta must be positive");
    if (!(eps > 0.0 && eps < 1.0))
        throw DomainError("sample complexity: eps must lie in (0,1)");
    const Vector diff = a0 - a1;
    const double gap = diff.dot(theta0);
    if (gap == 0.0)
        throw DomainError("sample complexity: degenerate zero gap");
    SampleComplexity out;
    const double x = standardized_margin(diff, prior);
    const double l = log_odds_term(1.0 / eps, x, out.clamped);
    double n0 = l / (beta * gap);
    if (!(n0 > 0.0)) {
        out.clamped = out.clamped || n0 < 0.0 || std::isnan(n0);
        n0 = 0.0;
    }
    out.N0 = n0;
    out.k_max = n0;
    return out;
}

SampleComplexity sample_complexity_general(const std::vector<Vector> & actions, const Vector & theta0,
                                           const PriorSpec & prior, double beta, double eps, double mu_min) {
    const int K = static_cast<int>(actions.size());
    if (K < 2)
        throw DomainError("sample complexity: need at least two actions");
    if (!(mu_min > 0.0 && mu_min < 1.0))
        throw DomainError("sample complexity: mu_min must lie in (0,1)");
    if (K < 3) {
        const bool first = actions[0].dot(theta0) >= actions[1].dot(theta0);
        SampleComplexity out = first ? sample_complexity_two_actions(actions[0], actions[1], theta0, prior, beta, eps)
                                     : sample_complexity_two_actions(actions[1], actions[0], theta0, prior, beta, eps);
        out.two_action_fallback = true;
        return out;
    }
    if (!(beta > 0.0))
        throw DomainError("sample complexity: beta must be positive");
    if (!(eps > 0.0 && eps < 1.0))
        throw DomainError("sample complexity: eps must lie in (0,1)");
    SampleComplexity out;
    const double Kd = static_cast<double>(K);
    const double c = 2.0 * Kd * Kd / eps;
    double kmax = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (int i = 0; i < K; ++i)
        for (int j = 0; j < K; ++j) {
            if (i == j)
                continue;
            const Vector diff = actions[i] - actions[j];
            const double gap = diff.dot(theta0);
            if (!(gap > 0.0))
                continue;
            any = true;
            const double x = standardized_margin(diff, prior);
            kmax = std::max(kmax, log_odds_term(c, x, out.clamped) / (beta * gap));
        }
    if (!any)
        throw DomainError("sample complexity: all pairwise gaps are zero");
    out.k_max = kmax;
    double n0 = (std::log(Kd) + (kmax - 1.0) * std::log(std::log(Kd))) / (mu_min * mu_min * eps);
    if (!(n0 > 0.0)) {
        out.clamped = true;
        n0 = 0.0;
    }
    out.N0 = n0;
    return out;
}

PsplGamma pspl_gamma(double beta, double lambda, double N, double B, double delta_min, int d) {
    if (!(N > 2.0))
        throw DomainError("pspl_gamma: N must exceed 2");
    if (!(beta >= 0.0) || !(lambda > 0.0) || !(B > 0.0) || !(delta_min >= 0.0) || d < 1)
        throw DomainError("pspl_gamma: invalid parameters");
    const double root = std::sqrt(2.0 * std::log(2.0 * std::sqrt(static_cast<double>(d)) * N));
    const double g = std::exp(-beta * B * root / lambda - beta * delta_min) + 1.0 / N;
    const double denom = std::abs(B * lambda * lambda - 2.0 * delta_min);
    const double thresh = 2.0 * std::log(2.0 * std::sqrt(static_cast<double>(d))) / denom;
    return {g, beta > thresh};
}

double pspl_delta2(double gamma, double N) {
    const double om = 1.0 - gamma;
    return 2.0 * std::exp(-N * (1.0 + gamma) * (1.0 + gamma)) + std::exp(-(N / 4.0) * om * om * om);
}

PsplConstants pspl_constants(double beta, double lambda, double N, double B, double delta_min, int d) {
    const PsplGamma g = pspl_gamma(beta, lambda, N, B, delta_min, d);
    PsplConstants pc;
    pc.gamma = g.gamma;
    pc.valid = g.valid;
    pc.delta2 = pspl_delta2(g.gamma, N);
    pc.B = B;
    pc.delta_min = delta_min;
    pc.N = N;
    return pc;
}

double pspl_simple_regret_bound(int S, int A, int H, double K_episodes, double delta1, const PsplConstants & pc) {
    if (S < 1 || A < 1 || H < 1 || !(K_episodes >= 1.0))
        throw DomainError("pspl_simple_regret_bound: sizes must be positive");
    if (!(delta1 > 0.0 && delta1 < 1.0 / 3.0))
        throw DomainError("pspl_simple_regret_bound: delta1 must lie in (0, 1/3)");
    const double s = S, a = A, h = H;
    const double lsah = std::log(s * a * h / delta1);
    const double denom = 2.0 * K_episodes * (1.0 + lsah) - lsah;
    if (!(denom > 0.0))
        throw DomainError("pspl_simple_regret_bound: non-positive denominator");
    const double num = 20.0 * pc.delta2 * s * s * a * h * h * h * std::log(2.0 * K_episodes * s * a / delta1);
    return std::sqrt(std::max(0.0, num / denom));
}

InformativenessEstimate mc_verify_informativeness(const InformativenessSpec & spec, int trials, std::uint64_t seed) {
    if (trials < 1)
        throw ConfigError("mc_verify_informativeness: trials must be positive");
    const PriorSpec prior = spec.prior.dim() == spec.d ? spec.prior : PriorSpec::standard(spec.d);
    const SamplingDist mu = SamplingDist::uniform(spec.K);
    double hit = 0.0, sz = 0.0, sz2 = 0.0;
    for (int i = 0; i < trials; ++i) {
        Rng rng = make_rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
        const Environment env = sample_environment(spec.d, spec.K, rng, prior);
        const Rater rater = make_rater(env.theta, spec.beta, spec.lambda, rng);
        const OfflinePrefDataset D0 = generate_offline_dataset(env, rater, mu, spec.N, rng);
        const auto U = build_info_set(D0, spec.K);
        hit += U.count(env.best_arm()) ? 1.0 : 0.0;
        const double s = static_cast<double>(U.size());
        sz += s;
        sz2 += s * s;
    }
    const double n = trials;
    InformativenessEstimate out;
    out.trials = trials;
    out.p_contains = hit / n;
    out.p_se = std::sqrt(std::max(0.0, out.p_contains * (1.0 - out.p_contains)) / n);
    out.size_mean = sz / n;
    const double var = trials > 1 ? std::max(0.0, (sz2 - n * out.size_mean * out.size_mean) / (n - 1.0)) : 0.0;
    out.size_se = std::sqrt(var / n);
    return out;
}

} // namespace warmpref
