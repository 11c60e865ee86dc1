#ifndef WARMPREF_THEORY_HPP
#define WARMPREF_THEORY_HPP

#include <warmpref/model.hpp>

namespace warmpref {

struct InfoConstants {
    double f1_tilde = 0.0;
    double f1 = 0.0;
    double f2 = 0.0;
    double delta_gap = 0.0; ///< ln(T beta) / beta
    double alpha1 = 0.0;    ///< K min(1, delta_gap)
    double alpha2 = 0.0;    ///< sqrt(2 ln(2 sqrt(d) T)) / lambda
    /// N * log(rater term) of f1_tilde; stays informative after the term itself underflows.
    double log_rater_term = 0.0;
    bool f2_capped = false;
};

enum class F2Variant {
    MainText, ///< (alpha1)^2 + (NK / T beta)(1 + exp(-beta alpha2 + alpha1))^-N + 2/T
    Proof,    ///< K min(1, Delta^2/2) + (NK / T beta)(1 + exp(-beta(alpha2 + (K-1)min(1,Delta))))^-N + 1/T
};

InfoConstants info_constants(int K, double T, double beta, double lambda, int d, double mu_min, double N,
                             F2Variant variant = F2Variant::MainText);

/// sqrt(T f2 (ln f2 + f1 ln(K/f1))) + 2 sqrt(2 ln K) T (f1_tilde + 1/T), negative inner parts clamped to 0.
double regret_bound(const InfoConstants & ic, int K, double T, bool * clamped = nullptr);

struct SampleComplexity {
    double N0 = 0.0;
    double k_max = 0.0;
    bool clamped = false;       ///< a log argument or the result was clamped at 0
    bool two_action_fallback = false;
};

SampleComplexity sample_complexity_two_actions(const Vector & a0, const Vector & a1, const Vector & theta0,
                                               const PriorSpec & prior, double beta, double eps);

/// General K. For K < 3 delegates to the two-action form (best pair by theta0) with the fallback flag set.
SampleComplexity sample_complexity_general(const std::vector<Vector> & actions, const Vector & theta0,
                                           const PriorSpec & prior, double beta, double eps, double mu_min);

struct PsplConstants {
    double gamma = 0.0;
    double delta2 = 0.0;
    double B = 1.0;
    double delta_min = 0.0;
    double N = 0.0;
    bool valid = false; ///< beta exceeds 2 ln(2 sqrt(d)) / |B lambda^2 - 2 delta_min|
};

struct PsplGamma {
    double gamma;
    bool valid;
};

PsplGamma pspl_gamma(double beta, double lambda, double N, double B, double delta_min, int d);

/// 2 exp(-N (1+gamma)^2) + exp(-(N/4)(1-gamma)^3).
double pspl_delta2(double gamma, double N);

PsplConstants pspl_constants(double beta, double lambda, double N, double B, double delta_min, int d);

/// sqrt(20 delta2 S^2 A H^3 ln(2KSA/delta1) / (2K(1 + ln(SAH/delta1)) - ln(SAH/delta1))).
/// The bandit case is S = H = 1.
double pspl_simple_regret_bound(int S, int A, int H, double K_episodes, double delta1, const PsplConstants & pc);

struct InformativenessSpec {
    int d = 6;
    int K = 10;
    double beta = 1.0;
    double lambda = 1.0;
    int N = 20;
    PriorSpec prior; ///< defaults to N(0, I_d) when empty
};

struct InformativenessEstimate {
    double p_contains = 0.0; ///< empirical P(A* in U)
    double p_se = 0.0;
    double size_mean = 0.0;  ///< empirical E|U|
    double size_se = 0.0;
    int trials = 0;
};

/// Monte Carlo over environments, rater draws and datasets (uniform arm sampling).
/// Trial i uses the stream derived from (seed, i), so results do not depend on scheduling.
InformativenessEstimate mc_verify_informativeness(const InformativenessSpec & spec, int trials, std::uint64_t seed);

} // namespace warmpref

#endif
