#ifndef WARMPREF_ORACLE_HPP
#define WARMPREF_ORACLE_HPP

#include <functional>
#include <string>

#include <warmpref/pspl.hpp>

namespace warmpref {

/// Optimal step-0 value per start state by enumerating all A^(S*H)
/// deterministic Markov policies. Throws ConfigError above max_policies.
Vector brute_force_optimal_values(const TabularMDP & mdp, double max_policies = 1e5);

/// Largest relative error between an analytic gradient and central
/// differences, with relative error |g - g_fd| / max(1, |g|, |g_fd|) per coordinate.
double gradient_check(const std::function<double(const Vector &, Vector *)> & f, const Vector & x, double h = 1e-6);

struct OracleReport {
    std::string name;
    bool passed;
    std::string detail;
};

/// Quick oracle suites: planning vs brute force, loss gradients vs finite
/// differences, particle and perturbed-MAP posteriors vs grid quadrature.
std::vector<OracleReport> run_oracle_suites(std::uint64_t seed);

} // namespace warmpref

#endif
