#ifndef WARMPREF_OPTIM_HPP
#define WARMPREF_OPTIM_HPP

#include <functional>

#include <warmpref/common.hpp>

namespace warmpref {

struct OptimizerSpec {
    enum class Method { Newton, GradientDescent };
    enum class Init { PriorMean, WarmStart, Zero };

    Method method = Method::Newton;
    Init init = Init::PriorMean;
    int max_iters = 10000;
    double grad_tol = 1e-8;
};

struct OptimResult {
    Vector x;
    double value = 0.0;
    double grad_norm = 0.0;
    int iters = 0;
    bool converged = false;
};

/// Smooth convex objective. Fills grad and hess when non-null.
using Objective = std::function<double(const Vector & x, Vector * grad, Matrix * hess)>;

/// Minimizes a smooth convex objective with Armijo backtracking.
///
/// Newton: stops on ||g|| <= grad_tol or when the Newton decrement g^T H^-1 g / 2
/// falls below the rounding level of f, whichever comes first. The second test
/// matters for badly scaled losses where ||g|| cannot reach grad_tol in doubles.
/// Gradient descent: stops on ||g|| <= grad_tol only.
/// Returns the best iterate; converged is false if max_iters was reached.
OptimResult minimize(const Objective & f, Vector x0, const OptimizerSpec & spec);

} // namespace warmpref

#endif
