#include <warmpref/optim.hpp>

#include <cmath>
#include <limits>

namespace warmpref {

namespace {

constexpr double armijo_c = 1e-4;
constexpr double round_level = 1e-15;

OptimResult newton(const Objective & f, Vector x, const OptimizerSpec & spec) {
    const Eigen::Index n = x.size();
    Vector g(n);
    Matrix H(n, n);
    double fx = f(x, &g, &H);
    OptimResult res;
    for (int it = 0; it < spec.max_iters; ++it) {
        res.iters = it;
        const double gn = g.norm();
        if (!std::isfinite(fx) || !std::isfinite(gn))
            throw NumericalError("minimize: non-finite objective or gradient");
        if (gn <= spec.grad_tol) {
            res.converged = true;
            break;
        }
        Eigen::LDLT<Matrix> ldlt(H);
        Vector dx = -ldlt.solve(g);
        double dec2 = -g.dot(dx);
        if (ldlt.info() != Eigen::Success || !dx.allFinite() || !(dec2 > 0.0)) {
            // Hessian numerically singular: fall back to a scaled gradient step.
            dx = -g / std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
            dec2 = -g.dot(dx);
        }
        if (0.5 * dec2 <= round_level * (1.0 + std::abs(fx))) {
            res.converged = true;
            break;
        }
        double step = 1.0;
        Vector xn(n);
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            xn = x + step * dx;
            const double fn = f(xn, nullptr, nullptr);
            if (std::isfinite(fn) && fn < fx && fn <= fx - armijo_c * step * dec2) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            // No representable decrease left along the Newton direction.
            res.converged = 0.5 * dec2 <= 1e3 * round_level * (1.0 + std::abs(fx));
            break;
        }
        x = xn;
        fx = f(x, &g, &H);
        res.iters = it + 1;
    }
    res.x = std::move(x);
    res.value = fx;
    res.grad_norm = g.norm();
    if (res.iters >= spec.max_iters && !res.converged)
        res.converged = res.grad_norm <= spec.grad_tol;
    return res;
}

OptimResult gradient_descent(const Objective & f, Vector x, const OptimizerSpec & spec) {
    const Eigen::Index n = x.size();
    Vector g(n);
    double fx = f(x, &g, nullptr);
    double step = 1.0;
    OptimResult res;
    for (int it = 0; it < spec.max_iters; ++it) {
        res.iters = it;
        const double gn2 = g.squaredNorm();
        if (!std::isfinite(fx) || !std::isfinite(gn2))
            throw NumericalError("minimize: non-finite objective or gradient");
        if (std::sqrt(gn2) <= spec.grad_tol) {
            res.converged = true;
            break;
        }
        bool accepted = false;
        Vector xn(n);
        for (int ls = 0; ls < 80; ++ls) {
            xn = x - step * g;
            const double fn = f(xn, nullptr, nullptr);
            if (std::isfinite(fn) && fn < fx && fn <= fx - armijo_c * step * gn2) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted)
            break;
        x = xn;
        fx = f(x, &g, nullptr);
        step *= 2.0; // let the step grow back after easy regions
        res.iters = it + 1;
    }
    res.x = std::move(x);
    res.value = fx;
    res.grad_norm = g.norm();
    res.converged = res.converged || res.grad_norm <= spec.grad_tol;
    return res;
}

} // namespace

OptimResult minimize(const Objective & f, Vector x0, const OptimizerSpec & spec) {
    if (spec.max_iters < 1 || !(spec.grad_tol > 0.0))
        throw ConfigError("minimize: max_iters must be positive and grad_tol > 0");
    if (spec.method == OptimizerSpec::Method::Newton)
        return newton(f, std::move(x0), spec);
    return gradient_descent(f, std::move(x0), spec);
}

} // namespace warmpref
