#include <warmpref/bootstrap.hpp>

#include <cmath>

namespace warmpref {

void LossParams::validate() const {
    if (!(beta >= 0.0) || !(lambda > 0.0))
        throw DomainError("loss: need beta >= 0 and lambda > 0");
    if (!(noise_sigma > 0.0))
        throw DomainError("loss: noise_sigma must be positive");
    prior.validate();
    const int K = static_cast<int>(actions.size());
    for (const auto & a : actions)
        if (a.size() != dim())
            throw ConfigError("loss: arm dimension mismatch");
    D0.validate(K);
    for (const auto & s : history.steps)
        if (s.arm < 0 || s.arm >= K || !std::isfinite(s.reward))
            throw ConfigError("loss: invalid history step");
    for (const auto & r : extra_raters) {
        if (!(r.beta >= 0.0) || !(r.lambda > 0.0))
            throw DomainError("loss: extra rater needs beta >= 0 and lambda > 0");
        r.data.validate(K);
    }
}

PerturbationSet PerturbationSet::none(const LossParams & p) {
    const Eigen::Index d = p.dim();
    PerturbationSet s;
    s.zeta = Vector::Zero(static_cast<Eigen::Index>(p.history.size()));
    s.omega.assign(p.D0.size(), 1.0);
    s.theta_prime = Vector::Zero(d);
    s.vartheta_prime = Vector::Zero(d);
    for (const auto & r : p.extra_raters) {
        s.extra_omega.emplace_back(r.data.size(), 1.0);
        s.extra_vartheta_prime.push_back(Vector::Zero(d));
    }
    return s;
}

namespace {

/// Adds sum_n w_n softplus(beta <A_lose - A_win, v>) for one rater block at offset off.
double offline_term(const OfflinePrefDataset & D, const std::vector<double> & w, double beta,
                    const std::vector<Vector> & actions, const Vector & x, Eigen::Index off, Eigen::Index d,
                    Vector * grad, Matrix * hess) {
    double val = 0.0;
    const auto v = x.segment(off, d);
    for (std::size_t n = 0; n < D.size(); ++n) {
        if (w[n] == 0.0)
            continue;
        const auto & e = D.entries[n];
        const Vector delta = actions[e.loser()] - actions[e.winner()];
        const double u = beta * delta.dot(v);
        val += w[n] * softplus(u);
        if (grad || hess) {
            const double s = sigmoid(u);
            if (grad)
                grad->segment(off, d) += (w[n] * beta * s) * delta;
            if (hess)
                hess->block(off, off, d, d) += (w[n] * beta * beta * s * (1.0 - s)) * (delta * delta.transpose());
        }
    }
    return val;
}

/// lambda^2/2 ||theta - v + v'||^2 between the theta block and the block at off.
double coupling_term(double lambda, const Vector & vprime, const Vector & x, Eigen::Index off, Eigen::Index d,
                     Vector * grad, Matrix * hess) {
    const double l2 = lambda * lambda;
    const Vector r = x.head(d) - x.segment(off, d) + vprime;
    if (grad) {
        grad->head(d) += l2 * r;
        grad->segment(off, d) -= l2 * r;
    }
    if (hess) {
        hess->block(0, 0, d, d).diagonal().array() += l2;
        hess->block(off, off, d, d).diagonal().array() += l2;
        hess->block(0, off, d, d).diagonal().array() -= l2;
        hess->block(off, 0, d, d).diagonal().array() -= l2;
    }
    return 0.5 * l2 * r.squaredNorm();
}

double loss_impl(const Vector & x, const LossParams & p, const PerturbationSet & pert, const Matrix & prec,
                 Vector * grad, Matrix * hess) {
    const Eigen::Index d = p.dim();
    if (grad)
        grad->setZero(x.size());
    if (hess)
        hess->setZero(x.size(), x.size());
    const auto theta = x.head(d);
    double val = 0.0;

    // Online rewards.
    const double inv_s2 = 1.0 / (p.noise_sigma * p.noise_sigma);
    for (std::size_t s = 0; s < p.history.size(); ++s) {
        const auto & st = p.history.steps[s];
        const Vector & a = p.actions[st.arm];
        const double res = st.reward + pert.zeta[static_cast<Eigen::Index>(s)] - a.dot(theta);
        val += 0.5 * inv_s2 * res * res;
        if (grad)
            grad->head(d) -= (inv_s2 * res) * a;
        if (hess)
            hess->block(0, 0, d, d) += inv_s2 * (a * a.transpose());
    }

    // Offline preferences.
    val += offline_term(p.D0, pert.omega, p.beta, p.actions, x, d, d, grad, hess);
    for (std::size_t r = 0; r < p.extra_raters.size(); ++r)
        val += offline_term(p.extra_raters[r].data, pert.extra_omega[r], p.extra_raters[r].beta, p.actions, x,
                            static_cast<Eigen::Index>(2 + r) * d, d, grad, hess);

    // Priors.
    val += coupling_term(p.lambda, pert.vartheta_prime, x, d, d, grad, hess);
    for (std::size_t r = 0; r < p.extra_raters.size(); ++r)
        val += coupling_term(p.extra_raters[r].lambda, pert.extra_vartheta_prime[r], x,
                             static_cast<Eigen::Index>(2 + r) * d, d, grad, hess);
    const Vector c = theta - p.prior.mu0 - pert.theta_prime;
    const Vector pc = prec * c;
    val += 0.5 * c.dot(pc);
    if (grad)
        grad->head(d) += pc;
    if (hess)
        hess->block(0, 0, d, d) += prec;
    return val;
}

Matrix precision(const PriorSpec & prior) {
    Eigen::LLT<Matrix> llt(prior.Sigma0);
    if (llt.info() != Eigen::Success)
        throw NumericalError("loss: Sigma0 is not positive definite");
    Matrix P = llt.solve(Matrix::Identity(prior.dim(), prior.dim()));
    return 0.5 * (P + P.transpose());
}

void check_sizes(const LossParams & p, const PerturbationSet & pert) {
    if (pert.zeta.size() != static_cast<Eigen::Index>(p.history.size()) || pert.omega.size() != p.D0.size() ||
        pert.theta_prime.size() != p.dim() || pert.vartheta_prime.size() != p.dim() ||
        pert.extra_omega.size() != p.extra_raters.size() ||
        pert.extra_vartheta_prime.size() != p.extra_raters.size())
        throw ConfigError("perturbation set does not match the dataset");
    for (std::size_t r = 0; r < p.extra_raters.size(); ++r)
        if (pert.extra_omega[r].size() != p.extra_raters[r].data.size())
            throw ConfigError("perturbation set does not match an extra rater's dataset");
}

} // namespace

double perturbed_loss(const Vector & x, const LossParams & p, const PerturbationSet & pert, Vector * grad,
                      Matrix * hess) {
    check_sizes(p, pert);
    if (x.size() != p.n_vars())
        throw ConfigError("perturbed_loss: variable has wrong length");
    return loss_impl(x, p, pert, precision(p.prior), grad, hess);
}

LossValue surrogate_loss(const Vector & theta, const Vector & vartheta, const LossParams & p) {
    LossParams base = p;
    base.extra_raters.clear();
    Vector x(2 * p.dim());
    x << theta, vartheta;
    LossValue out;
    out.value = perturbed_loss(x, base, PerturbationSet::none(base), &out.gradient, nullptr);
    return out;
}

PerturbationSet perturb(const LossParams & p, Rng & rng) {
    const Eigen::Index d = p.dim();
    std::normal_distribution<double> z(0.0, p.noise_sigma);
    std::bernoulli_distribution coin(0.5);
    PerturbationSet s;
    s.zeta.resize(static_cast<Eigen::Index>(p.history.size()));
    for (Eigen::Index i = 0; i < s.zeta.size(); ++i)
        s.zeta[i] = z(rng);
    s.omega.resize(p.D0.size());
    for (auto & w : s.omega)
        w = coin(rng) ? 1.0 : 0.0;
    s.theta_prime = p.prior.chol() * standard_normal(d, rng);
    s.vartheta_prime = standard_normal(d, rng) / p.lambda;
    for (const auto & r : p.extra_raters) {
        std::vector<double> w(r.data.size());
        for (auto & v : w)
            v = coin(rng) ? 1.0 : 0.0;
        s.extra_omega.push_back(std::move(w));
        s.extra_vartheta_prime.push_back(standard_normal(d, rng) / r.lambda);
    }
    return s;
}

PerturbationSet perturb(const LossParams & p, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    return perturb(p, rng);
}

MapResult perturbed_map(const LossParams & p, const PerturbationSet & pert, const OptimizerSpec & opt,
                        const Vector * x0) {
    check_sizes(p, pert);
    const Eigen::Index d = p.dim();
    const Eigen::Index n = p.n_vars();
    const Matrix prec = precision(p.prior);
    Vector start(n);
    if (x0 && x0->size() == n) {
        start = *x0;
    } else if (opt.init == OptimizerSpec::Init::Zero) {
        start.setZero();
    } else {
        for (Eigen::Index b = 0; b < n / d; ++b)
            start.segment(b * d, d) = p.prior.mu0;
    }
    const Objective f = [&](const Vector & x, Vector * g, Matrix * h) { return loss_impl(x, p, pert, prec, g, h); };
    const OptimResult r = minimize(f, start, opt);
    MapResult out;
    out.x = r.x;
    out.theta = r.x.head(d);
    out.vartheta = r.x.segment(d, d);
    out.converged = r.converged;
    out.iters = r.iters;
    return out;
}

BootStepResult bootstrapped_step(LossParams & p, const Environment & env, Rng & rng, const OptimizerSpec & opt,
                                 Vector * warm) {
    const PerturbationSet pert = perturb(p, rng);
    const bool use_warm = warm && opt.init == OptimizerSpec::Init::WarmStart;
    const MapResult m = perturbed_map(p, pert, opt, use_warm ? warm : nullptr);
    if (warm)
        *warm = m.x;
    const int arm = greedy_arm(p.actions, m.theta);
    const double r = reward_sample(env, arm, rng);
    p.history.steps.push_back({arm, r});
    return {arm, r, m.converged};
}

double estimate_beta_mle(const OfflinePrefDataset & D0, const std::vector<Vector> & actions,
                         const PriorSpec & prior, double lambda) {
    (void)prior;
    (void)lambda;
    if (D0.empty())
        throw DomainError("estimate_beta_mle: need at least one comparison");
    if (actions.empty())
        throw ConfigError("estimate_beta_mle: no actions");
    D0.validate(static_cast<int>(actions.size()));
    const Eigen::Index d = actions[0].size();
    constexpr double ridge = 1e-6;
    std::vector<Vector> deltas;
    deltas.reserve(D0.size());
    for (const auto & e : D0.entries)
        deltas.push_back(actions[e.loser()] - actions[e.winner()]);
    const Objective f = [&](const Vector & v, Vector * g, Matrix * h) {
        double val = ridge * v.squaredNorm();
        if (g)
            *g = 2.0 * ridge * v;
        if (h)
            *h = 2.0 * ridge * Matrix::Identity(d, d);
        for (const auto & dl : deltas) {
            const double u = dl.dot(v);
            val += softplus(u);
            if (g || h) {
                const double s = sigmoid(u);
                if (g)
                    *g += s * dl;
                if (h)
                    *h += (s * (1.0 - s)) * (dl * dl.transpose());
            }
        }
        return val;
    };
    OptimizerSpec spec;
    spec.grad_tol = 1e-9;
    spec.max_iters = 500;
    const OptimResult r = minimize(f, Vector::Zero(d), spec);
    return r.x.norm();
}

EntropyEstimate estimate_beta_entropy(const OfflinePrefDataset & D0, int K, double c, double beta_max) {
    if (D0.empty())
        throw DomainError("estimate_beta_entropy: dataset is empty");
    if (!(c >= 0.0))
        throw DomainError("estimate_beta_entropy: c must be nonnegative");
    D0.validate(K);
    std::vector<double> counts(K, 0.0);
    for (const auto & e : D0.entries) {
        counts[e.idx0] += 1.0;
        counts[e.idx1] += 1.0;
    }
    const double total = 2.0 * static_cast<double>(D0.size());
    double H = 0.0;
    for (double n : counts)
        if (n > 0.0)
            H -= (n / total) * std::log(n / total);
    EntropyEstimate out{0.0, H, false};
    if (c == 0.0)
        return out;
    if (H <= 0.0) {
        out.beta_hat = beta_max;
        out.capped = true;
        return out;
    }
    out.beta_hat = std::min(c / H, beta_max);
    out.capped = c / H > beta_max;
    return out;
}

} // namespace warmpref
