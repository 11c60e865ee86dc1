#include <warmpref/bandit_ps.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace warmpref {

int greedy_arm(const std::vector<Vector> & actions, const Vector & theta) {
    int best = 0;
    double v = actions[0].dot(theta);
    for (int i = 1; i < static_cast<int>(actions.size()); ++i) {
        const double r = actions[i].dot(theta);
        if (r > v) {
            v = r;
            best = i;
        }
    }
    return best;
}

GaussianBelief conjugate_update(const GaussianBelief & belief, const Vector & arm, double reward, double sigma) {
    if (!(sigma > 0.0))
        throw DomainError("conjugate_update: sigma must be positive");
    const Vector Sa = belief.cov * arm;
    const double s = sigma * sigma + arm.dot(Sa);
    if (!(s > 0.0) || !std::isfinite(s))
        throw NumericalError("conjugate_update: predictive variance is not positive");
    GaussianBelief out;
    out.mean = belief.mean + Sa * ((reward - arm.dot(belief.mean)) / s);
    out.cov = belief.cov - (Sa * Sa.transpose()) / s;
    out.cov = 0.5 * (out.cov + out.cov.transpose());
    return out;
}

int sample_gaussian_arm(const GaussianBelief & belief, const std::vector<Vector> & actions, Rng & rng,
                        double inflation) {
    if (!(inflation >= 0.0))
        throw DomainError("sample_gaussian_arm: inflation must be nonnegative");
    // Always consume d normals so the stream does not depend on inflation.
    const Vector z = standard_normal(belief.mean.size(), rng);
    if (inflation == 0.0)
        return greedy_arm(actions, belief.mean);
    Eigen::LLT<Matrix> llt(belief.cov);
    Vector theta;
    if (llt.info() == Eigen::Success) {
        theta = belief.mean + std::sqrt(inflation) * Vector(llt.matrixL() * z);
    } else {
        // Semidefinite covariance: fall back to the symmetric square root.
        Eigen::SelfAdjointEigenSolver<Matrix> es(belief.cov);
        const Vector ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
        theta = belief.mean + std::sqrt(inflation) * (es.eigenvectors() * ev.asDiagonal() * z);
    }
    return greedy_arm(actions, theta);
}

StepResult lin_ts_step(GaussianBelief & belief, const Environment & env, Rng & rng, double inflation) {
    if (!(inflation > 0.0))
        throw DomainError("lin_ts_step: inflation must be positive");
    const int arm = sample_gaussian_arm(belief, env.actions, rng, inflation);
    const double r = reward_sample(env, arm, rng);
    belief = conjugate_update(belief, env.actions[arm], r, std::max(env.noise_sigma, 1e-12));
    return {arm, r};
}

StepResult vanilla_ps_step(GaussianBelief & belief, const Environment & env, Rng & rng) {
    return lin_ts_step(belief, env, rng, 1.0);
}

double offline_log_likelihood(const OfflinePrefDataset & D0, const std::vector<Vector> & actions,
                              const Vector & vartheta, double beta) {
    double ll = 0.0;
    for (const auto & e : D0.entries)
        ll += log_sigmoid(beta * (actions[e.winner()] - actions[e.loser()]).dot(vartheta));
    return ll;
}

namespace {

/// Turns log-weights into normalized weights. Returns false if no finite weight exists.
bool normalize_log_weights(const Vector & lw, Vector & w) {
    const double m = lw.maxCoeff();
    if (!std::isfinite(m))
        return false;
    w = (lw.array() - m).exp().matrix();
    const double s = w.sum();
    if (!(s > 0.0) || !std::isfinite(s))
        return false;
    w /= s;
    return true;
}

/// Normalizes with repeated tempering of the log-likelihood part if needed.
bool normalize_tempered(const Vector & log_base, Vector log_lik, Vector & w) {
    bool tempered = false;
    for (int k = 0; k < 64; ++k) {
        Vector lw = log_base + log_lik;
        for (Eigen::Index i = 0; i < lw.size(); ++i)
            if (std::isnan(lw[i]))
                lw[i] = -std::numeric_limits<double>::infinity();
        if (normalize_log_weights(lw, w))
            return tempered;
        tempered = true;
        log_lik *= 0.5;
    }
    w = Vector::Constant(log_base.size(), 1.0 / static_cast<double>(log_base.size()));
    return true;
}

} // namespace

ParticleBelief informed_prior_particles(const PriorSpec & prior, double lambda, double beta,
                                        const OfflinePrefDataset & D0, const std::vector<Vector> & actions,
                                        int M, Rng & rng) {
    if (M < 1)
        throw ConfigError("informed_prior_particles: M must be positive");
    if (!(lambda > 0.0) || !(beta >= 0.0))
        throw DomainError("informed_prior_particles: need lambda > 0 and beta >= 0");
    D0.validate(static_cast<int>(actions.size()));
    const Eigen::Index d = prior.dim();
    const Matrix L = prior.chol();
    ParticleBelief b;
    b.thetas.resize(d, M);
    b.varthetas.resize(d, M);
    for (int m = 0; m < M; ++m) {
        b.thetas.col(m) = sample_gaussian(prior.mu0, L, rng);
        b.varthetas.col(m) = b.thetas.col(m) + standard_normal(d, rng) / lambda;
    }
    Matrix diffs(d, static_cast<Eigen::Index>(D0.size()));
    for (std::size_t n = 0; n < D0.size(); ++n) {
        const auto & e = D0.entries[n];
        diffs.col(static_cast<Eigen::Index>(n)) = beta * (actions[e.winner()] - actions[e.loser()]);
    }
    Vector ll = Vector::Zero(M);
    if (D0.size() > 0) {
        const Matrix u = diffs.transpose() * b.varthetas; // N x M
        for (int m = 0; m < M; ++m) {
            double s = 0.0;
            for (Eigen::Index n = 0; n < u.rows(); ++n)
                s += log_sigmoid(u(n, m));
            ll[m] = s;
        }
    }
    b.tempered = normalize_tempered(Vector::Zero(M), ll, b.weights);
    return b;
}

ParticleBelief sir_resample(const ParticleBelief & belief, Rng & rng) {
    const Eigen::Index M = belief.size();
    std::uniform_real_distribution<double> u(0.0, 1.0 / static_cast<double>(M));
    double pos = u(rng);
    ParticleBelief out;
    out.thetas.resize(belief.thetas.rows(), M);
    out.varthetas.resize(belief.varthetas.rows(), M);
    out.weights = Vector::Constant(M, 1.0 / static_cast<double>(M));
    out.tempered = belief.tempered;
    double cum = belief.weights[0];
    Eigen::Index src = 0;
    for (Eigen::Index m = 0; m < M; ++m) {
        while (pos > cum && src + 1 < M)
            cum += belief.weights[++src];
        out.thetas.col(m) = belief.thetas.col(src);
        out.varthetas.col(m) = belief.varthetas.col(src);
        pos += 1.0 / static_cast<double>(M);
    }
    return out;
}

bool maybe_resample(ParticleBelief & belief, Rng & rng, double threshold_frac) {
    if (belief.ess() >= threshold_frac * static_cast<double>(belief.size()))
        return false;
    belief = sir_resample(belief, rng);
    return true;
}

int sample_particle(const ParticleBelief & belief, Rng & rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double x = u(rng);
    double cum = 0.0;
    for (Eigen::Index m = 0; m < belief.size(); ++m) {
        cum += belief.weights[m];
        if (x < cum)
            return static_cast<int>(m);
    }
    // Rounding left x above the total; take the last particle with positive weight.
    for (Eigen::Index m = belief.size() - 1; m >= 0; --m)
        if (belief.weights[m] > 0.0)
            return static_cast<int>(m);
    return 0;
}

void reweight_reward(ParticleBelief & belief, const Vector & arm, double reward, double sigma) {
    if (!(sigma > 0.0))
        throw DomainError("reweight_reward: sigma must be positive");
    if (!std::isfinite(sigma))
        return;
    const Vector pred = belief.thetas.transpose() * arm;
    const Vector ll = (-0.5 * ((pred.array() - reward) / sigma).square()).matrix();
    const Vector log_base = belief.weights.array().log().matrix();
    const bool t = normalize_tempered(log_base, ll, belief.weights);
    belief.tempered = belief.tempered || t;
}

StepResult warmpref_ps_step(ParticleBelief & belief, const Environment & env, double sigma, Rng & rng,
                            double ess_frac) {
    const int m = sample_particle(belief, rng);
    const int arm = greedy_arm(env.actions, belief.thetas.col(m));
    const double r = reward_sample(env, arm, rng);
    reweight_reward(belief, env.actions[arm], r, sigma);
    maybe_resample(belief, rng, ess_frac);
    return {arm, r};
}

std::set<int> build_info_set(const OfflinePrefDataset & D0, int K) {
    std::vector<char> seen(K, 0), won(K, 0);
    for (const auto & e : D0.entries) {
        if (e.idx0 < 0 || e.idx0 >= K || e.idx1 < 0 || e.idx1 >= K)
            throw DomainError("build_info_set: arm index out of range");
        seen[e.idx0] = seen[e.idx1] = 1;
        won[e.winner()] = 1;
    }
    std::set<int> U;
    for (int k = 0; k < K; ++k)
        if (won[k] || !seen[k])
            U.insert(k);
    return U;
}

std::vector<double> GridPosterior::cdf_first_axis() const {
    const Eigen::Index n0 = axes[0].size();
    std::vector<double> cdf(n0, 0.0);
    const Eigen::Index n1 = mass.size() / n0;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n0; ++i) {
        for (Eigen::Index j = 0; j < n1; ++j)
            acc += mass[i + j * n0];
        cdf[i] = acc;
    }
    return cdf;
}

namespace {

/// Normalized discrete Gaussian weights with standard deviation sd (in lattice units), half width e.
std::vector<double> lattice_kernel(double sd_units, int e) {
    std::vector<double> k(2 * e + 1);
    double s = 0.0;
    for (int i = -e; i <= e; ++i) {
        const double z = sd_units > 0.0 ? i / sd_units : (i == 0 ? 0.0 : std::numeric_limits<double>::infinity());
        k[i + e] = std::exp(-0.5 * z * z);
        s += k[i + e];
    }
    for (auto & v : k)
        v /= s;
    return k;
}

} // namespace

GridPosterior exact_posterior_grid(const PriorSpec & prior, double lambda, double beta,
                                   const OfflinePrefDataset & D0, const std::vector<Vector> & actions,
                                   const History & history, double sigma, const GridSpec & grid) {
    const Eigen::Index d = prior.dim();
    if (d > 2)
        throw UnsupportedDimension("exact_posterior_grid: only d <= 2 is supported");
    if (!(lambda > 0.0) || !(beta >= 0.0) || !(sigma > 0.0))
        throw DomainError("exact_posterior_grid: need lambda > 0, beta >= 0, sigma > 0");
    const int n = grid.points_per_axis > 0 ? grid.points_per_axis : (d == 1 ? 4097 : 257);
    if (n < 256)
        throw ConfigError("exact_posterior_grid: need at least 256 points per axis");
    prior.validate();

    GridPosterior out;
    std::array<double, 2> pitch{1.0, 1.0}, lo{0.0, 0.0};
    std::array<int, 2> npts{1, 1}, ext{0, 0};
    for (Eigen::Index j = 0; j < d; ++j) {
        const double hw = grid.half_width_sd * std::sqrt(prior.Sigma0(j, j));
        lo[j] = prior.mu0[j] - hw;
        pitch[j] = 2.0 * hw / (n - 1);
        npts[j] = n;
        out.axes.push_back(Vector::LinSpaced(n, lo[j], lo[j] + pitch[j] * (n - 1)));
        const double e = std::ceil(8.0 / (lambda * pitch[j]));
        ext[j] = static_cast<int>(std::min(e, 4.0 * n));
    }

    // Offline likelihood on the extended vartheta lattice.
    const int g0 = npts[0] + 2 * ext[0], g1 = npts[1] + 2 * ext[1];
    std::vector<Vector> diffs;
    for (const auto & e : D0.entries)
        diffs.push_back(beta * (actions[e.winner()] - actions[e.loser()]));
    std::vector<double> lg(static_cast<std::size_t>(g0) * g1, 0.0);
    double lg_max = -std::numeric_limits<double>::infinity();
    Vector v(d);
    for (int j = 0; j < g1; ++j) {
        for (int i = 0; i < g0; ++i) {
            v[0] = lo[0] + (i - ext[0]) * pitch[0];
            if (d == 2)
                v[1] = lo[1] + (j - ext[1]) * pitch[1];
            double s = 0.0;
            for (const auto & df : diffs)
                s += log_sigmoid(df.dot(v));
            lg[i + static_cast<std::size_t>(j) * g0] = s;
            lg_max = std::max(lg_max, s);
        }
    }
    std::vector<double> g(lg.size());
    for (std::size_t k = 0; k < lg.size(); ++k)
        g[k] = std::exp(lg[k] - lg_max);

    // Separable Gaussian convolution, axis 0 then axis 1.
    const auto k0 = lattice_kernel(1.0 / (lambda * pitch[0]), ext[0]);
    std::vector<double> c0(static_cast<std::size_t>(npts[0]) * g1, 0.0);
    for (int j = 0; j < g1; ++j)
        for (int i = 0; i < npts[0]; ++i) {
            double s = 0.0;
            for (int k = 0; k <= 2 * ext[0]; ++k)
                s += k0[k] * g[(i + k) + static_cast<std::size_t>(j) * g0];
            c0[i + static_cast<std::size_t>(j) * npts[0]] = s;
        }
    std::vector<double> conv(static_cast<std::size_t>(npts[0]) * npts[1], 0.0);
    if (d == 2) {
        const auto k1 = lattice_kernel(1.0 / (lambda * pitch[1]), ext[1]);
        for (int j = 0; j < npts[1]; ++j)
            for (int i = 0; i < npts[0]; ++i) {
                double s = 0.0;
                for (int k = 0; k <= 2 * ext[1]; ++k)
                    s += k1[k] * c0[i + static_cast<std::size_t>(j + k) * npts[0]];
                conv[i + static_cast<std::size_t>(j) * npts[0]] = s;
            }
    } else {
        conv = c0;
    }

    // Prior, offline and reward terms on the outer lattice.
    const Matrix prec = prior.Sigma0.inverse();
    const std::size_t total = conv.size();
    Vector lp(static_cast<Eigen::Index>(total));
    Vector th(d);
    for (int j = 0; j < npts[1]; ++j)
        for (int i = 0; i < npts[0]; ++i) {
            th[0] = out.axes[0][i];
            if (d == 2)
                th[1] = out.axes[1][j];
            const Vector c = th - prior.mu0;
            double s = -0.5 * c.dot(prec * c);
            const double cv = conv[i + static_cast<std::size_t>(j) * npts[0]];
            s += cv > 0.0 ? std::log(cv) : -std::numeric_limits<double>::infinity();
            for (const auto & st : history.steps) {
                const double z = (st.reward - actions[st.arm].dot(th)) / sigma;
                s -= 0.5 * z * z;
            }
            lp[static_cast<Eigen::Index>(i + static_cast<std::size_t>(j) * npts[0])] = s;
        }
    const double m = lp.maxCoeff();
    if (!std::isfinite(m))
        throw NumericalError("exact_posterior_grid: posterior vanished on the lattice");
    out.mass = (lp.array() - m).exp().matrix();
    out.mass /= out.mass.sum();

    const int K = static_cast<int>(actions.size());
    out.arm_opt_prob = Vector::Zero(K);
    out.mean = Vector::Zero(d);
    for (int j = 0; j < npts[1]; ++j)
        for (int i = 0; i < npts[0]; ++i) {
            th[0] = out.axes[0][i];
            if (d == 2)
                th[1] = out.axes[1][j];
            const double w = out.mass[static_cast<Eigen::Index>(i + static_cast<std::size_t>(j) * npts[0])];
            out.arm_opt_prob[greedy_arm(actions, th)] += w;
            out.mean += w * th;
        }
    return out;
}

} // namespace warmpref
