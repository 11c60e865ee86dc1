#include <warmpref/pspl.hpp>

#include <algorithm>
#include <cmath>

namespace warmpref {

namespace {

int sample_categorical(const double * p, int n, Rng & rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double x = u(rng);
    double cum = 0.0;
    for (int i = 0; i < n; ++i) {
        cum += p[i];
        if (x < cum)
            return i;
    }
    for (int i = n - 1; i >= 0; --i)
        if (p[i] > 0.0)
            return i;
    return n - 1;
}

void check_row_sums(const std::vector<double> & t, std::size_t rows, int width, const char * what) {
    for (std::size_t r = 0; r < rows; ++r) {
        double s = 0.0;
        for (int k = 0; k < width; ++k) {
            const double v = t[r * width + k];
            if (!(v >= 0.0))
                throw ConfigError(std::string(what) + ": negative or non-finite probability");
            s += v;
        }
        if (std::abs(s - 1.0) > 1e-9)
            throw ConfigError(std::string(what) + ": row does not sum to 1");
    }
}

} // namespace

Vector TabularMDP::theta() const {
    Vector th(static_cast<Eigen::Index>(S) * A);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a)
            th[s * A + a] = reward(s, a);
    return th;
}

void TabularMDP::validate() const {
    if (S < 1 || A < 1 || H < 1)
        throw ConfigError("mdp: S, A, H must be positive");
    if (trans.size() != static_cast<std::size_t>(S) * A * S)
        throw ConfigError("mdp: transition tensor has wrong size");
    check_row_sums(trans, static_cast<std::size_t>(S) * A, S, "mdp transitions");
    if (reward.rows() != S || reward.cols() != A)
        throw ConfigError("mdp: reward matrix has wrong shape");
    if (reward.minCoeff() < 0.0 || reward.maxCoeff() > 1.0)
        throw ConfigError("mdp: rewards must lie in [0,1]");
    if (rho.size() != S)
        throw ConfigError("mdp: rho has wrong size");
    std::vector<double> r(rho.data(), rho.data() + S);
    check_row_sums(r, 1, S, "mdp rho");
}

TabularMDP riverswim_env(int S, int H, RiverStart start) {
    if (S < 2)
        throw ConfigError("riverswim: need S >= 2");
    if (H < 1)
        throw ConfigError("riverswim: need H >= 1");
    TabularMDP m;
    m.S = S;
    m.A = 2;
    m.H = H;
    m.trans.assign(static_cast<std::size_t>(S) * 2 * S, 0.0);
    for (int s = 0; s < S; ++s) {
        m.P(s, 0, std::max(s - 1, 0)) = 1.0;
        if (s == 0) {
            m.P(0, 1, 1) = 0.3;
            m.P(0, 1, 0) = 0.7;
        } else if (s == S - 1) {
            m.P(s, 1, s) = 0.9;
            m.P(s, 1, s - 1) = 0.1;
        } else {
            m.P(s, 1, s + 1) = 0.3;
            m.P(s, 1, s) = 0.6;
            m.P(s, 1, s - 1) = 0.1;
        }
    }
    m.reward = Matrix::Zero(S, 2);
    m.reward(0, 0) = 5.0 / 1000.0;
    m.reward(S - 1, 1) = 1.0;
    m.rho = Vector::Zero(S);
    switch (start) {
        case RiverStart::FirstTwo:
            m.rho[0] = m.rho[1] = 0.5;
            break;
        case RiverStart::Leftmost:
            m.rho[0] = 1.0;
            break;
        case RiverStart::Uniform:
            m.rho.setConstant(1.0 / S);
            break;
    }
    m.validate();
    return m;
}

TabularMDP random_mdp(int S, int A, int H, Rng & rng) {
    if (S < 1 || A < 1 || H < 1)
        throw ConfigError("random_mdp: S, A, H must be positive");
    TabularMDP m;
    m.S = S;
    m.A = A;
    m.H = H;
    m.trans.assign(static_cast<std::size_t>(S) * A * S, 0.0);
    std::exponential_distribution<double> ex(1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
            double tot = 0.0;
            for (int s2 = 0; s2 < S; ++s2)
                tot += (m.P(s, a, s2) = ex(rng));
            for (int s2 = 0; s2 < S; ++s2)
                m.P(s, a, s2) /= tot;
        }
    m.reward = Matrix(S, A);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a)
            m.reward(s, a) = u(rng);
    m.rho = Vector::Constant(S, 1.0 / S);
    return m;
}

PolicyTable PolicyTable::uniform(int H, int S, int A) {
    PolicyTable p;
    p.H = H;
    p.S = S;
    p.A = A;
    p.probs.assign(static_cast<std::size_t>(H) * S * A, 1.0 / A);
    return p;
}

void PolicyTable::validate() const {
    if (probs.size() != static_cast<std::size_t>(H) * S * A)
        throw ConfigError("policy: table has wrong size");
    check_row_sums(probs, static_cast<std::size_t>(H) * S, A, "policy");
}

Vector trajectory_embedding(const Trajectory & tau, int S, int A) {
    Vector phi = Vector::Zero(static_cast<Eigen::Index>(S) * A);
    if (tau.steps.empty())
        return phi;
    const double w = 1.0 / static_cast<double>(tau.steps.size());
    for (const auto & [s, a] : tau.steps) {
        if (s < 0 || s >= S || a < 0 || a >= A)
            throw DomainError("trajectory_embedding: state or action out of range");
        phi[s * A + a] += w;
    }
    return phi;
}

double traj_preference_prob(const Trajectory & tau0, const Trajectory & tau1, const Vector & vartheta, double beta,
                            int S, int A) {
    if (beta == 0.0)
        return 0.5;
    const Vector d = trajectory_embedding(tau0, S, A) - trajectory_embedding(tau1, S, A);
    return sigmoid(beta * d.dot(vartheta));
}

double trajectory_return(const TabularMDP & mdp, const Trajectory & tau) {
    double r = 0.0;
    for (const auto & [s, a] : tau.steps)
        r += mdp.reward(s, a);
    return r;
}

Trajectory rollout(const TabularMDP & mdp, const PolicyTable & policy, Rng & rng) {
    Trajectory tau;
    tau.steps.reserve(mdp.H);
    int s = sample_categorical(mdp.rho.data(), mdp.S, rng);
    for (int h = 0; h < mdp.H; ++h) {
        const int a = sample_categorical(&policy.probs[(static_cast<std::size_t>(h) * mdp.S + s) * mdp.A], mdp.A, rng);
        tau.steps.emplace_back(s, a);
        if (h + 1 < mdp.H)
            s = sample_categorical(&mdp.trans[(static_cast<std::size_t>(s) * mdp.A + a) * mdp.S], mdp.S, rng);
    }
    return tau;
}

TrajPrefDataset generate_offline_trajectories(const TabularMDP & mdp, const PolicyTable & behavior,
                                              const Rater & rater, int N, Rng & rng) {
    if (N < 0)
        throw ConfigError("generate_offline_trajectories: N must be nonnegative");
    std::uniform_real_distribution<double> u(0.0, 1.0);
    TrajPrefDataset D;
    D.entries.reserve(N);
    for (int n = 0; n < N; ++n) {
        Trajectory t0 = rollout(mdp, behavior, rng);
        Trajectory t1 = rollout(mdp, behavior, rng);
        const double p = traj_preference_prob(t0, t1, rater.vartheta, rater.beta, mdp.S, mdp.A);
        const int y = u(rng) < p ? 0 : 1;
        D.entries.push_back({std::move(t0), std::move(t1), y});
    }
    return D;
}

std::vector<double> DirichletBelief::mean() const {
    std::vector<double> m(alpha.size());
    for (std::size_t r = 0; r < static_cast<std::size_t>(S) * A; ++r) {
        double tot = 0.0;
        for (int k = 0; k < S; ++k)
            tot += alpha[r * S + k];
        for (int k = 0; k < S; ++k)
            m[r * S + k] = alpha[r * S + k] / tot;
    }
    return m;
}

std::vector<double> DirichletBelief::mode() const {
    std::vector<double> m = mean();
    for (std::size_t r = 0; r < static_cast<std::size_t>(S) * A; ++r) {
        double tot = 0.0;
        for (int k = 0; k < S; ++k)
            tot += std::max(alpha[r * S + k] - 1.0, 0.0);
        if (tot <= 0.0)
            continue;
        for (int k = 0; k < S; ++k)
            m[r * S + k] = std::max(alpha[r * S + k] - 1.0, 0.0) / tot;
    }
    return m;
}

std::vector<double> DirichletBelief::sample(Rng & rng) const {
    std::vector<double> out(alpha.size());
    for (std::size_t r = 0; r < static_cast<std::size_t>(S) * A; ++r) {
        double tot = 0.0;
        for (int k = 0; k < S; ++k) {
            std::gamma_distribution<double> g(alpha[r * S + k], 1.0);
            out[r * S + k] = g(rng);
            tot += out[r * S + k];
        }
        if (tot > 0.0) {
            for (int k = 0; k < S; ++k)
                out[r * S + k] /= tot;
        } else {
            // All draws underflowed (tiny alphas): fall back to the mean.
            double at = 0.0;
            for (int k = 0; k < S; ++k)
                at += alpha[r * S + k];
            for (int k = 0; k < S; ++k)
                out[r * S + k] = alpha[r * S + k] / at;
        }
    }
    return out;
}

void add_transitions(std::vector<double> & counts, const Trajectory & tau, int S, int A, double w) {
    for (std::size_t h = 0; h + 1 < tau.steps.size(); ++h) {
        const auto [s, a] = tau.steps[h];
        const int s2 = tau.steps[h + 1].first;
        counts[(static_cast<std::size_t>(s) * A + a) * S + s2] += w;
    }
}

DirichletBelief informed_prior_eta(const TrajPrefDataset & D0, int S, int A, double alpha0) {
    if (!(alpha0 > 0.0))
        throw DomainError("informed_prior_eta: alpha0 must be positive");
    DirichletBelief b;
    b.S = S;
    b.A = A;
    b.alpha.assign(static_cast<std::size_t>(S) * A * S, alpha0);
    for (const auto & e : D0.entries) {
        add_transitions(b.alpha, e.tau0, S, A);
        add_transitions(b.alpha, e.tau1, S, A);
    }
    return b;
}

PlanResult finite_horizon_plan(const Matrix & reward_hat, const std::vector<double> & trans_hat, int H) {
    const int S = static_cast<int>(reward_hat.rows());
    const int A = static_cast<int>(reward_hat.cols());
    if (H < 1 || trans_hat.size() != static_cast<std::size_t>(S) * A * S)
        throw ConfigError("finite_horizon_plan: inconsistent sizes");
    PlanResult out;
    out.policy.H = H;
    out.policy.S = S;
    out.policy.A = A;
    out.policy.probs.assign(static_cast<std::size_t>(H) * S * A, 0.0);
    out.V = Matrix::Zero(H + 1, S);
    for (int h = H - 1; h >= 0; --h)
        for (int s = 0; s < S; ++s) {
            int best = 0;
            double bv = -std::numeric_limits<double>::infinity();
            for (int a = 0; a < A; ++a) {
                double q = reward_hat(s, a);
                const double * row = &trans_hat[(static_cast<std::size_t>(s) * A + a) * S];
                for (int s2 = 0; s2 < S; ++s2)
                    q += row[s2] * out.V(h + 1, s2);
                if (q > bv) {
                    bv = q;
                    best = a;
                }
            }
            out.V(h, s) = bv;
            out.policy.p(h, s, best) = 1.0;
        }
    return out;
}

Matrix policy_value(const TabularMDP & mdp, const PolicyTable & policy) {
    Matrix V = Matrix::Zero(mdp.H + 1, mdp.S);
    for (int h = mdp.H - 1; h >= 0; --h)
        for (int s = 0; s < mdp.S; ++s) {
            double v = 0.0;
            for (int a = 0; a < mdp.A; ++a) {
                const double pa = policy.p(h, s, a);
                if (pa == 0.0)
                    continue;
                double q = mdp.reward(s, a);
                for (int s2 = 0; s2 < mdp.S; ++s2)
                    q += mdp.P(s, a, s2) * V(h + 1, s2);
                v += pa * q;
            }
            V(h, s) = v;
        }
    return V;
}

double expected_return(const TabularMDP & mdp, const PolicyTable & policy) {
    return mdp.rho.dot(policy_value(mdp, policy).row(0).transpose());
}

SimpleRegret simple_regret(const TabularMDP & mdp, const PolicyTable & policy, int trials, Rng * rng) {
    if (trials < 0)
        throw ConfigError("simple_regret: trials must be nonnegative");
    const PlanResult opt = finite_horizon_plan(mdp.reward, mdp.trans, mdp.H);
    const double vstar = mdp.rho.dot(opt.V.row(0).transpose());
    SimpleRegret out;
    out.exact = std::max(0.0, vstar - expected_return(mdp, policy));
    if (trials > 0 && rng) {
        double s = 0.0, s2 = 0.0;
        for (int i = 0; i < trials; ++i) {
            const double r = trajectory_return(mdp, rollout(mdp, policy, *rng));
            s += r;
            s2 += r * r;
        }
        const double n = trials;
        const double m = s / n;
        out.sampled = vstar - m;
        out.sampled_se = trials > 1 ? std::sqrt(std::max(0.0, (s2 - n * m * m) / (n - 1.0)) / n) : 0.0;
    }
    return out;
}

PolicyTable estimate_optimal_policy_offline(const TrajPrefDataset & D0, int S, int A, int H, double delta,
                                            OfflinePolicyRule rule) {
    if (!(delta > 0.0 && delta < 1.0))
        throw DomainError("estimate_optimal_policy_offline: delta must lie in (0,1)");
    const std::size_t n = static_cast<std::size_t>(H) * S * A;
    std::vector<double> w(n, 0.0), l(n, 0.0);
    auto idx = [&](int h, int s, int a) { return (static_cast<std::size_t>(h) * S + s) * A + a; };
    for (const auto & e : D0.entries) {
        const Trajectory & win = e.y == 0 ? e.tau0 : e.tau1;
        const Trajectory & lose = e.y == 0 ? e.tau1 : e.tau0;
        for (int h = 0; h < H && h < static_cast<int>(win.steps.size()); ++h)
            w[idx(h, win.steps[h].first, win.steps[h].second)] += 1.0;
        for (int h = 0; h < H && h < static_cast<int>(lose.steps.size()); ++h)
            l[idx(h, lose.steps[h].first, lose.steps[h].second)] += 1.0;
    }
    const double thresh = delta * static_cast<double>(D0.size());
    PolicyTable pi;
    pi.H = H;
    pi.S = S;
    pi.A = A;
    pi.probs.assign(n, 0.0);
    for (int h = 0; h < H; ++h)
        for (int s = 0; s < S; ++s) {
            double total = 0.0;
            int best = -1;
            double bc = 0.0;
            std::vector<int> undecided;
            for (int a = 0; a < A; ++a) {
                const double c = w[idx(h, s, a)] - l[idx(h, s, a)];
                total += rule == OfflinePolicyRule::NetCount ? c : w[idx(h, s, a)] + l[idx(h, s, a)];
                if (c > 0.0) {
                    if (best < 0 || c > bc) {
                        best = a;
                        bc = c;
                    }
                } else {
                    undecided.push_back(a);
                }
            }
            if (!D0.empty() && total >= thresh && best >= 0) {
                pi.p(h, s, best) = 1.0;
            } else {
                if (undecided.empty())
                    for (int a = 0; a < A; ++a)
                        undecided.push_back(a);
                for (int a : undecided)
                    pi.p(h, s, a) = 1.0 / static_cast<double>(undecided.size());
            }
        }
    return pi;
}

std::vector<std::vector<char>> optimal_action_sets(const TabularMDP & mdp, double tol) {
    const PlanResult opt = finite_horizon_plan(mdp.reward, mdp.trans, mdp.H);
    std::vector<std::vector<char>> sets(static_cast<std::size_t>(mdp.H) * mdp.S, std::vector<char>(mdp.A, 0));
    for (int h = 0; h < mdp.H; ++h)
        for (int s = 0; s < mdp.S; ++s)
            for (int a = 0; a < mdp.A; ++a) {
                double q = mdp.reward(s, a);
                for (int s2 = 0; s2 < mdp.S; ++s2)
                    q += mdp.P(s, a, s2) * opt.V(h + 1, s2);
                sets[static_cast<std::size_t>(h) * mdp.S + s][a] = q >= opt.V(h, s) - tol ? 1 : 0;
            }
    return sets;
}

std::vector<std::vector<char>> reachable_under_optimal(const TabularMDP & mdp) {
    const PlanResult opt = finite_horizon_plan(mdp.reward, mdp.trans, mdp.H);
    std::vector<std::vector<char>> reach(mdp.H, std::vector<char>(mdp.S, 0));
    Vector dist = mdp.rho;
    for (int h = 0; h < mdp.H; ++h) {
        Vector next = Vector::Zero(mdp.S);
        for (int s = 0; s < mdp.S; ++s) {
            if (dist[s] <= 0.0)
                continue;
            reach[h][s] = 1;
            for (int a = 0; a < mdp.A; ++a) {
                const double pa = opt.policy.p(h, s, a);
                if (pa == 0.0)
                    continue;
                for (int s2 = 0; s2 < mdp.S; ++s2)
                    next[s2] += dist[s] * pa * mdp.P(s, a, s2);
            }
        }
        dist = next;
    }
    return reach;
}

VisitationMinima visitation_minima(const TabularMDP & mdp) {
    VisitationMinima out;
    out.p_min = 1.0;
    // max_pi P(s_h = target): backward induction on the indicator reward at step h.
    for (int h = 0; h < mdp.H; ++h)
        for (int target = 0; target < mdp.S; ++target) {
            Vector W = Vector::Zero(mdp.S);
            W[target] = 1.0;
            for (int k = h - 1; k >= 0; --k) {
                Vector Wn(mdp.S);
                for (int s = 0; s < mdp.S; ++s) {
                    double best = 0.0;
                    for (int a = 0; a < mdp.A; ++a) {
                        double q = 0.0;
                        for (int s2 = 0; s2 < mdp.S; ++s2)
                            q += mdp.P(s, a, s2) * W[s2];
                        best = std::max(best, q);
                    }
                    Wn[s] = best;
                }
                W = Wn;
            }
            out.p_min = std::min(out.p_min, mdp.rho.dot(W));
        }

    const PlanResult opt = finite_horizon_plan(mdp.reward, mdp.trans, mdp.H);
    out.p_star_min = 1.0;
    Vector dist = mdp.rho;
    for (int h = 0; h < mdp.H; ++h) {
        Vector next = Vector::Zero(mdp.S);
        for (int s = 0; s < mdp.S; ++s) {
            if (dist[s] <= 0.0)
                continue;
            out.p_star_min = std::min(out.p_star_min, dist[s]);
            for (int a = 0; a < mdp.A; ++a) {
                const double pa = opt.policy.p(h, s, a);
                for (int s2 = 0; s2 < mdp.S && pa > 0.0; ++s2)
                    next[s2] += dist[s] * pa * mdp.P(s, a, s2);
            }
        }
        dist = next;
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

void append_column(Matrix & M, const Vector & v) {
    const Eigen::Index n = M.cols();
    Matrix tmp(v.size(), n + 1);
    if (n > 0)
        tmp.leftCols(n) = M;
    tmp.col(n) = v;
    M.swap(tmp);
}

Vector pair_delta(const TrajPrefEntry & e, int S, int A) {
    const Vector p0 = trajectory_embedding(e.tau0, S, A);
    const Vector p1 = trajectory_embedding(e.tau1, S, A);
    return e.y == 0 ? Vector(p1 - p0) : Vector(p0 - p1);
}

std::vector<double> pair_counts(const TrajPrefEntry & e, int S, int A) {
    std::vector<double> c(static_cast<std::size_t>(S) * A * S, 0.0);
    add_transitions(c, e.tau0, S, A);
    add_transitions(c, e.tau1, S, A);
    return c;
}

PriorSpec resolve_prior(const PsplParams & p, Eigen::Index dim) {
    if (p.prior.dim() == dim)
        return p.prior;
    if (p.prior.dim() != 0)
        throw ConfigError("pspl: prior dimension must equal S*A");
    return PriorSpec::standard(dim);
}

/// Weighted logistic terms over columns of D (loser - winner): sum w softplus(beta D^T v).
double logistic_block(const Matrix & D, const Vector & w, double beta, const Vector & v, Eigen::Index off,
                      Vector * grad, Matrix * hess) {
    if (D.cols() == 0)
        return 0.0;
    const Vector u = beta * (D.transpose() * v);
    double val = 0.0;
    Vector gs(D.cols()), hs(D.cols());
    for (Eigen::Index i = 0; i < D.cols(); ++i) {
        val += w[i] * softplus(u[i]);
        const double s = sigmoid(u[i]);
        gs[i] = w[i] * beta * s;
        hs[i] = w[i] * beta * beta * s * (1.0 - s);
    }
    const Eigen::Index p = D.rows();
    if (grad)
        grad->segment(off, p) += D * gs;
    if (hess)
        hess->block(off, off, p, p) += D * hs.asDiagonal() * D.transpose();
    return val;
}

double theta_part(const Vector & x, const PsplData & data, const PsplParams & params, const PsplPerturbation & pert,
                  const PriorSpec & prior, const Matrix & prec, Vector * grad, Matrix * hess) {
    const Eigen::Index p = prior.dim();
    if (grad)
        grad->setZero(2 * p);
    if (hess)
        hess->setZero(2 * p, 2 * p);
    const Vector th = x.head(p);
    const Vector vt = x.tail(p);
    double val = logistic_block(data.online_deltas, pert.zeta, params.beta, vt, p, grad, hess);
    val += logistic_block(data.offline_deltas, pert.omega, params.beta, vt, p, grad, hess);
    const double l2 = params.lambda * params.lambda;
    const Vector r = th - vt + pert.vartheta_prime;
    val += 0.5 * l2 * r.squaredNorm();
    const Vector c = th - prior.mu0 - pert.theta_prime;
    const Vector pc = prec * c;
    val += 0.5 * c.dot(pc);
    if (grad) {
        grad->head(p) += l2 * r + pc;
        grad->tail(p) -= l2 * r;
    }
    if (hess) {
        hess->topLeftCorner(p, p) += prec;
        hess->topLeftCorner(p, p).diagonal().array() += l2;
        hess->bottomRightCorner(p, p).diagonal().array() += l2;
        hess->topRightCorner(p, p).diagonal().array() -= l2;
        hess->bottomLeftCorner(p, p).diagonal().array() -= l2;
    }
    return val;
}

double prior_weight(const PsplParams & params, int S, int A) {
    return params.prior_weight == DirichletPriorWeight::StateActionScaled ? static_cast<double>(S) * A : 1.0;
}

std::vector<double> weighted_counts(const PsplData & data, const PsplPerturbation & pert) {
    std::vector<double> C(static_cast<std::size_t>(data.S) * data.A * data.S, 0.0);
    for (std::size_t n = 0; n < data.offline_counts.size(); ++n) {
        const double w = pert.omega[static_cast<Eigen::Index>(n)];
        if (w == 0.0)
            continue;
        for (std::size_t k = 0; k < C.size(); ++k)
            C[k] += w * data.offline_counts[n][k];
    }
    for (std::size_t t = 0; t < data.online_counts.size(); ++t) {
        const double w = pert.zeta[static_cast<Eigen::Index>(t)];
        if (w == 0.0)
            continue;
        for (std::size_t k = 0; k < C.size(); ++k)
            C[k] += w * data.online_counts[t][k];
    }
    return C;
}

Matrix precision_of(const PriorSpec & prior) {
    Eigen::LLT<Matrix> llt(prior.Sigma0);
    if (llt.info() != Eigen::Success)
        throw NumericalError("pspl: prior covariance is not positive definite");
    return llt.solve(Matrix::Identity(prior.dim(), prior.dim()));
}

} // namespace

void PsplData::add_offline(const TrajPrefEntry & e) {
    if (offline_deltas.rows() == 0)
        offline_deltas.resize(static_cast<Eigen::Index>(S) * A, 0);
    append_column(offline_deltas, pair_delta(e, S, A));
    offline_counts.push_back(pair_counts(e, S, A));
}

void PsplData::add_online(const TrajPrefEntry & e) {
    if (online_deltas.rows() == 0)
        online_deltas.resize(static_cast<Eigen::Index>(S) * A, 0);
    append_column(online_deltas, pair_delta(e, S, A));
    online_counts.push_back(pair_counts(e, S, A));
}

PsplPerturbation PsplPerturbation::none(const PsplData & data, Eigen::Index dim) {
    PsplPerturbation p;
    p.zeta = Vector::Ones(static_cast<Eigen::Index>(data.online_counts.size()));
    p.omega = Vector::Ones(static_cast<Eigen::Index>(data.offline_counts.size()));
    p.theta_prime = Vector::Zero(dim);
    p.vartheta_prime = Vector::Zero(dim);
    return p;
}

PsplLossValue pspl_surrogate_loss(const Vector & theta, const Vector & vartheta, const std::vector<double> & eta,
                                  const PsplData & data, const PsplParams & params, const PsplPerturbation & pert) {
    const Eigen::Index p = static_cast<Eigen::Index>(data.S) * data.A;
    if (theta.size() != p || vartheta.size() != p || eta.size() != static_cast<std::size_t>(p) * data.S)
        throw ConfigError("pspl_surrogate_loss: inconsistent sizes");
    const PriorSpec prior = resolve_prior(params, p);
    Vector x(2 * p);
    x << theta, vartheta;
    PsplLossValue out;
    out.value = theta_part(x, data, params, pert, prior, precision_of(prior), &out.gradient, nullptr);
    const std::vector<double> C = weighted_counts(data, pert);
    const double wp = prior_weight(params, data.S, data.A) * (params.alpha0 - 1.0);
    for (std::size_t k = 0; k < C.size(); ++k) {
        const double coef = C[k] + wp;
        if (coef == 0.0)
            continue;
        if (!(eta[k] > 0.0))
            throw DomainError("pspl_surrogate_loss: eta must be positive where weighted counts are nonzero");
        out.value -= coef * std::log(eta[k]);
    }
    return out;
}

std::vector<double> pspl_eta_map(const PsplData & data, const PsplParams & params, const PsplPerturbation & pert) {
    std::vector<double> C = weighted_counts(data, pert);
    const double wp = prior_weight(params, data.S, data.A) * (params.alpha0 - 1.0);
    const int S = data.S;
    for (std::size_t r = 0; r < static_cast<std::size_t>(S) * data.A; ++r) {
        double tot = 0.0;
        for (int k = 0; k < S; ++k) {
            double & v = C[r * S + k];
            v = std::max(0.0, v + wp);
            tot += v;
        }
        for (int k = 0; k < S; ++k)
            C[r * S + k] = tot > 0.0 ? C[r * S + k] / tot : 1.0 / S;
    }
    return C;
}

PsplMap pspl_theta_map(const PsplData & data, const PsplParams & params, const PsplPerturbation & pert) {
    const Eigen::Index p = static_cast<Eigen::Index>(data.S) * data.A;
    const PriorSpec prior = resolve_prior(params, p);
    const Matrix prec = precision_of(prior);
    const Objective f = [&](const Vector & x, Vector * g, Matrix * h) {
        return theta_part(x, data, params, pert, prior, prec, g, h);
    };
    Vector x0(2 * p);
    if (params.opt.init == OptimizerSpec::Init::Zero)
        x0.setZero();
    else
        x0 << prior.mu0, prior.mu0;
    const OptimResult r = minimize(f, x0, params.opt);
    return {r.x.head(p), r.x.tail(p), r.converged};
}

PsplLearner::PsplLearner(int S, int A, int H, const TrajPrefDataset & D0, PsplParams params)
    : S_(S), A_(A), H_(H), params_(std::move(params)) {
    if (S < 1 || A < 1 || H < 1)
        throw ConfigError("pspl: S, A, H must be positive");
    if (!(params_.beta >= 0.0) || !(params_.lambda > 0.0) || !(params_.alpha0 > 0.0))
        throw ConfigError("pspl: need beta >= 0, lambda > 0, alpha0 > 0");
    params_.prior = resolve_prior(params_, static_cast<Eigen::Index>(S) * A);
    data_.S = S;
    data_.A = A;
    data_.offline_deltas.resize(static_cast<Eigen::Index>(S) * A, 0);
    data_.online_deltas.resize(static_cast<Eigen::Index>(S) * A, 0);
    for (const auto & e : D0.entries)
        data_.add_offline(e);
    dirichlet_ = informed_prior_eta(D0, S, A, params_.alpha0);
}

PsplPerturbation PsplLearner::draw_perturbation(Rng & rng) const {
    const Eigen::Index p = static_cast<Eigen::Index>(S_) * A_;
    std::bernoulli_distribution on(params_.zeta_p), off(params_.omega_p);
    PsplPerturbation pert;
    pert.zeta.resize(static_cast<Eigen::Index>(data_.online_counts.size()));
    for (Eigen::Index i = 0; i < pert.zeta.size(); ++i)
        pert.zeta[i] = on(rng) ? 1.0 : 0.0;
    pert.omega.resize(static_cast<Eigen::Index>(data_.offline_counts.size()));
    for (Eigen::Index i = 0; i < pert.omega.size(); ++i)
        pert.omega[i] = off(rng) ? 1.0 : 0.0;
    pert.theta_prime = params_.prior.chol() * standard_normal(p, rng);
    pert.vartheta_prime = standard_normal(p, rng) / params_.lambda;
    return pert;
}

EpisodeResult PsplLearner::episode(const TabularMDP & mdp, const Rater & rater, Rng & rng) {
    if (mdp.S != S_ || mdp.A != A_ || mdp.H != H_)
        throw ConfigError("pspl: MDP shape does not match the learner");
    std::array<PolicyTable, 2> pis;
    bool conv = true;
    for (int i = 0; i < 2; ++i) {
        const PsplPerturbation pert = draw_perturbation(rng);
        const PsplMap m = pspl_theta_map(data_, params_, pert);
        conv = conv && m.converged;
        const std::vector<double> eta =
            params_.eta_mode == EtaMode::ExactDirichlet ? dirichlet_.sample(rng) : pspl_eta_map(data_, params_, pert);
        const Matrix r = m.theta.reshaped<Eigen::RowMajor>(S_, A_);
        pis[i] = finite_horizon_plan(r, eta, H_).policy;
    }
    EpisodeResult res;
    res.tau0 = rollout(mdp, pis[0], rng);
    res.tau1 = rollout(mdp, pis[1], rng);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    res.y = u(rng) < traj_preference_prob(res.tau0, res.tau1, rater.vartheta, rater.beta, S_, A_) ? 0 : 1;
    res.converged = conv;
    all_converged_ = all_converged_ && conv;
    const TrajPrefEntry e{res.tau0, res.tau1, res.y};
    data_.add_online(e);
    add_transitions(dirichlet_.alpha, res.tau0, S_, A_);
    add_transitions(dirichlet_.alpha, res.tau1, S_, A_);
    return res;
}

PolicyTable PsplLearner::output_policy() const {
    const Eigen::Index p = static_cast<Eigen::Index>(S_) * A_;
    const PsplMap m = pspl_theta_map(data_, params_, PsplPerturbation::none(data_, p));
    const Matrix r = m.theta.reshaped<Eigen::RowMajor>(S_, A_);
    return finite_horizon_plan(r, dirichlet_.mode(), H_).policy;
}

EpisodeResult pspl_episode(PsplLearner & learner, const TabularMDP & mdp, const Rater & rater, Rng & rng) {
    return learner.episode(mdp, rater, rng);
}

} // namespace warmpref
