#include "vvc/control.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "vvc/powerflow.hpp"

namespace vvc {

void ControlConfig::validate() const {
    const Eigen::Index n = c.size();
    if (d.size() != n || q_min.size() != n || q_max.size() != n || mu.size() != n)
        throw DimensionError("control config vectors must share one length");
    if ((c.array() < 0.0).any()) throw ParameterError("penalty entries must be >= 0");
    if ((d.array() <= 0.0).any()) throw ParameterError("stepsize entries must be > 0");
    if (!(alpha > 0.0) || alpha > 1.0) throw ParameterError("alpha must lie in (0, 1]");
    if ((q_min.array() > q_max.array()).any())
        throw ParameterError("q_min must be <= q_max componentwise");
}

namespace {

ControlConfig base_config(Scheme scheme, const Eigen::VectorXd& c, const Eigen::VectorXd& q_min,
                          const Eigen::VectorXd& q_max, const Eigen::VectorXd& mu) {
    ControlConfig cfg;
    cfg.scheme = scheme;
    cfg.c = c;
    cfg.q_min = q_min;
    cfg.q_max = q_max;
    cfg.mu = mu;
    return cfg;
}

Eigen::VectorXd droop_stepsize(const Eigen::VectorXd& c) {
    if ((c.array() <= 0.0).any())
        throw ParameterError("droop requires every penalty c_j > 0 (D = C^{-1})");
    return c.cwiseInverse();
}

Eigen::VectorXd scaled_stepsize(const Eigen::MatrixXd& X, const Eigen::VectorXd& c,
                                double epsilon) {
    if (epsilon <= 0.0) throw ParameterError("scaled stepsize epsilon must be > 0");
    if (X.rows() != c.size()) throw DimensionError("X and c sizes disagree");
    return epsilon * (X.diagonal() + c).cwiseInverse();
}

} // namespace

ControlConfig make_droop(const Eigen::VectorXd& c, const Eigen::VectorXd& q_min,
                         const Eigen::VectorXd& q_max, const Eigen::VectorXd& mu) {
    ControlConfig cfg = base_config(Scheme::Droop, c, q_min, q_max, mu);
    cfg.d = droop_stepsize(c);
    cfg.alpha = 1.0;
    cfg.validate();
    return cfg;
}

ControlConfig make_scaled(const Eigen::MatrixXd& X, const Eigen::VectorXd& c, double epsilon,
                          const Eigen::VectorXd& q_min, const Eigen::VectorXd& q_max,
                          const Eigen::VectorXd& mu) {
    ControlConfig cfg = base_config(Scheme::Scaled, c, q_min, q_max, mu);
    cfg.d = scaled_stepsize(X, c, epsilon);
    cfg.epsilon = epsilon;
    cfg.alpha = 1.0;
    cfg.validate();
    return cfg;
}

ControlConfig make_delayed_droop(const Eigen::VectorXd& c, double alpha,
                                 const Eigen::VectorXd& q_min, const Eigen::VectorXd& q_max,
                                 const Eigen::VectorXd& mu) {
    ControlConfig cfg = base_config(Scheme::Delayed, c, q_min, q_max, mu);
    cfg.d = droop_stepsize(c);
    cfg.alpha = alpha;
    cfg.validate();
    return cfg;
}

ControlConfig make_delayed_scaled(const Eigen::MatrixXd& X, const Eigen::VectorXd& c,
                                  double epsilon, double alpha, const Eigen::VectorXd& q_min,
                                  const Eigen::VectorXd& q_max, const Eigen::VectorXd& mu) {
    ControlConfig cfg = base_config(Scheme::Delayed, c, q_min, q_max, mu);
    cfg.d = scaled_stepsize(X, c, epsilon);
    cfg.epsilon = epsilon;
    cfg.alpha = alpha;
    cfg.validate();
    return cfg;
}

ControlConfig make_generic(const Eigen::VectorXd& c, const Eigen::VectorXd& d, double alpha,
                           const Eigen::VectorXd& q_min, const Eigen::VectorXd& q_max,
                           const Eigen::VectorXd& mu) {
    ControlConfig cfg = base_config(Scheme::GenericGP, c, q_min, q_max, mu);
    cfg.d = d;
    cfg.alpha = alpha;
    cfg.validate();
    return cfg;
}

Eigen::VectorXd gradient(const Eigen::VectorXd& v, const Eigen::VectorXd& q,
                         const Eigen::VectorXd& c, const Eigen::VectorXd& mu) {
    if (v.size() != q.size() || v.size() != c.size() || v.size() != mu.size())
        throw DimensionError("gradient: vector lengths disagree");
    return v - mu + c.cwiseProduct(q);
}

Eigen::VectorXd project(const Eigen::VectorXd& x, const Eigen::VectorXd& q_min,
                        const Eigen::VectorXd& q_max) {
    return x.cwiseMax(q_min).cwiseMin(q_max);
}

ControlState step(const ControlState& state, const ControlConfig& cfg,
                  const Eigen::VectorXd& v_measured) {
    const Eigen::Index n = cfg.c.size();
    if (state.q.size() != n || v_measured.size() != n)
        throw DimensionError("step: state/measurement lengths disagree with config");
    constexpr double kFeasSlack = 1e-12;
    if ((state.q.array() < cfg.q_min.array() - kFeasSlack).any() ||
        (state.q.array() > cfg.q_max.array() + kFeasSlack).any())
        throw ContractViolation("step: incoming setpoints violate the VAR bounds");

    // q+ = (1-a) q + a P[(1 - d c) q - d (V - mu)], componentwise. The droop
    // scheme has d c == 1 analytically, so its bracket is evaluated in the
    // reduced form -(V - mu)/c and the identity holds bit for bit.
    Eigen::VectorXd inner;
    if (cfg.scheme == Scheme::Droop)
        inner = -(v_measured - cfg.mu).cwiseQuotient(cfg.c);
    else
        inner = (Eigen::VectorXd::Ones(n) - cfg.d.cwiseProduct(cfg.c)).cwiseProduct(state.q) -
                cfg.d.cwiseProduct(v_measured - cfg.mu);
    Eigen::VectorXd q_next = (1.0 - cfg.alpha) * state.q +
                             cfg.alpha * project(inner, cfg.q_min, cfg.q_max);
    q_next = project(q_next, cfg.q_min, cfg.q_max);  // absorb roundoff

    ControlState next;
    next.t = state.t + 1;
    next.q = std::move(q_next);
    next.v = v_measured;
    return next;
}

namespace {

int count_at_bounds(const Eigen::VectorXd& q, const Eigen::VectorXd& lo,
                    const Eigen::VectorXd& hi) {
    int hits = 0;
    for (Eigen::Index j = 0; j < q.size(); ++j)
        if (q(j) <= lo(j) + 1e-12 || q(j) >= hi(j) - 1e-12) ++hits;
    return hits;
}

} // namespace

LoopResult run_closed_loop(const FeederNetwork& net, const GraphMatrices& gm,
                           const ControlConfig& cfg, Plant plant, int max_iter, double tol) {
    cfg.validate();
    const int n = gm.n();
    const Eigen::VectorXd p = net.injections_p();
    const Eigen::VectorXd qc = net.loads_qc();
    const Eigen::VectorXd vbar = baseline_voltage(gm, p, qc, net.v0());

    std::unique_ptr<AcSolver> ac;
    if (plant == Plant::Ac) ac = std::make_unique<AcSolver>(net);

    LoopResult out;
    out.state.t = 0;
    out.state.q = project(Eigen::VectorXd::Zero(n), cfg.q_min, cfg.q_max);
    out.trace.reserve(static_cast<std::size_t>(max_iter));

    std::vector<double> mismatch_hist;
    mismatch_hist.reserve(static_cast<std::size_t>(max_iter));

    for (int t = 0; t < max_iter; ++t) {
        Eigen::VectorXd v_now;
        if (plant == Plant::Linear) {
            v_now = lindistflow_voltage(gm, out.state.q, vbar);
        } else {
            const AcSolution sol = ac->solve(p, out.state.q - qc, net.v0());
            if (!sol.converged) {
                out.plant_diverged = true;
                out.iterations = t;
                return out;
            }
            v_now = sol.v_mag.tail(n);
        }

        const double mismatch = (v_now - cfg.mu).norm();
        mismatch_hist.push_back(mismatch);
        out.trace.push_back(TraceRecord{t, -1, mismatch, out.state.q, v_now,
                                        count_at_bounds(out.state.q, cfg.q_min, cfg.q_max)});

        ControlState next = step(out.state, cfg, v_now);
        const double delta = (next.q - out.state.q).lpNorm<Eigen::Infinity>();
        out.state = std::move(next);
        out.iterations = t + 1;
        if (delta <= tol) {
            out.converged = true;
            break;
        }
    }

    if (!out.converged) out.oscillating = detect_period2(mismatch_hist);
    return out;
}

bool detect_period2(std::span<const double> mismatch_history, int window, double spread_tol,
                    double sep_tol) {
    if (static_cast<int>(mismatch_history.size()) < window || window < 4) return false;
    std::vector<double> tail(mismatch_history.end() - window, mismatch_history.end());
    std::sort(tail.begin(), tail.end());

    // split the sorted samples at the widest gap
    int cut = -1;
    double widest = -1.0;
    for (int i = 0; i + 1 < window; ++i) {
        const double gap = tail[i + 1] - tail[i];
        if (gap > widest) {
            widest = gap;
            cut = i;
        }
    }
    if (cut < 0 || cut + 1 >= window) return false;

    const double lo_spread = tail[cut] - tail.front();
    const double hi_spread = tail.back() - tail[cut + 1];
    double lo_mean = 0.0, hi_mean = 0.0;
    for (int i = 0; i <= cut; ++i) lo_mean += tail[i];
    for (int i = cut + 1; i < window; ++i) hi_mean += tail[i];
    lo_mean /= cut + 1;
    hi_mean /= window - cut - 1;

    return lo_spread < spread_tol && hi_spread < spread_tol && (hi_mean - lo_mean) > sep_tol;
}

} // namespace vvc
