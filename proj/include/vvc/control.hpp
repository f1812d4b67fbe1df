#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "vvc/graph_matrices.hpp"
#include "vvc/network.hpp"
#include "vvc/trace.hpp"

namespace vvc {

/// Local VAR control laws. All of them are instances of the same relaxed
/// gradient-projection update; the named schemes fix the stepsize matrix D
/// and relaxation weight alpha:
///   Droop    D = C^{-1},              alpha = 1
///   Scaled   D = eps*[diag(X+C)]^{-1}, alpha = 1
///   Delayed  any D,                   alpha < 1
enum class Scheme { GenericGP, Droop, Scaled, Delayed };

/// Everything a controller needs beyond the live voltage measurement.
/// d and c are the diagonals of the stepsize and penalty matrices; alpha is
/// the constant relaxation weight in (0, 1]. Adaptive schedules (Armijo,
/// limited minimization) are an extension point, not shipped.
struct ControlConfig {
    Scheme scheme = Scheme::GenericGP;
    Eigen::VectorXd c;      ///< penalty diagonal, >= 0
    Eigen::VectorXd d;      ///< stepsize diagonal, > 0
    double epsilon = 0.0;   ///< scaled-scheme factor, kept for reporting
    double alpha = 1.0;
    Eigen::VectorXd q_min;
    Eigen::VectorXd q_max;
    Eigen::VectorXd mu;     ///< voltage targets

    void validate() const;
};

ControlConfig make_droop(const Eigen::VectorXd& c, const Eigen::VectorXd& q_min,
                         const Eigen::VectorXd& q_max, const Eigen::VectorXd& mu);
ControlConfig make_scaled(const Eigen::MatrixXd& X, const Eigen::VectorXd& c, double epsilon,
                          const Eigen::VectorXd& q_min, const Eigen::VectorXd& q_max,
                          const Eigen::VectorXd& mu);
ControlConfig make_delayed_droop(const Eigen::VectorXd& c, double alpha,
                                 const Eigen::VectorXd& q_min, const Eigen::VectorXd& q_max,
                                 const Eigen::VectorXd& mu);
ControlConfig make_delayed_scaled(const Eigen::MatrixXd& X, const Eigen::VectorXd& c,
                                  double epsilon, double alpha, const Eigen::VectorXd& q_min,
                                  const Eigen::VectorXd& q_max, const Eigen::VectorXd& mu);
ControlConfig make_generic(const Eigen::VectorXd& c, const Eigen::VectorXd& d, double alpha,
                           const Eigen::VectorXd& q_min, const Eigen::VectorXd& q_max,
                           const Eigen::VectorXd& mu);

/// Controller state: iteration counter, current setpoints and the last
/// measured voltages. Every reachable state satisfies q_min <= q <= q_max.
struct ControlState {
    long t = 0;
    Eigen::VectorXd q;
    Eigen::VectorXd v;
};

/// Objective gradient from purely local quantities: V - mu + C q. Entry j
/// depends only on bus j's own measurement and setpoint.
Eigen::VectorXd gradient(const Eigen::VectorXd& v, const Eigen::VectorXd& q,
                         const Eigen::VectorXd& c, const Eigen::VectorXd& mu);

/// Componentwise clamp onto [q_min, q_max]. Total, idempotent, nonexpansive.
Eigen::VectorXd project(const Eigen::VectorXd& x, const Eigen::VectorXd& q_min,
                        const Eigen::VectorXd& q_max);

/// One relaxed gradient-projection update,
///   q_j <- (1-alpha) q_j + alpha * P_j[(1 - d_j c_j) q_j - d_j (V_j - mu_j)],
/// which every named scheme specializes. Throws ContractViolation if the
/// incoming setpoints are infeasible.
ControlState step(const ControlState& state, const ControlConfig& cfg,
                  const Eigen::VectorXd& v_measured);

enum class Plant { Linear, Ac };

struct LoopResult {
    ControlState state;
    std::vector<TraceRecord> trace;
    bool converged = false;
    bool oscillating = false;     ///< period-2 limit cycle detected in the tail
    bool plant_diverged = false;  ///< AC plant failed; trace is partial
    int iterations = 0;
};

/// Closed loop: plant solve -> measure V -> control step, until the setpoint
/// update falls below tol (inf-norm) or max_iter is reached. Hitting the
/// iteration cap is a legitimate outcome (droop oscillation), not an error;
/// only AC plant divergence aborts early.
LoopResult run_closed_loop(const FeederNetwork& net, const GraphMatrices& gm,
                           const ControlConfig& cfg, Plant plant, int max_iter, double tol);

/// Period-2 oscillation test on an error-norm history: the last `window`
/// samples split (at the largest sorted gap) into two clusters with
/// intra-cluster spread < spread_tol and separation > sep_tol.
bool detect_period2(std::span<const double> mismatch_history, int window = 20,
                    double spread_tol = 1e-6, double sep_tol = 1e-4);

} // namespace vvc
