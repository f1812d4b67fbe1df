#pragma once

#include <Eigen/Dense>

#include "vvc/network.hpp"

namespace vvc {

/// How the voltage sensitivities are formed. Trees admit a direct
/// factorization of the reduced incidence matrix; the Laplacian route works
/// for any connected topology. Auto picks by topology.
enum class SensitivityRoute { Auto, TreeFactorization, LaplacianSolve };

/// Graph-derived matrices of the feeder. `incidence` is the full (N+1) x L
/// oriented incidence matrix (+1 on the side closer to the feeder head),
/// `slack_incidence` its slack row and `incidence_red` the remaining N rows.
/// After compute_sensitivities(): R, X are the symmetric PD voltage
/// sensitivities, B = X^{-1} is the reactance-weighted reduced Laplacian
/// (Bbus), and `slack_gain` the per-unit voltage contribution of the slack
/// source (identically the all-ones vector on a connected network).
struct GraphMatrices {
    Eigen::MatrixXd incidence;        // (N+1) x L
    Eigen::VectorXd slack_incidence;  // L
    Eigen::MatrixXd incidence_red;    // N x L
    Eigen::VectorXd r_diag;           // L, per-line resistance
    Eigen::VectorXd x_diag;           // L, per-line reactance
    Eigen::MatrixXd R;                // N x N
    Eigen::MatrixXd X;                // N x N
    Eigen::MatrixXd B;                // N x N
    Eigen::VectorXd slack_gain;       // N
    bool meshed = false;
    bool has_sensitivities = false;

    int n() const { return static_cast<int>(incidence_red.rows()); }
    int n_lines() const { return static_cast<int>(incidence_red.cols()); }
};

/// Build the oriented incidence matrices and line-parameter diagonals.
/// Tree lines are oriented head-side +1 (depth from the slack); lines whose
/// endpoints are equally deep (meshed chords) orient from -> +1.
GraphMatrices build_incidence(const FeederNetwork& net);

/// Fill R, X, B and slack_gain. R and X are symmetrized after computation;
/// B is assembled as the weighted Laplacian product so that B*X == I is a
/// nontrivial cross-check of the factorizations.
void compute_sensitivities(GraphMatrices& gm, SensitivityRoute route = SensitivityRoute::Auto);

/// Convenience: build_incidence + compute_sensitivities.
GraphMatrices graph_matrices(const FeederNetwork& net);

/// Voltage profile with no inverter VAR support: V̄ = R p − X qc + v0 * slack_gain.
Eigen::VectorXd baseline_voltage(const GraphMatrices& gm, const Eigen::VectorXd& p,
                                 const Eigen::VectorXd& qc, double v0);

} // namespace vvc
