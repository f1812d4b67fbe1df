#pragma once

#include <optional>

#include <Eigen/Dense>

#include "vvc/control.hpp"

namespace vvc {

/// Eigenvalue certification of a controller configuration. stable means the
/// sufficient contraction condition holds: lambda_max(H) < 2 (strict; the
/// marginal case is reported unstable), relaxed to 2/alpha for delayed
/// schemes. epsilon_bound and alpha_bound are the admissible stepsize limits;
/// droop_pd_ok is only meaningful for the droop scheme.
struct StabilityReport {
    Scheme scheme = Scheme::GenericGP;
    double lambda_max_h = 0.0;
    bool stable = false;
    double epsilon_bound = 0.0;
    double alpha_bound = 0.0;
    std::optional<bool> droop_pd_ok;
    double alpha = 1.0;
};

/// H := D^{1/2} (X + C) D^{1/2} with diagonal D (entries > 0) and C (>= 0).
Eigen::MatrixXd h_matrix(const Eigen::VectorXd& d, const Eigen::MatrixXd& X,
                         const Eigen::VectorXd& c);

/// Largest eigenvalue of a symmetric matrix (full decomposition; the
/// instances here are small). Asymmetry beyond 1e-9 is a contract violation.
double lambda_max_sym(const Eigen::MatrixXd& A);

/// Strict upper bound on the scaled-scheme stepsize:
///   eps < 2 / lambda_max(D_H^{1/2} (X+C) D_H^{1/2}),  D_H = [diag(X+C)]^{-1}.
double scaled_epsilon_bound(const Eigen::MatrixXd& X, const Eigen::VectorXd& c);

/// Certify a resolved configuration against the feeder's X matrix.
StabilityReport analyze(const ControlConfig& cfg, const GraphMatrices& gm);

} // namespace vvc
