#pragma once

#include <complex>

#include <Eigen/Dense>

#include "vvc/graph_matrices.hpp"
#include "vvc/network.hpp"

namespace vvc {

/// Result of a full AC power flow. v_mag/v_ang cover all N+1 buses with the
/// slack first; converged implies max_mismatch <= the solve tolerance.
struct AcSolution {
    Eigen::VectorXd v_mag;
    Eigen::VectorXd v_ang;
    bool converged = false;
    int iterations = 0;
    double max_mismatch = 0.0;
};

struct AcOptions {
    double tol = 1e-8;  ///< max per-bus complex power mismatch, p.u.
    int max_iter = 100;
};

/// Linear model voltage: V = X q_g + V̄(p, qc, v0). Pure evaluation, bounds
/// are not checked here.
Eigen::VectorXd solve_lindistflow(const GraphMatrices& gm, const Eigen::VectorXd& p,
                                  const Eigen::VectorXd& qc, const Eigen::VectorXd& q_g,
                                  double v0);

/// Same with a precomputed baseline profile (hot path for closed loops).
Eigen::VectorXd lindistflow_voltage(const GraphMatrices& gm, const Eigen::VectorXd& q_g,
                                    const Eigen::VectorXd& vbar);

/// Exact AC power flow via the implicit-impedance fixed point
///   V <- Yred^{-1} (conj(S / V) - Ys * v0)
/// from a flat start. Handles radial and meshed networks with one code path.
/// Holds the factorized reduced admittance matrix so repeated solves (closed
/// loops, daily runs) reuse it.
class AcSolver {
public:
    explicit AcSolver(const FeederNetwork& net, AcOptions opts = {});

    /// p, q: net injections at buses 1..N (q = q_g - q_c). Non-convergence is
    /// reported through the flag, not an exception.
    AcSolution solve(const Eigen::VectorXd& p, const Eigen::VectorXd& q, double v0) const;

private:
    int n_ = 0;
    AcOptions opts_;
    Eigen::MatrixXcd y_full_;
    Eigen::VectorXcd y_slack_col_;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
};

/// One-shot wrapper around AcSolver.
AcSolution solve_acpf(const FeederNetwork& net, const Eigen::VectorXd& p,
                      const Eigen::VectorXd& q, double v0, const AcOptions& opts = {});

} // namespace vvc
