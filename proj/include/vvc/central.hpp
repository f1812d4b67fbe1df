#pragma once

#include <Eigen/Dense>

#include "vvc/graph_matrices.hpp"

namespace vvc {
namespace central {

/// Reference problems solved centrally.
///   Unweighted             min 1/2 ||X q - vt||^2
///   Weighted               min 1/2 (Xq - vt)' B (Xq - vt) + 1/2 q' C q
///   BenchmarkScaledIdentity  B replaced by lambda_bar * I
/// all subject to q_min <= q <= q_max. With B X = I the weighted gradient
/// collapses to (X q - vt) + C q, which is what makes the local schemes
/// possible; the solver here is the independent reference for them.
enum class Objective { Unweighted, Weighted, BenchmarkScaledIdentity };

struct QpProblem {
    Objective objective = Objective::Weighted;
    Eigen::MatrixXd X;
    Eigen::VectorXd v_tilde;  ///< mu - V̄
    Eigen::VectorXd c;        ///< penalty diagonal
    Eigen::VectorXd q_min;
    Eigen::VectorXd q_max;
    double lambda_bar = 0.0;  ///< Benchmark weight: mean of B's eigenvalues
};

/// Assemble a problem from computed sensitivities. For the benchmark
/// objective lambda_bar = trace(B)/N. Set zero_penalty to drop C.
QpProblem make_problem(const GraphMatrices& gm, const Eigen::VectorXd& v_tilde,
                       const Eigen::VectorXd& c, const Eigen::VectorXd& q_min,
                       const Eigen::VectorXd& q_max, Objective objective,
                       bool zero_penalty = false);

struct QpSolution {
    Eigen::VectorXd q;
    long iterations = 0;
    double residual = 0.0;
};

/// Projected gradient with the safe constant step 1/lambda_max(Hessian),
/// run until the fixed-point residual ||q - P[q - s*grad]||_inf <= tol.
/// Starts from the projected origin unless q0 is given (projected too).
/// Throws ConvergenceError (residual attached) if the budget runs out.
QpSolution solve(const QpProblem& prob, double tol = 1e-10, long max_iter = 500000,
                 const Eigen::VectorXd* q0 = nullptr);

/// Unit-step projection fixed-point residual ||q - P[q - grad g(q)]||_inf;
/// zero exactly at the optimum. q must be feasible.
double kkt_residual(const QpProblem& prob, const Eigen::VectorXd& q);

Eigen::VectorXd gradient_of(const QpProblem& prob, const Eigen::VectorXd& q);

/// Objective value (the weighted form factors X once per call).
double objective_value(const QpProblem& prob, const Eigen::VectorXd& q);

/// ||X q - vt||_2, the voltage mismatch under the linear model.
double mismatch_norm(const QpProblem& prob, const Eigen::VectorXd& q);

} // namespace central
} // namespace vvc
