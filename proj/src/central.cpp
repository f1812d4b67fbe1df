#include "vvc/central.hpp"

#include <cmath>

#include <Eigen/Cholesky>

#include "vvc/control.hpp"
#include "vvc/stability.hpp"

namespace vvc {
namespace central {

namespace {

void check_problem(const QpProblem& prob) {
    const Eigen::Index n = prob.X.rows();
    if (prob.X.cols() != n) throw DimensionError("qp: X must be square");
    if (prob.v_tilde.size() != n || prob.c.size() != n || prob.q_min.size() != n ||
        prob.q_max.size() != n)
        throw DimensionError("qp: vector lengths disagree with X");
    if ((prob.q_min.array() > prob.q_max.array()).any())
        throw ParameterError("qp: empty box (q_min > q_max somewhere)");
    if ((prob.c.array() < 0.0).any()) throw ParameterError("qp: penalties must be >= 0");
    if (prob.objective == Objective::BenchmarkScaledIdentity && prob.lambda_bar <= 0.0)
        throw ParameterError("qp: benchmark objective needs lambda_bar > 0");
}

Eigen::MatrixXd hessian_of(const QpProblem& prob) {
    const Eigen::Index n = prob.X.rows();
    Eigen::MatrixXd h;
    switch (prob.objective) {
        case Objective::Weighted:
            h = prob.X;
            h.diagonal() += prob.c;
            break;
        case Objective::Unweighted:
            h = prob.X * prob.X;
            break;
        case Objective::BenchmarkScaledIdentity:
            h = prob.lambda_bar * (prob.X * prob.X);
            h.diagonal() += prob.c;
            break;
    }
    return 0.5 * (h + h.transpose()).eval();
}

} // namespace

QpProblem make_problem(const GraphMatrices& gm, const Eigen::VectorXd& v_tilde,
                       const Eigen::VectorXd& c, const Eigen::VectorXd& q_min,
                       const Eigen::VectorXd& q_max, Objective objective, bool zero_penalty) {
    if (!gm.has_sensitivities) throw ContractViolation("make_problem: sensitivities not computed");
    QpProblem prob;
    prob.objective = objective;
    prob.X = gm.X;
    prob.v_tilde = v_tilde;
    prob.c = zero_penalty ? Eigen::VectorXd::Zero(gm.n()).eval() : c;
    prob.q_min = q_min;
    prob.q_max = q_max;
    if (objective == Objective::BenchmarkScaledIdentity)
        prob.lambda_bar = gm.B.trace() / static_cast<double>(gm.n());
    return prob;
}

Eigen::VectorXd gradient_of(const QpProblem& prob, const Eigen::VectorXd& q) {
    const Eigen::VectorXd y = prob.X * q - prob.v_tilde;
    switch (prob.objective) {
        case Objective::Weighted:
            return y + prob.c.cwiseProduct(q);
        case Objective::Unweighted:
            return prob.X * y;
        case Objective::BenchmarkScaledIdentity:
            return prob.lambda_bar * (prob.X * y) + prob.c.cwiseProduct(q);
    }
    throw Error("unreachable objective");
}

double objective_value(const QpProblem& prob, const Eigen::VectorXd& q) {
    const Eigen::VectorXd y = prob.X * q - prob.v_tilde;
    switch (prob.objective) {
        case Objective::Weighted: {
            Eigen::LLT<Eigen::MatrixXd> llt(prob.X);
            if (llt.info() != Eigen::Success)
                throw ParameterError("objective_value: X not positive definite");
            return 0.5 * y.dot(llt.solve(y)) + 0.5 * q.dot(prob.c.cwiseProduct(q));
        }
        case Objective::Unweighted:
            return 0.5 * y.squaredNorm();
        case Objective::BenchmarkScaledIdentity:
            return 0.5 * prob.lambda_bar * y.squaredNorm() +
                   0.5 * q.dot(prob.c.cwiseProduct(q));
    }
    throw Error("unreachable objective");
}

double mismatch_norm(const QpProblem& prob, const Eigen::VectorXd& q) {
    return (prob.X * q - prob.v_tilde).norm();
}

QpSolution solve(const QpProblem& prob, double tol, long max_iter, const Eigen::VectorXd* q0) {
    check_problem(prob);
    const double lip = lambda_max_sym(hessian_of(prob));
    if (!(lip > 0.0)) throw ParameterError("qp: Hessian is not positive definite");
    const double step = 1.0 / lip;

    if (q0 && q0->size() != prob.X.rows()) throw DimensionError("qp: start length mismatch");
    QpSolution sol;
    Eigen::VectorXd q = q0 ? project(*q0, prob.q_min, prob.q_max)
                           : project(Eigen::VectorXd::Zero(prob.X.rows()), prob.q_min,
                                     prob.q_max);
    double residual = 0.0;
    for (long it = 1; it <= max_iter; ++it) {
        const Eigen::VectorXd q_next =
            project(q - step * gradient_of(prob, q), prob.q_min, prob.q_max);
        residual = (q_next - q).lpNorm<Eigen::Infinity>();
        q = q_next;
        if (residual <= tol) {
            sol.q = q;
            sol.iterations = it;
            sol.residual = residual;
            return sol;
        }
    }
    throw ConvergenceError("qp solve: projected gradient exhausted its budget", residual);
}

double kkt_residual(const QpProblem& prob, const Eigen::VectorXd& q) {
    check_problem(prob);
    constexpr double kFeasSlack = 1e-12;
    if ((q.array() < prob.q_min.array() - kFeasSlack).any() ||
        (q.array() > prob.q_max.array() + kFeasSlack).any())
        throw ContractViolation("kkt_residual: q is infeasible");
    const Eigen::VectorXd proj = project(q - gradient_of(prob, q), prob.q_min, prob.q_max);
    return (q - proj).lpNorm<Eigen::Infinity>();
}

} // namespace central
} // namespace vvc
