#include "vvc/stability.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace vvc {

Eigen::MatrixXd h_matrix(const Eigen::VectorXd& d, const Eigen::MatrixXd& X,
                         const Eigen::VectorXd& c) {
    if (X.rows() != X.cols()) throw DimensionError("h_matrix: X must be square");
    if (d.size() != X.rows() || c.size() != X.rows())
        throw DimensionError("h_matrix: diagonal lengths disagree with X");
    if ((d.array() <= 0.0).any()) throw ParameterError("h_matrix: D entries must be > 0");
    if ((c.array() < 0.0).any()) throw ParameterError("h_matrix: C entries must be >= 0");
    const Eigen::VectorXd d_half = d.cwiseSqrt();
    Eigen::MatrixXd xc = X;
    xc.diagonal() += c;
    Eigen::MatrixXd h = d_half.asDiagonal() * xc * d_half.asDiagonal();
    return 0.5 * (h + h.transpose()).eval();
}

double lambda_max_sym(const Eigen::MatrixXd& A) {
    if (A.rows() != A.cols()) throw DimensionError("lambda_max_sym: matrix must be square");
    const double asym = (A - A.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-9)
        throw ContractViolation("lambda_max_sym: matrix asymmetry " + std::to_string(asym));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

double scaled_epsilon_bound(const Eigen::MatrixXd& X, const Eigen::VectorXd& c) {
    if (X.rows() != c.size()) throw DimensionError("scaled_epsilon_bound: sizes disagree");
    const Eigen::VectorXd dh = (X.diagonal() + c).cwiseInverse();
    if (!(dh.array() > 0.0).all())
        throw ParameterError("scaled_epsilon_bound: diag(X + C) must be positive");
    return 2.0 / lambda_max_sym(h_matrix(dh, X, c));
}

StabilityReport analyze(const ControlConfig& cfg, const GraphMatrices& gm) {
    cfg.validate();
    if (!gm.has_sensitivities) throw ContractViolation("analyze: sensitivities not computed");
    if (cfg.c.size() != gm.n()) throw DimensionError("analyze: config size disagrees with network");
    if (cfg.scheme == Scheme::Droop && (cfg.c.array() <= 0.0).any())
        throw ParameterError("analyze: droop scheme requires every c_j > 0");

    StabilityReport rep;
    rep.scheme = cfg.scheme;
    rep.alpha = cfg.alpha;
    rep.lambda_max_h = lambda_max_sym(h_matrix(cfg.d, gm.X, cfg.c));
    rep.alpha_bound = 2.0 / rep.lambda_max_h;
    rep.epsilon_bound = scaled_epsilon_bound(gm.X, cfg.c);

    // delayed schemes relax the condition by the schedule's supremum of alpha
    const double limit = cfg.scheme == Scheme::Delayed ? 2.0 / cfg.alpha : 2.0;
    rep.stable = rep.lambda_max_h < limit;

    if (cfg.scheme == Scheme::Droop) {
        const Eigen::VectorXd c_inv_half = cfg.c.cwiseInverse().cwiseSqrt();
        const Eigen::MatrixXd scaled =
            c_inv_half.asDiagonal() * gm.X * c_inv_half.asDiagonal();
        rep.droop_pd_ok = lambda_max_sym(0.5 * (scaled + scaled.transpose())) < 1.0;
    }
    return rep;
}

} // namespace vvc
