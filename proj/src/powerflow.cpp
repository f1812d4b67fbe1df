#include "vvc/powerflow.hpp"

#include <cmath>
#include <limits>

namespace vvc {

Eigen::VectorXd solve_lindistflow(const GraphMatrices& gm, const Eigen::VectorXd& p,
                                  const Eigen::VectorXd& qc, const Eigen::VectorXd& q_g,
                                  double v0) {
    if (q_g.size() != gm.n()) throw DimensionError("solve_lindistflow: q length must equal N");
    return gm.X * q_g + baseline_voltage(gm, p, qc, v0);
}

Eigen::VectorXd lindistflow_voltage(const GraphMatrices& gm, const Eigen::VectorXd& q_g,
                                    const Eigen::VectorXd& vbar) {
    if (!gm.has_sensitivities) throw ContractViolation("sensitivities not computed");
    if (q_g.size() != gm.n() || vbar.size() != gm.n())
        throw DimensionError("lindistflow_voltage: q/vbar length must equal N");
    return gm.X * q_g + vbar;
}

AcSolver::AcSolver(const FeederNetwork& net, AcOptions opts) : n_(net.n()), opts_(opts) {
    const int nb = n_ + 1;
    y_full_ = Eigen::MatrixXcd::Zero(nb, nb);
    for (const Line& ln : net.lines()) {
        const std::complex<double> y = 1.0 / std::complex<double>(ln.r, ln.x);
        y_full_(ln.from, ln.from) += y;
        y_full_(ln.to, ln.to) += y;
        y_full_(ln.from, ln.to) -= y;
        y_full_(ln.to, ln.from) -= y;
    }
    const Eigen::MatrixXcd y_red = y_full_.bottomRightCorner(n_, n_);
    y_slack_col_ = y_full_.block(1, 0, n_, 1);
    lu_.compute(y_red);
    if (!(lu_.matrixLU().diagonal().array().abs() > 0.0).all())
        throw TopologyError("admittance matrix is singular");
}

AcSolution AcSolver::solve(const Eigen::VectorXd& p, const Eigen::VectorXd& q, double v0) const {
    if (p.size() != n_ || q.size() != n_)
        throw DimensionError("solve_acpf: p/q length must equal N");

    const Eigen::VectorXcd s_spec =
        p.cast<std::complex<double>>() +
        std::complex<double>(0.0, 1.0) * q.cast<std::complex<double>>();

    AcSolution sol;
    Eigen::VectorXcd v = Eigen::VectorXcd::Constant(n_, std::complex<double>(v0, 0.0));
    const std::complex<double> v_slack(v0, 0.0);

    double mismatch = std::numeric_limits<double>::infinity();
    int it = 0;
    bool bad = false;
    for (; it < opts_.max_iter; ++it) {
        if ((v.array().abs() < 1e-8).any()) {
            bad = true;
            break;
        }
        // injected current balanced against the network plus the slack tie
        const Eigen::VectorXcd i_inj = (s_spec.array() / v.array()).conjugate().matrix();
        const Eigen::VectorXcd v_next = lu_.solve(i_inj - y_slack_col_ * v_slack);

        Eigen::VectorXcd v_all(n_ + 1);
        v_all(0) = v_slack;
        v_all.tail(n_) = v_next;
        const Eigen::VectorXcd s_calc =
            (v_all.array() * (y_full_ * v_all).array().conjugate()).matrix().tail(n_);
        mismatch = (s_calc - s_spec).cwiseAbs().maxCoeff();
        v = v_next;
        if (!std::isfinite(mismatch)) {
            bad = true;
            break;
        }
        if (mismatch <= opts_.tol) {
            ++it;
            break;
        }
    }

    sol.iterations = it;
    sol.max_mismatch = mismatch;
    sol.converged = !bad && mismatch <= opts_.tol;
    sol.v_mag.resize(n_ + 1);
    sol.v_ang.resize(n_ + 1);
    sol.v_mag(0) = v0;
    sol.v_ang(0) = 0.0;
    for (int j = 0; j < n_; ++j) {
        sol.v_mag(j + 1) = std::abs(v(j));
        sol.v_ang(j + 1) = std::arg(v(j));
    }
    return sol;
}

AcSolution solve_acpf(const FeederNetwork& net, const Eigen::VectorXd& p,
                      const Eigen::VectorXd& q, double v0, const AcOptions& opts) {
    return AcSolver(net, opts).solve(p, q, v0);
}

} // namespace vvc
