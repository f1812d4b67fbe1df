#include "vvc/graph_matrices.hpp"

#include <limits>
#include <queue>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/LU>

namespace vvc {

namespace {

std::vector<int> bfs_depths(const FeederNetwork& net) {
    const int nb = net.n() + 1;
    std::vector<std::vector<int>> adj(nb);
    for (const Line& ln : net.lines()) {
        adj[ln.from].push_back(ln.to);
        adj[ln.to].push_back(ln.from);
    }
    std::vector<int> depth(nb, -1);
    std::queue<int> frontier;
    depth[0] = 0;
    frontier.push(0);
    while (!frontier.empty()) {
        int u = frontier.front();
        frontier.pop();
        for (int w : adj[u])
            if (depth[w] < 0) {
                depth[w] = depth[u] + 1;
                frontier.push(w);
            }
    }
    return depth;
}

void symmetrize(Eigen::MatrixXd& a) { a = 0.5 * (a + a.transpose()).eval(); }

} // namespace

GraphMatrices build_incidence(const FeederNetwork& net) {
    const int n = net.n();
    const int l = net.n_lines();
    const std::vector<int> depth = bfs_depths(net);

    GraphMatrices gm;
    gm.meshed = net.meshed();
    gm.incidence = Eigen::MatrixXd::Zero(n + 1, l);
    gm.r_diag.resize(l);
    gm.x_diag.resize(l);
    for (int col = 0; col < l; ++col) {
        const Line& ln = net.lines()[col];
        // head side (+1) is the endpoint closer to the feeder head; chords of
        // equal depth fall back to the file order
        int head = ln.from, tail = ln.to;
        if (depth[ln.to] < depth[ln.from]) {
            head = ln.to;
            tail = ln.from;
        }
        gm.incidence(head, col) = 1.0;
        gm.incidence(tail, col) = -1.0;
        gm.r_diag(col) = ln.r;
        gm.x_diag(col) = ln.x;
    }
    gm.slack_incidence = gm.incidence.row(0).transpose();
    gm.incidence_red = gm.incidence.bottomRows(n);
    return gm;
}

void compute_sensitivities(GraphMatrices& gm, SensitivityRoute route) {
    const int n = gm.n();
    const int l = gm.n_lines();
    if (n == 0 || l == 0) throw TopologyError("incidence matrices not built");
    if (route == SensitivityRoute::Auto)
        route = gm.meshed ? SensitivityRoute::LaplacianSolve : SensitivityRoute::TreeFactorization;
    if (route == SensitivityRoute::TreeFactorization && l != n)
        throw TopologyError("tree factorization requires exactly N lines");

    if (route == SensitivityRoute::TreeFactorization) {
        Eigen::FullPivLU<Eigen::MatrixXd> lu(gm.incidence_red);
        if (!lu.isInvertible())
            throw TopologyError("reduced incidence matrix is singular (disconnected graph)");
        const Eigen::MatrixXd minv = lu.inverse();
        gm.X = minv.transpose() * gm.x_diag.asDiagonal() * minv;
        gm.R = minv.transpose() * gm.r_diag.asDiagonal() * minv;
        // Bbus assembled as the product form, independent of the inversion
        gm.B = gm.incidence_red * gm.x_diag.cwiseInverse().asDiagonal() *
               gm.incidence_red.transpose();
        gm.slack_gain = -(minv.transpose() * gm.slack_incidence);
    } else {
        for (int col = 0; col < l; ++col)
            if (gm.meshed && gm.r_diag(col) <= 0.0)
                throw ParameterError(
                    "meshed resistance sensitivity requires r > 0 on every line");
        const Eigen::MatrixXd bx = gm.incidence_red * gm.x_diag.cwiseInverse().asDiagonal() *
                                   gm.incidence_red.transpose();
        Eigen::LLT<Eigen::MatrixXd> llt_x(bx);
        if (llt_x.info() != Eigen::Success)
            throw TopologyError("reactance Laplacian is not positive definite");
        gm.B = bx;
        gm.X = llt_x.solve(Eigen::MatrixXd::Identity(n, n));

        Eigen::VectorXd r_inv(l);
        for (int col = 0; col < l; ++col)
            r_inv(col) = gm.r_diag(col) > 0.0 ? 1.0 / gm.r_diag(col) : 0.0;
        const Eigen::MatrixXd br =
            gm.incidence_red * r_inv.asDiagonal() * gm.incidence_red.transpose();
        Eigen::LLT<Eigen::MatrixXd> llt_r(br);
        if (llt_r.info() != Eigen::Success)
            throw TopologyError("resistance Laplacian is not positive definite");
        gm.R = llt_r.solve(Eigen::MatrixXd::Identity(n, n));

        // slack coupling from the reduced-Laplacian solve; equals the ones
        // vector on any connected network
        const Eigen::VectorXd l0 =
            gm.incidence_red * gm.x_diag.cwiseInverse().asDiagonal() * gm.slack_incidence;
        gm.slack_gain = llt_x.solve(-l0);
    }

    symmetrize(gm.X);
    symmetrize(gm.R);
    symmetrize(gm.B);
    gm.has_sensitivities = true;
}

GraphMatrices graph_matrices(const FeederNetwork& net) {
    GraphMatrices gm = build_incidence(net);
    compute_sensitivities(gm);
    return gm;
}

Eigen::VectorXd baseline_voltage(const GraphMatrices& gm, const Eigen::VectorXd& p,
                                 const Eigen::VectorXd& qc, double v0) {
    if (!gm.has_sensitivities) throw ContractViolation("sensitivities not computed");
    if (p.size() != gm.n() || qc.size() != gm.n())
        throw DimensionError("baseline_voltage: p/qc length must equal N");
    return gm.R * p - gm.X * qc + v0 * gm.slack_gain;
}

} // namespace vvc
