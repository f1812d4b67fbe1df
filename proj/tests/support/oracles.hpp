#pragma once

#include <random>

#include <Eigen/Dense>

#include "vvc/network.hpp"

// Test-only reference implementations, independent of the library's
// computation paths on purpose.
namespace oracles {

/// Weighted reduced graph Laplacian assembled entry by entry from the line
/// list (weights 1/w per line), slack row/column dropped.
Eigen::MatrixXd reduced_laplacian(const vvc::FeederNetwork& net, bool use_reactance);

/// Largest eigenvalue of an SPD matrix by plain power iteration.
double power_iteration_lambda_max(const Eigen::MatrixXd& a, int iters = 20000, double tol = 1e-12);

/// Brute-force box-QP: minimize 1/2 q'Hq - g'q over [lo, hi] by enumerating
/// all 3^N active-set patterns and checking the sign conditions. N <= 8.
Eigen::VectorXd active_set_solve(const Eigen::MatrixXd& h, const Eigen::VectorXd& g,
                                 const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);

/// Refine an approximate box-QP solution to machine precision by freezing
/// its active set and solving the reduced KKT system. Falls back to the
/// input if the polished point violates feasibility or the sign conditions.
Eigen::VectorXd polish_box_qp(const Eigen::MatrixXd& h, const Eigen::VectorXd& g,
                              const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                              const Eigen::VectorXd& q_approx, double atol = 1e-7);

/// |V1| of the two-bus feeder from the quadratic in |V1|^2 (load P+jQ taken
/// positive, injection is its negative).
double two_bus_voltage(double r, double x, double p_load, double q_load, double v0);

/// LinDistFlow voltages for a tree network, solved from the concatenated
/// balance + voltage-drop equations assembled as one linear system.
Eigen::VectorXd lindistflow_direct(const vvc::FeederNetwork& net, const Eigen::VectorXd& p,
                                   const Eigen::VectorXd& qc, const Eigen::VectorXd& q_g,
                                   double v0);

struct RandomNetOptions {
    double r_min = 0.001, r_max = 0.01;
    double x_min = 0.002, x_max = 0.02;
    bool with_loads = false;
    bool with_bounds = false;
};

vvc::FeederNetwork random_tree(std::mt19937& rng, int n, const RandomNetOptions& opt = {});
vvc::FeederNetwork random_meshed(std::mt19937& rng, int n, int extra_lines,
                                 const RandomNetOptions& opt = {});

/// Straight-line feeder with uniform per-segment impedance and identical
/// bus data, all in per unit.
vvc::FeederNetwork path_feeder(int n, double r_pu, double x_pu, double p_load_pu,
                               double qc_pu, double q_lim_pu, double c, double v0 = 1.0);

} // namespace oracles
