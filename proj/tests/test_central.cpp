#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "support/oracles.hpp"
#include "vvc/central.hpp"
#include "vvc/control.hpp"

using namespace vvc;
using central::Objective;
using central::QpProblem;

namespace {

FeederNetwork feeder16() {
    return oracles::path_feeder(15, 0.6058 / 144.0, 0.9529 / 144.0, 0.1, 0.05, 0.1, 0.2);
}

Eigen::VectorXd constant(int n, double v) { return Eigen::VectorXd::Constant(n, v); }

QpProblem weighted16() {
    const FeederNetwork net = feeder16();
    const GraphMatrices gm = graph_matrices(net);
    const Eigen::VectorXd vbar =
        baseline_voltage(gm, net.injections_p(), net.loads_qc(), net.v0());
    return central::make_problem(gm, net.targets() - vbar, constant(15, 0.2), net.q_lower(),
                                 net.q_upper(), Objective::Weighted);
}

// (H, g) of 1/2 q'Hq - g'q matching each objective, for the brute-force oracle
std::pair<Eigen::MatrixXd, Eigen::VectorXd> quadratic_form(const QpProblem& prob) {
    switch (prob.objective) {
        case Objective::Weighted: {
            Eigen::MatrixXd h = prob.X;
            h.diagonal() += prob.c;
            return {h, prob.v_tilde};
        }
        case Objective::Unweighted:
            return {prob.X * prob.X, prob.X * prob.v_tilde};
        case Objective::BenchmarkScaledIdentity: {
            Eigen::MatrixXd h = prob.lambda_bar * (prob.X * prob.X);
            h.diagonal() += prob.c;
            return {h, prob.lambda_bar * (prob.X * prob.v_tilde)};
        }
    }
    throw Error("unreachable");
}

} // namespace

TEST_CASE("unconstrained-equivalent weighted solve is B v_tilde") {
    std::mt19937 rng(11001);
    const FeederNetwork net = oracles::random_tree(rng, 7, {.with_loads = true});
    const GraphMatrices gm = graph_matrices(net);
    const Eigen::VectorXd vbar =
        baseline_voltage(gm, net.injections_p(), net.loads_qc(), net.v0());
    const Eigen::VectorXd vt = constant(7, 1.0) - vbar;
    const QpProblem prob = central::make_problem(gm, vt, constant(7, 0.0), constant(7, -1e6),
                                                 constant(7, 1e6), Objective::Weighted);
    const central::QpSolution sol = central::solve(prob, 1e-12);
    const Eigen::VectorXd expect = gm.B * vt;
    CHECK((sol.q - expect).lpNorm<Eigen::Infinity>() < 1e-8);
}

TEST_CASE("single-bus clamp") {
    Eigen::MatrixXd x(1, 1);
    x << 0.5;
    QpProblem prob;
    prob.objective = Objective::Weighted;
    prob.X = x;
    prob.v_tilde = constant(1, 0.1);
    prob.c = constant(1, 0.0);
    prob.q_min = constant(1, -0.05);
    prob.q_max = constant(1, 0.05);
    const central::QpSolution sol = central::solve(prob, 1e-12);
    CHECK(sol.q(0) == doctest::Approx(0.05).epsilon(1e-10));
}

TEST_CASE("solver agrees with the brute-force active-set oracle") {
    std::mt19937 rng(11002);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 3 + trial % 4;
        const FeederNetwork net =
            oracles::random_tree(rng, n, {.with_loads = true, .with_bounds = true});
        const GraphMatrices gm = graph_matrices(net);
        const Eigen::VectorXd vbar =
            baseline_voltage(gm, net.injections_p(), net.loads_qc(), net.v0());
        const Objective obj = trial % 3 == 0   ? Objective::Unweighted
                              : trial % 3 == 1 ? Objective::Weighted
                                               : Objective::BenchmarkScaledIdentity;
        const QpProblem prob =
            central::make_problem(gm, net.targets() - vbar, net.penalties(), net.q_lower(),
                                  net.q_upper(), obj);
        const central::QpSolution sol = central::solve(prob, 1e-12);
        const auto [h, g] = quadratic_form(prob);
        const Eigen::VectorXd brute =
            oracles::active_set_solve(h, g, prob.q_min, prob.q_max);
        CHECK((sol.q - brute).lpNorm<Eigen::Infinity>() < 1e-8);
    }
}

TEST_CASE("kkt residual") {
    const QpProblem prob = weighted16();
    const central::QpSolution sol = central::solve(prob, 1e-11);

    SUBCASE("zero at the solver output") {
        CHECK(central::kkt_residual(prob, sol.q) < 1e-9);
    }
    SUBCASE("large far from the optimum") {
        CHECK(central::kkt_residual(prob, Eigen::VectorXd::Zero(15)) > 0.01);
    }
    SUBCASE("first-order response to an interior perturbation") {
        int interior = -1;
        for (int j = 0; j < 15; ++j)
            if (sol.q(j) > prob.q_min(j) + 0.01 && sol.q(j) < prob.q_max(j) - 0.01) interior = j;
        REQUIRE(interior >= 0);
        Eigen::VectorXd q = sol.q;
        q(interior) += 1e-3;
        q = project(q, prob.q_min, prob.q_max);
        const double expected = (prob.X(interior, interior) + prob.c(interior)) * 1e-3;
        CHECK(central::kkt_residual(prob, q) == doctest::Approx(expected).epsilon(0.02));
    }
    SUBCASE("infeasible input is a contract violation") {
        CHECK_THROWS_AS(central::kkt_residual(prob, constant(15, 1.0)), ContractViolation);
    }
}

TEST_CASE("strong convexity: solves from different starts coincide") {
    const QpProblem prob = weighted16();
    const double tol = 1e-11;
    const central::QpSolution base = central::solve(prob, tol);
    for (const double start : {-0.1, 0.1, 0.035}) {
        const Eigen::VectorXd q0 = constant(15, start);
        const central::QpSolution other = central::solve(prob, tol, 500000, &q0);
        CHECK((other.q - base.q).lpNorm<Eigen::Infinity>() < 10 * tol);
    }
}

TEST_CASE("objective ordering on the 16-bus case") {
    const FeederNetwork net = feeder16();
    const GraphMatrices gm = graph_matrices(net);
    const Eigen::VectorXd vbar =
        baseline_voltage(gm, net.injections_p(), net.loads_qc(), net.v0());
    const Eigen::VectorXd vt = net.targets() - vbar;

    const QpProblem unweighted = central::make_problem(
        gm, vt, constant(15, 0.0), net.q_lower(), net.q_upper(), Objective::Unweighted);
    const QpProblem weighted = central::make_problem(
        gm, vt, constant(15, 0.2), net.q_lower(), net.q_upper(), Objective::Weighted);
    const Eigen::VectorXd q_dag = central::solve(unweighted, 1e-11).q;
    const Eigen::VectorXd q_star = central::solve(weighted, 1e-11).q;
    // the unweighted optimum can only be better in its own norm
    CHECK(central::mismatch_norm(unweighted, q_dag) <=
          central::mismatch_norm(unweighted, q_star) + 1e-12);
}

TEST_CASE("with inactive bounds and zero penalty the two objectives coincide") {
    std::mt19937 rng(11003);
    const FeederNetwork net = oracles::random_tree(rng, 6, {.with_loads = true});
    const GraphMatrices gm = graph_matrices(net);
    const Eigen::VectorXd vbar =
        baseline_voltage(gm, net.injections_p(), net.loads_qc(), net.v0());
    const Eigen::VectorXd vt = constant(6, 1.0) - vbar;
    const Eigen::VectorXd lo = constant(6, -100.0), hi = constant(6, 100.0);
    const Eigen::VectorXd qw =
        central::solve(central::make_problem(gm, vt, constant(6, 0.0), lo, hi,
                                             Objective::Weighted),
                       1e-12)
            .q;
    const Eigen::VectorXd qu =
        central::solve(central::make_problem(gm, vt, constant(6, 0.0), lo, hi,
                                             Objective::Unweighted),
                       1e-12)
            .q;
    CHECK((qw - qu).lpNorm<Eigen::Infinity>() < 1e-6);
}

TEST_CASE("exhausted budget raises with the residual attached") {
    const QpProblem prob = weighted16();
    try {
        central::solve(prob, 1e-14, 3);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(e.residual > 0.0);
    }
}

TEST_CASE("benchmark lambda_bar is the mean of B's eigenvalues") {
    const GraphMatrices gm = graph_matrices(feeder16());
    const QpProblem prob =
        central::make_problem(gm, constant(15, 0.0), constant(15, 0.2), constant(15, -0.1),
                              constant(15, 0.1), Objective::BenchmarkScaledIdentity);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gm.B, Eigen::EigenvaluesOnly);
    CHECK(prob.lambda_bar == doctest::Approx(es.eigenvalues().mean()).epsilon(1e-12));
}
