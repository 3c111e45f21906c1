#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pmfix/fixed_point.hpp"
#include "pmfix/integral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace pmfix;

TEST_CASE("pointwise operator") {
    IntegralProblem prob = linear_problem(0.2);
    GridFunction fx = apply_f(prob, GridFunction::constant(5, 1.0));
    for (int j = 0; j < 5; ++j) CHECK(fx.values[j] == doctest::Approx(0.2).epsilon(1e-15));

    GridFunction zero = apply_f(prob, GridFunction::constant(5, 0.0));
    CHECK(zero.sup() == 0.0);

    IntegralProblem ramp = ramp_problem(0.2);
    GridFunction rx = apply_f(ramp, GridFunction::constant(5, 1.0));
    for (int j = 0; j < 5; ++j) {
        CHECK(rx.values[j] == doctest::Approx(0.2 * j / 4.0).epsilon(1e-15));
    }
}

TEST_CASE("integral operator with trapezoid weights") {
    IntegralProblem prob = linear_problem(0.2);
    GridFunction gx = apply_g(prob, GridFunction::constant(21, 1.0));
    for (int j = 0; j < gx.n(); ++j) CHECK(gx.values[j] == doctest::Approx(0.4).epsilon(1e-13));

    CHECK(apply_g(prob, GridFunction::constant(21, 0.0)).sup() == 0.0);

    // integrand linear in s: trapezoid is exact
    IntegralProblem ramp = ramp_problem(0.2);
    GridFunction rg = apply_g(ramp, GridFunction::constant(21, 1.0));
    for (int j = 0; j < rg.n(); ++j) CHECK(std::abs(rg.values[j] - 0.2) <= 1e-12);
}

TEST_CASE("admissibility conditions") {
    IntegralProblem prob = linear_problem(0.2);
    ConditionReport rep = check_conditions(prob, standard_probes(101), default_a_grid());
    CHECK(rep.passed());
    CHECK(rep.violations_i == 0);
    CHECK(rep.violations_ii == 0);
    CHECK(rep.violations_iii == 0);

    // psi(t) = t with phi(t) = 2t breaks the coupling for every positive a
    IntegralProblem bad = linear_problem(0.2);
    bad.control.name = "bad";
    bad.control.psi = [](double t) { return t; };
    bad.control.phi = [](double t) { return 2.0 * t; };
    ConditionReport rep2 = check_conditions(bad, standard_probes(11), default_a_grid());
    CHECK(rep2.violations_iii == 200);  // every a > 0 on the default grid

    IntegralProblem toobig = linear_problem(0.2);
    toobig.F = [](double, double u) { return 0.3 * u; };
    ConditionReport rep3 = check_conditions(toobig, standard_probes(11), default_a_grid());
    CHECK(rep3.violations_i > 0);
}

TEST_CASE("solving the bundled problem") {
    IntegralProblem prob = linear_problem(0.2);
    SolveResult res = solve(prob, GridFunction::constant(201, 1.0));
    CHECK(res.status == SolveStatus::Converged);
    CHECK(res.cycles <= 14);
    CHECK(res.limit.sup() <= 1e-8);
    CHECK(res.residual_sup <= 1e-10);
    CHECK(res.residual_sup <= 1e-10 * (1 + 2 * prob.h) * 2);  // residual certificate

    // per-half-step contraction factors from the admissibility bounds
    for (std::size_t i = 0; i + 1 < res.iterates.size(); ++i) {
        double factor = (i % 2 == 0) ? prob.h : 2.0 * prob.h;
        CHECK(res.iterates[i + 1].sup() <= factor * res.iterates[i].sup() + 1e-15);
    }
}

TEST_CASE("zero seed is already solved") {
    IntegralProblem prob = linear_problem(0.2);
    SolveResult res = solve(prob, GridFunction::constant(51, 0.0));
    CHECK(res.status == SolveStatus::Converged);
    CHECK(res.cycles == 1);
    CHECK(res.limit.sup() == 0.0);
    CHECK(res.residual_sup == 0.0);
}

TEST_CASE("ramp problem contracts even faster") {
    IntegralProblem prob = ramp_problem(0.1);
    SolveResult res = solve(prob, GridFunction::constant(201, 1.0));
    CHECK(res.status == SolveStatus::Converged);
    CHECK(res.cycles <= 10);
    CHECK(res.limit.sup() <= 1e-9);
    CHECK(res.residual_sup <= 1e-10);
}

TEST_CASE("condition violations stop the solver") {
    IntegralProblem prob = linear_problem(0.2);
    prob.control.phi = [](double t) { return 2.0 * t; };
    SolveResult res = solve(prob, GridFunction::constant(51, 1.0));
    CHECK(res.status == SolveStatus::ConditionViolation);
}

TEST_CASE("the solver trace satisfies the contraction inequality") {
    IntegralProblem prob = linear_problem(0.2);
    const int n = 51;
    SolveResult res = solve(prob, GridFunction::constant(n, 1.0));
    REQUIRE(res.status == SolveStatus::Converged);

    // view the two operators as the dominated pair with identity on the
    // dominating side, over the sup-based metric on grid functions
    PartialMetric sup_metric = sup_pair_metric(n, 4, 1.0, 1);
    MapQuartet q;
    q.name = "integral-operators";
    q.order = usual_leq();
    q.f = [&prob](const Point& x) { return apply_f(prob, GridFunction(x)).values; };
    q.g = [&prob](const Point& x) { return apply_g(prob, GridFunction(x)).values; };
    auto id = [](const Point& x) { return x; };
    q.S = q.T = id;
    q.preimage_S = q.preimage_T = id;

    std::vector<std::pair<Point, Point>> consecutive;
    for (std::size_t i = 0; i + 1 < res.iterates.size(); ++i) {
        consecutive.emplace_back(res.iterates[i].values, res.iterates[i + 1].values);
    }
    ContractionReport rep = verify_contraction(sup_metric, q, prob.control, consecutive);
    CHECK(rep.n_skipped_non_comparable == 0);  // the chain is pointwise monotone
    CHECK(rep.n_violations == 0);
}

TEST_CASE("solution csv shape") {
    IntegralProblem prob = linear_problem(0.2);
    SolveResult res = solve(prob, GridFunction::constant(11, 1.0));
    std::ostringstream os;
    res.write_csv(os);
    std::string text = os.str();
    CHECK(text.rfind("t,u,residual\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 12);
}

TEST_CASE("grid functions validate their invariants") {
    CHECK_THROWS_AS(GridFunction(Eigen::VectorXd::Constant(1, 1.0)), std::invalid_argument);
    Eigen::VectorXd neg(3);
    neg << 0.0, -0.1, 0.2;
    CHECK_THROWS_AS(GridFunction(neg), std::invalid_argument);
}
