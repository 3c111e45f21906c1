#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pmfix/metric.hpp"

#include <cmath>

using namespace pmfix;

TEST_CASE("eval_p on bundled metrics") {
    PartialMetric maxm = max_metric();
    CHECK(eval_p(maxm, point1(3), point1(5)) == 5.0);
    CHECK(eval_p(maxm, point1(0), point1(0)) == 0.0);

    PartialMetric interval = interval_metric();
    // direct evaluation of the interval formula: max{3,5} - min{1,2}
    CHECK(eval_p(interval, point2(1, 3), point2(2, 5)) == 4.0);

    PartialMetric mixed = mixed_metric(2.0);
    CHECK(eval_p(mixed, point1(0.2), point1(0.5)) == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(eval_p(mixed, point1(0.2), point1(1.5)) == 1.5);  // max branch once one arg >= 1

    CHECK_THROWS_AS(eval_p(maxm, point1(-1), point1(2)), std::domain_error);
    CHECK_THROWS_AS(eval_p(interval, point2(3, 1), point2(1, 3)), std::domain_error);
}

TEST_CASE("induced metric p^S") {
    PartialMetric maxm = max_metric();
    CHECK(induced_ps(maxm, point1(3), point1(5)) == 2.0);  // 2*5 - 3 - 5
    CHECK(induced_ps(maxm, point1(4), point1(4)) == 0.0);

    PartialMetric mixed = mixed_metric(2.0);
    CHECK(induced_ps(mixed, point1(0.2), point1(0.5)) == doctest::Approx(0.6).epsilon(1e-14));

    // for the max metric the induced metric is the usual distance
    IndexSampler rng(11);
    for (int i = 0; i < 200; ++i) {
        double a = 10.0 * rng.next_unit(), b = 10.0 * rng.next_unit();
        CHECK(induced_ps(maxm, point1(a), point1(b)) ==
              doctest::Approx(std::abs(a - b)).epsilon(1e-14));
    }
}

TEST_CASE("open ball membership") {
    PartialMetric maxm = max_metric();
    CHECK(ball_membership(maxm, point1(2), 0.5, point1(2.3)));
    CHECK_FALSE(ball_membership(maxm, point1(2), 0.5, point1(3)));
    CHECK(ball_membership(maxm, point1(2), 1e-9, point1(2)));
    CHECK_THROWS_AS(ball_membership(maxm, point1(2), 0.0, point1(2)), std::invalid_argument);
}

TEST_CASE("axiom check passes on the bundled metrics") {
    for (PartialMetric m : {max_metric(), interval_metric(), mixed_metric(2.0),
                            sup_pair_metric(), euclidean_metric(DomainDescriptor::planar_box(-1, 1, 21))}) {
        AxiomReport rep = check_axioms(m, m.domain, 10000, 42);
        INFO(m.name);
        CHECK(rep.violations.total() == 0);
        CHECK(rep.worst_slack >= 0.0);
    }
}

TEST_CASE("axiom check flags a broken metric") {
    // p(x,y) = x + y has self-distance 2x, which beats p(x,y) whenever x > y.
    PartialMetric broken;
    broken.name = "sum";
    broken.domain = DomainDescriptor::nonneg_reals(10.0, 101);
    broken.eval = [](const Point& x, const Point& y) { return x[0] + y[0]; };
    AxiomReport rep = check_axioms(broken, broken.domain, 1000, 7);
    CHECK(rep.violations.p2 > 0);
    CHECK(rep.worst_slack < 0.0);
}

TEST_CASE("axiom report serializes with the fixed shape") {
    PartialMetric maxm = max_metric();
    AxiomReport rep = check_axioms(maxm, maxm.domain, 100, 9);
    nlohmann::json j = rep.to_json();
    CHECK(j["metric"] == "max_metric");
    CHECK(j["n_triples"] == 100);
    CHECK(j["seed"] == 9);
    CHECK(j["violations"].contains("p1"));
    CHECK(j["violations"].contains("ps_triangle"));
    CHECK(j["worst"].contains("slack"));
}

TEST_CASE("induced metric separates points on sampled pairs") {
    for (PartialMetric m : {max_metric(10.0, 201), mixed_metric(2.0, 201)}) {
        const auto& grid = m.domain.sample_grid;
        IndexSampler rng(5);
        for (int t = 0; t < 2000; ++t) {
            const Point& x = grid[rng.next(grid.size())];
            const Point& y = grid[rng.next(grid.size())];
            double ps = induced_ps(m, x, y);
            if (x[0] == y[0]) {
                CHECK(ps == 0.0);
            } else {
                CHECK(ps > 0.0);
            }
        }
    }
}

TEST_CASE("deterministic sampling gives identical reports") {
    PartialMetric m = mixed_metric(2.0);
    AxiomReport a = check_axioms(m, m.domain, 500, 123);
    AxiomReport b = check_axioms(m, m.domain, 500, 123);
    CHECK(a.to_json() == b.to_json());
}
