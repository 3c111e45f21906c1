#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pmfix/fixed_point.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace pmfix;

namespace {

PartialMetric mixed2() { return mixed_metric(2.0, 2001); }

}  // namespace

TEST_CASE("generalized distance M_p on the worked quartet") {
    PartialMetric m = mixed2();
    MapQuartet q = example22_quartet(2.0);

    CHECK(compute_Mp(m, q, point1(0.0), point1(2.0)) == 2.0);

    // term-by-term transcription as the oracle
    Point x = point1(0.3), y = point1(0.2);
    Point fx = q.f(x), gy = q.g(y), Sx = q.S(x), Ty = q.T(y);
    double expected = std::max({m.eval(Sx, Ty), m.eval(fx, Sx), m.eval(gy, Ty),
                                (m.eval(Sx, gy) + m.eval(fx, Ty)) / 2.0});
    CHECK(compute_Mp(m, q, x, y) == doctest::Approx(expected).epsilon(0));
    CHECK(compute_Mp(m, q, x, y) == doctest::Approx(17.0 / 60.0).epsilon(1e-12));

    // a common fixed point with zero self-distance kills every term
    PartialMetric e1 = euclidean_metric(DomainDescriptor::real_interval(0, 1, 11));
    MapQuartet id = identity_quartet();
    CHECK(compute_Mp(e1, id, point1(0.5), point1(0.5)) == 0.0);
}

TEST_CASE("single-map reduction of M_p") {
    PartialMetric e1 = euclidean_metric(DomainDescriptor::real_interval(0, 1, 101));
    MapQuartet q;
    q.name = "halving";
    q.order = usual_leq();
    q.f = q.g = [](const Point& x) { return point1(x[0] / 2.0); };
    auto id = [](const Point& x) { return x; };
    q.S = q.T = id;
    q.preimage_S = q.preimage_T = id;

    IndexSampler rng(3);
    for (int t = 0; t < 500; ++t) {
        Point x = point1(rng.next_unit()), y = point1(rng.next_unit());
        Point fx = q.f(x), gy = q.g(y);
        double two_map = std::max({e1.eval(x, y), e1.eval(fx, x), e1.eval(gy, y),
                                   (e1.eval(x, gy) + e1.eval(fx, y)) / 2.0});
        CHECK(compute_Mp(e1, q, x, y) == two_map);
    }
}

TEST_CASE("domination and range hypotheses") {
    PartialMetric m = mixed2();
    MapQuartet q = example22_quartet(2.0);
    HypothesisReport rep = check_dominated_dominating(m, q, m.domain);
    CHECK(rep.passed());
    CHECK(rep.f_dominated_failures == 0);
    CHECK(rep.g_dominated_failures == 0);
    CHECK(rep.s_dominating_failures == 0);
    CHECK(rep.t_dominating_failures == 0);
    CHECK(rep.range_via_oracle);
    CHECK(rep.range_f_in_t_residual <= 1e-9);
    CHECK(rep.range_g_in_s_residual <= 1e-9);

    PartialMetric e1 = euclidean_metric(DomainDescriptor::real_interval(0, 1, 101));
    CHECK(check_dominated_dominating(e1, identity_quartet(), e1.domain).passed());

    MapQuartet shifted = identity_quartet();
    shifted.name = "shift-up";
    shifted.f = [](const Point& x) { return point1(std::min(x[0] + 0.1, 1.0)); };
    HypothesisReport bad = check_dominated_dominating(e1, shifted, e1.domain);
    CHECK_FALSE(bad.passed());
    // x + 0.1 exceeds x away from the clamp, so nearly every grid point fails
    CHECK(bad.f_dominated_failures >= 90);
}

TEST_CASE("contractive inequality on selected pairs") {
    PartialMetric m = mixed2();
    MapQuartet q = example22_quartet(2.0);
    ControlPair cp = example22_pair();

    ContractionReport rep = verify_contraction(
        m, q, cp, {{point1(0.0), point1(0.2)}, {point1(0.0), point1(2.0)}});
    CHECK(rep.n_violations == 0);
    CHECK(rep.n_pairs == 2);
    CHECK(rep.worst_slack >= 0.0);

    ContractionReport wide = verify_contraction(m, q, cp, {{point1(0.0), point1(2.0)}});
    // paper case with psi(1/3) = 1 against psi(2) - phi(2) = 17/9
    CHECK(wide.worst_slack == doctest::Approx(8.0 / 9.0).epsilon(1e-12));
}

TEST_CASE("full grid sweep is violation-free at k = 2") {
    PartialMetric m = mixed2();
    ContractionReport rep =
        verify_contraction_grid(m, example22_quartet(2.0), example22_pair(), m.domain);
    CHECK(rep.n_pairs == 2001L * 2001L);
    CHECK(rep.n_skipped_non_comparable == 0);
    CHECK(rep.n_violations == 0);
    CHECK(rep.worst_slack >= -1e-10);
}

TEST_CASE("k = 0.9 exhibits the admissibility gap") {
    PartialMetric m = mixed_metric(0.9, 1001);
    ContractionReport rep =
        verify_contraction_grid(m, example22_quartet(0.9), example22_pair(), m.domain);
    CHECK(rep.n_violations > 0);
    CHECK(rep.worst_slack < -1e-10);
    CHECK(!rep.samples.empty());
}

TEST_CASE("non-comparable pairs are skipped, not failed") {
    PartialMetric e2 = euclidean_metric(DomainDescriptor::planar_box(0, 1, 3));
    MapQuartet id = identity_quartet();
    ContractionReport rep = verify_contraction(e2, id, linear_pair(0.5),
                                               {{point2(0, 1), point2(1, 0)}});
    CHECK(rep.n_skipped_non_comparable == 1);
    CHECK(rep.n_violations == 0);
}

TEST_CASE("iteration reaches the common fixed point") {
    PartialMetric m = mixed2();
    MapQuartet q = example22_quartet(2.0);
    ControlPair cp = example22_pair();

    IterationTrace tr = iterate(m, q, cp, point1(2.0));
    CHECK(tr.status == IterationStatus::Converged);
    CHECK(tr.limit[0] == 0.0);
    CHECK(tr.residual_f == 0.0);
    CHECK(tr.residual_g == 0.0);
    CHECK(tr.residual_s == 0.0);
    CHECK(tr.residual_t == 0.0);
    CHECK(tr.self_distance == 0.0);

    IterationOptions tight;
    tight.tol = 1e-12;
    IterationTrace tr2 = iterate(m, q, cp, point1(1.0 / 3.0), tight);
    CHECK(tr2.status == IterationStatus::Converged);
    REQUIRE(tr2.ys.size() >= 2);
    CHECK(tr2.ys[1][0] == doctest::Approx(1.0 / 18.0).epsilon(1e-15));  // f(1/3)
    CHECK(tr2.ys.size() <= 50);
    CHECK(std::abs(tr2.limit[0]) <= 1e-12);
}

TEST_CASE("identity quartet is fixed immediately") {
    PartialMetric e1 = euclidean_metric(DomainDescriptor::real_interval(0, 1, 11));
    IterationTrace tr = iterate(e1, identity_quartet(), linear_pair(0.5), point1(0.37));
    CHECK(tr.status == IterationStatus::Converged);
    CHECK(tr.limit[0] == 0.37);
    CHECK(tr.ys.size() <= 4);  // window-many zero steps
}

TEST_CASE("monotone descent and limit consistency along converged traces") {
    PartialMetric m = mixed2();
    MapQuartet q = example22_quartet(2.0);
    ControlPair cp = example22_pair();
    for (double seed : {2.0, 1.7, 0.9, 0.5, 1.0 / 3.0, 0.21}) {
        IterationTrace tr = iterate(m, q, cp, point1(seed));
        REQUIRE(tr.status == IterationStatus::Converged);
        for (std::size_t i = 2; i < tr.p_steps.size(); ++i) {
            CHECK(tr.p_steps[i] <= tr.p_steps[i - 1] + 1e-12);
        }
        // trailing pairwise distances settle at the limit's self-distance
        std::size_t n = tr.ys.size();
        REQUIRE(n >= 3);
        for (std::size_t i = n - 3; i < n; ++i) {
            for (std::size_t j = i; j < n; ++j) {
                CHECK(std::abs(m.eval(tr.ys[i], tr.ys[j]) - tr.self_distance) <= 10 * 1e-10);
            }
        }
    }
}

TEST_CASE("preimage failure is detected at desk resolution") {
    PartialMetric e1 = euclidean_metric(DomainDescriptor::real_interval(0, 1, 11));
    MapQuartet q;
    q.name = "no-preimage";
    q.order = usual_leq();
    q.f = [](const Point& x) { return point1(x[0] / 3.0 + 0.015); };
    q.g = [](const Point& x) { return point1(x[0] / 2.0); };
    q.S = [](const Point& x) { return x; };
    q.T = [](const Point& x) { return point1(x[0] * x[0]); };
    q.preimage_S = [](const Point& y) { return y; };
    // no preimage_T: the target 0.015-ish value misses every squared grid point
    IterationTrace tr = iterate(e1, q, linear_pair(0.5), point1(0.9));
    CHECK(tr.status == IterationStatus::PreimageFailure);
}

TEST_CASE("order violations stop the iteration") {
    PartialMetric e1 = euclidean_metric(DomainDescriptor::real_interval(0, 1, 11));
    MapQuartet q = identity_quartet();
    q.f = [](const Point& x) { return point1(std::min(x[0] + 0.1, 1.0)); };
    IterationTrace tr = iterate(e1, q, linear_pair(0.5), point1(0.2));
    CHECK(tr.status == IterationStatus::HypothesisViolation);
}

TEST_CASE("uniqueness probing") {
    PartialMetric m = mixed2();
    MapQuartet q = example22_quartet(2.0);
    ControlPair cp = example22_pair();
    std::vector<Point> seeds;
    for (int i = 0; i < 10; ++i) seeds.push_back(point1(0.2 + 0.2 * i));
    UniquenessReport rep = probe_uniqueness(m, q, cp, seeds);
    REQUIRE(rep.limits.size() == 1);
    CHECK(rep.limits[0][0] == 0.0);
    CHECK(rep.all_limits_comparable);

    PartialMetric e1 = euclidean_metric(DomainDescriptor::real_interval(0, 1, 11));
    UniquenessReport id_rep = probe_uniqueness(e1, identity_quartet(), linear_pair(0.5),
                                               {point1(0.1), point1(0.9)});
    CHECK(id_rep.limits.size() == 2);
    CHECK(id_rep.all_limits_comparable);  // 0.1 and 0.9 are comparable on the line
}

TEST_CASE("trace CSV shape") {
    PartialMetric m = mixed2();
    IterationTrace tr = iterate(m, example22_quartet(2.0), example22_pair(), point1(2.0));
    std::ostringstream os;
    tr.write_csv(os);
    std::string text = os.str();
    CHECK(text.rfind("step,x,y,ps_step,mp,slack\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(tr.ys.size()) + 1);
}
