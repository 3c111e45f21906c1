#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pmfix/ifs.hpp"

#include <cmath>
#include <sstream>

using namespace pmfix;

namespace {

IfsSystem single_map_system(double scale, double offset, ContractionFamily family,
                            double param, double lo = -10.0, double hi = 10.0) {
    IfsSystem sys;
    sys.name = "single";
    Eigen::MatrixXd linear = scale * Eigen::MatrixXd::Identity(1, 1);
    sys.maps.push_back({linear, point1(offset)});
    sys.metric = euclidean_metric(DomainDescriptor::real_interval(lo, hi, 201));
    sys.control = linear_pair(0.5);
    sys.family = family;
    sys.family_param = param;
    return sys;
}

// scalar transcription of the one-map seven-term distance
double scalar_mp(const PartialMetric& m, const AffineMap& f, const Point& x, const Point& y) {
    const Point fx = f.apply(x), fy = f.apply(y), f2x = f.apply(fx);
    return std::max({m.eval(x, y), m.eval(x, fx), m.eval(y, fy), m.eval(f2x, y),
                     m.eval(f2x, fx), m.eval(f2x, fy),
                     (m.eval(x, fy) + m.eval(y, fx)) / 2.0});
}

}  // namespace

TEST_CASE("one union step") {
    IfsSystem sys = sierpinski_system();
    FiniteSet seed = FiniteSet::from_points({point2(0, 0)});
    FiniteSet step = hutchinson(sys, seed, 0.0);
    CHECK(step.size() == 3);

    IfsSystem halving = single_map_system(0.5, 0.0, ContractionFamily::PlainContraction, 0.5);
    FiniteSet one = hutchinson(halving, FiniteSet::from_coords({1.0}), 0.0);
    REQUIRE(one.size() == 1);
    CHECK(one.point(0)[0] == 0.5);

    // duplicated maps collapse to the single-map image
    IfsSystem duplicated = halving;
    duplicated.maps.push_back(duplicated.maps[0]);
    FiniteSet dup = hutchinson(duplicated, FiniteSet::from_coords({1.0, 0.25}), 0.0);
    FiniteSet single = hutchinson(halving, FiniteSet::from_coords({1.0, 0.25}), 0.0);
    CHECK(dup.size() == single.size());
}

TEST_CASE("greedy merge: indexed path matches the plain scan") {
    IfsSystem sys = sierpinski_system();
    IfsSystem generic = sys;
    generic.metric.structure = MetricStructure::Generic;  // force the O(n^2) scan
    IndexSampler rng(404);
    std::vector<Point> pts;
    for (int i = 0; i < 400; ++i) pts.push_back(point2(rng.next_unit(), 0.8 * rng.next_unit()));
    FiniteSet A = FiniteSet::from_points(pts);
    for (double radius : {0.0, 1e-4, 1e-2, 0.1}) {
        FiniteSet fast = hutchinson(sys, A, radius);
        FiniteSet slow = hutchinson(generic, A, radius);
        REQUIRE(fast.size() == slow.size());
        CHECK((fast.matrix().array() == slow.matrix().array()).all());
    }
}

TEST_CASE("attractor iteration on the dyadic system reproduces the dyadic grid") {
    IfsSystem sys = dyadic_system();
    FiniteSet cur = FiniteSet::from_coords({0.0});
    for (int depth = 1; depth <= 8; ++depth) {
        cur = hutchinson(sys, cur, 0.0);
        // exact enumeration oracle: all multiples j * 2^-depth below 1
        std::vector<double> expected;
        for (long j = 0; j < (1L << depth); ++j) expected.push_back(std::ldexp(double(j), -depth));
        FiniteSet ref = FiniteSet::from_coords(expected);
        REQUIRE(cur.size() == ref.size());
        CHECK(h_p(sys.metric, cur, ref) == 0.0);
    }
}

TEST_CASE("attractor run: convergence, decay, residual, seed independence") {
    IfsSystem sys = dyadic_system();
    AttractorOptions opts;
    opts.tol = 1e-3;
    AttractorRun run = iterate_attractor(sys, FiniteSet::from_coords({0.0}), opts);
    CHECK(run.status == AttractorStatus::Converged);
    REQUIRE(run.hp_steps.size() >= 3);
    for (std::size_t i = 2; i < run.hp_steps.size(); ++i) {
        CHECK(run.hp_steps[i] <= 0.5 * run.hp_steps[i - 1] + 1e-10);
    }
    CHECK(run.hp_steps.back() <= opts.tol);

    FiniteSet next = hutchinson(sys, run.final, run.merge_radius);
    CHECK(h_p(sys.metric, run.final, next) <= 2 * opts.tol);

    AttractorRun other = iterate_attractor(sys, FiniteSet::from_coords({1.0}), opts);
    REQUIRE(other.status == AttractorStatus::Converged);
    CHECK(h_p(sys.metric, run.final, other.final) <= 10 * opts.tol);
}

TEST_CASE("a system fixing the seed converges in one step") {
    IfsSystem sys = single_map_system(1.0, 0.0, ContractionFamily::PsiPhi, 0.0);
    AttractorOptions opts;
    opts.tol = 1e-12;
    AttractorRun run = iterate_attractor(sys, FiniteSet::from_coords({0.25, 0.75}), opts);
    CHECK(run.status == AttractorStatus::Converged);
    CHECK(run.hp_steps.size() == 1);
    CHECK(run.hp_steps[0] == 0.0);
}

TEST_CASE("seven-term set distance") {
    IfsSystem fixing = single_map_system(1.0, 0.0, ContractionFamily::PsiPhi, 0.0);
    FiniteSet U = FiniteSet::from_coords({0.1, 0.4});
    CHECK(compute_MT(fixing, U, U) == 0.0);

    // singleton pairs reduce to the scalar formula, bitwise
    IfsSystem halving = single_map_system(0.5, 0.125, ContractionFamily::PlainContraction, 0.5);
    IndexSampler rng(8);
    for (int t = 0; t < 100; ++t) {
        Point a = point1(rng.next_unit()), b = point1(rng.next_unit());
        double via_sets = compute_MT(halving, FiniteSet::from_points({a}),
                                     FiniteSet::from_points({b}));
        CHECK(via_sets == scalar_mp(halving.metric, halving.maps[0], a, b));
    }

    // independent recomputation of all seven terms on small gasket slices
    IfsSystem sys = sierpinski_system();
    FiniteSet A = FiniteSet::from_points({point2(0, 0)});
    for (int i = 0; i < 5; ++i) A = hutchinson(sys, A, 0.0);
    FiniteSet B = hutchinson(sys, A, 0.0);
    FiniteSet TA = hutchinson(sys, A, 0.0), TB = hutchinson(sys, B, 0.0);
    FiniteSet T2A = hutchinson(sys, TA, 0.0);
    const auto& m = sys.metric;
    double expected = std::max({h_p(m, A, B), h_p(m, A, TA), h_p(m, B, TB), h_p(m, T2A, TA),
                                h_p(m, T2A, B), h_p(m, T2A, TB),
                                (h_p(m, A, TB) + h_p(m, B, TA)) / 2.0});
    CHECK(compute_MT(sys, A, B) == expected);
}

TEST_CASE("set-level contraction verification") {
    IfsSystem sys = dyadic_system();
    IndexSampler rng(21);
    std::vector<std::pair<FiniteSet, FiniteSet>> pairs;
    for (int t = 0; t < 25; ++t) {
        std::vector<double> as, bs;
        for (int i = 0; i <= static_cast<int>(rng.next(8)); ++i) as.push_back(rng.next_unit());
        for (int i = 0; i <= static_cast<int>(rng.next(8)); ++i) bs.push_back(rng.next_unit());
        pairs.emplace_back(FiniteSet::from_coords(as), FiniteSet::from_coords(bs));
    }
    IfsContractionReport rep = verify_ifs_contraction(sys, pairs);
    CHECK(rep.n_violations == 0);
    CHECK(rep.worst_slack >= 0.0);

    IfsSystem fixing = single_map_system(1.0, 0.0, ContractionFamily::PsiPhi, 0.0);
    FiniteSet U = FiniteSet::from_coords({0.3});
    IfsContractionReport still = verify_ifs_contraction(fixing, {{U, U}});
    CHECK(still.n_violations == 0);
    CHECK(still.worst_slack == 0.0);

    // a doubling map beats any discount the seven-term bound can give
    IfsSystem expanding = single_map_system(2.0, 0.0, ContractionFamily::PsiPhi, 0.0);
    IfsContractionReport bad = verify_ifs_contraction(
        expanding, {{FiniteSet::from_coords({0.0}), FiniteSet::from_coords({1.0})}});
    CHECK(bad.n_violations > 0);
}

TEST_CASE("contraction-family predicates") {
    IndexSampler rng(55);
    std::vector<std::pair<Point, Point>> pairs;
    for (int i = 0; i < 2000; ++i) pairs.emplace_back(point1(rng.next_unit()), point1(rng.next_unit()));

    IfsSystem plain = single_map_system(0.5, 0.0, ContractionFamily::PlainContraction, 0.6, 0, 1);
    CHECK(check_family(plain, pairs).total_violations() == 0);

    IfsSystem expf = single_map_system(0.5, 0.0, ContractionFamily::ExpF, std::log(2.0) / 2.0, 0, 1);
    CHECK(check_family(expf, pairs).total_violations() == 0);

    for (double tau : {0.1, 1.0, 10.0}) {
        IfsSystem ident = single_map_system(1.0, 0.0, ContractionFamily::SqrtF, tau, 0, 1);
        FamilyReport rep = check_family(ident, pairs);
        CHECK(rep.total_violations() >= 1);
        CHECK(rep.worst_slack < 0.0);
    }

    // psi-phi family: halving map against its own seven-term bound
    IfsSystem psiphi = single_map_system(0.5, 0.0, ContractionFamily::PsiPhi, 0.0, 0, 1);
    CHECK(check_family(psiphi, pairs).total_violations() == 0);

    // the F-family inequalities are conditional on distinct images
    IfsSystem collapse = single_map_system(0.0, 0.25, ContractionFamily::ExpF, 1.0, 0, 1);
    FamilyReport skipped = check_family(collapse, pairs);
    CHECK(skipped.n_skipped == static_cast<long>(pairs.size()));
    CHECK(skipped.total_violations() == 0);
}

TEST_CASE("rendering the gasket") {
    IfsSystem sys = sierpinski_system();
    FiniteSet A = FiniteSet::from_points({point2(0, 0)});
    for (int i = 0; i < 9; ++i) A = hutchinson(sys, A, 0.0);
    REQUIRE(A.size() == 19683);  // 3^9 distinct points

    RasterSpec raster;
    raster.width = 512;
    raster.height = 512;
    raster.xmin = 0.0;
    raster.xmax = 1.0;
    raster.ymin = 0.0;
    raster.ymax = std::sqrt(3.0) / 2.0;
    Image img = render_points(A, raster);
    CHECK(std::abs(img.lit_pixels() - 19683L) <= static_cast<long>(0.05 * 19683));

    Image dot = render_points(FiniteSet::from_points({point2(0.5, 0.5)}), raster);
    CHECK(dot.lit_pixels() == 1);

    RasterSpec degenerate = raster;
    degenerate.width = 0;
    CHECK_THROWS_AS(render_points(A, degenerate), std::invalid_argument);

    std::ostringstream os;
    img.write_ppm(os);
    const std::string ppm = os.str();
    CHECK(ppm.rfind("P6\n512 512\n255\n", 0) == 0);
    CHECK(ppm.size() == 15 + 512u * 512u * 3u);
}

TEST_CASE("system validation") {
    CHECK_THROWS_AS(validate_ifs(single_map_system(0.5, 0.0, ContractionFamily::PlainContraction, 1.2)),
                    std::invalid_argument);
    CHECK_THROWS_AS(validate_ifs(single_map_system(2.0, 0.0, ContractionFamily::PsiPhi, 0.0)),
                    std::invalid_argument);  // doubling leaves the box
    IfsSystem ok = sierpinski_system();
    CHECK_NOTHROW(validate_ifs(ok));
}
