#include "pmfix/metric.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pmfix {

namespace {

bool finite_point(const Point& p) {
    for (int i = 0; i < p.size(); ++i) {
        if (!std::isfinite(p[i])) return false;
    }
    return true;
}

bool same_point(const Point& a, const Point& b) {
    return a.size() == b.size() && (a.array() == b.array()).all();
}

void require_in_domain(const DomainDescriptor& dom, const Point& p, const char* what) {
    if (p.size() != dom.dim || !finite_point(p) || !dom.contains(p)) {
        throw std::domain_error(std::string("domain-mismatch: ") + what +
                                " lies outside the metric domain");
    }
}

}  // namespace

bool DomainDescriptor::contains(const Point& p) const {
    if (p.size() != dim) return false;
    for (int i = 0; i < dim; ++i) {
        if (p[i] < lo[i] || p[i] > hi[i]) return false;
    }
    if (kind == DomainKind::IntervalPairs && p[0] > p[1]) return false;
    return true;
}

DomainDescriptor DomainDescriptor::real_interval(double lo, double hi, int n) {
    if (n < 1 || !(lo <= hi)) throw std::invalid_argument("real_interval: bad bounds or size");
    DomainDescriptor d;
    d.kind = DomainKind::RealInterval;
    d.dim = 1;
    d.lo = Eigen::VectorXd::Constant(1, lo);
    d.hi = Eigen::VectorXd::Constant(1, hi);
    d.sample_grid.reserve(n);
    for (int i = 0; i < n; ++i) {
        double t = (n == 1) ? lo : lo + (hi - lo) * static_cast<double>(i) / (n - 1);
        d.sample_grid.push_back(point1(t));
    }
    return d;
}

DomainDescriptor DomainDescriptor::planar_box(double lo, double hi, int n_per_axis) {
    DomainDescriptor d;
    d.kind = DomainKind::RealInterval;
    d.dim = 2;
    d.lo = Eigen::VectorXd::Constant(2, lo);
    d.hi = Eigen::VectorXd::Constant(2, hi);
    d.sample_grid.reserve(static_cast<std::size_t>(n_per_axis) * n_per_axis);
    for (int i = 0; i < n_per_axis; ++i) {
        for (int j = 0; j < n_per_axis; ++j) {
            double x = (n_per_axis == 1) ? lo : lo + (hi - lo) * i / (n_per_axis - 1.0);
            double y = (n_per_axis == 1) ? lo : lo + (hi - lo) * j / (n_per_axis - 1.0);
            d.sample_grid.push_back(point2(x, y));
        }
    }
    return d;
}

DomainDescriptor DomainDescriptor::nonneg_reals(double grid_hi, int n) {
    DomainDescriptor d = real_interval(0.0, grid_hi, n);
    d.kind = DomainKind::NonnegReals;
    d.hi = Eigen::VectorXd::Constant(1, std::numeric_limits<double>::infinity());
    return d;
}

DomainDescriptor DomainDescriptor::interval_pairs(double lo, double hi, int base_n) {
    DomainDescriptor d;
    d.kind = DomainKind::IntervalPairs;
    d.dim = 2;
    d.lo = Eigen::VectorXd::Constant(2, lo);
    d.hi = Eigen::VectorXd::Constant(2, hi);
    for (int i = 0; i < base_n; ++i) {
        double a = lo + (hi - lo) * i / (base_n - 1.0);
        for (int j = i; j < base_n; ++j) {
            double b = lo + (hi - lo) * j / (base_n - 1.0);
            d.sample_grid.push_back(point2(a, b));
        }
    }
    return d;
}

DomainDescriptor DomainDescriptor::grid_functions(int nodes, int n_samples, double value_hi,
                                                  std::uint64_t seed) {
    DomainDescriptor d;
    d.kind = DomainKind::GridFunctions;
    d.dim = nodes;
    d.lo = Eigen::VectorXd::Zero(nodes);
    d.hi = Eigen::VectorXd::Constant(nodes, std::numeric_limits<double>::infinity());
    IndexSampler rng(seed);
    d.sample_grid.reserve(n_samples);
    for (int s = 0; s < n_samples; ++s) {
        Point f(nodes);
        for (int i = 0; i < nodes; ++i) f[i] = value_hi * rng.next_unit();
        d.sample_grid.push_back(std::move(f));
    }
    return d;
}

double eval_p(const PartialMetric& m, const Point& x, const Point& y) {
    require_in_domain(m.domain, x, "x");
    require_in_domain(m.domain, y, "y");
    return m.eval(x, y);
}

double induced_ps(const PartialMetric& m, const Point& x, const Point& y) {
    require_in_domain(m.domain, x, "x");
    require_in_domain(m.domain, y, "y");
    return 2.0 * m.eval(x, y) - m.eval(x, x) - m.eval(y, y);
}

bool ball_membership(const PartialMetric& m, const Point& center, double eps, const Point& y) {
    if (!(eps > 0.0)) throw std::invalid_argument("ball_membership: eps must be positive");
    require_in_domain(m.domain, center, "center");
    require_in_domain(m.domain, y, "y");
    return m.eval(center, y) < m.eval(center, center) + eps;
}

nlohmann::json point_to_json(const Point& p) {
    nlohmann::json arr = nlohmann::json::array();
    for (int i = 0; i < p.size(); ++i) arr.push_back(p[i]);
    return arr;
}

nlohmann::json AxiomReport::to_json() const {
    return nlohmann::json{
        {"metric", metric},
        {"n_triples", n_triples},
        {"seed", seed},
        {"violations",
         {{"p1", violations.p1},
          {"p2", violations.p2},
          {"p3", violations.p3},
          {"p4", violations.p4},
          {"ps_triangle", violations.ps_triangle}}},
        {"worst",
         {{"x", point_to_json(worst_x)},
          {"y", point_to_json(worst_y)},
          {"z", point_to_json(worst_z)},
          {"slack", worst_slack}}},
    };
}

AxiomReport check_axioms(const PartialMetric& m, const DomainDescriptor& dom, long n_triples,
                         std::uint64_t seed) {
    if (n_triples < 1) throw std::invalid_argument("check_axioms: n_triples must be >= 1");
    if (dom.sample_grid.empty()) throw std::invalid_argument("check_axioms: empty sample grid");

    AxiomReport rep;
    rep.metric = m.name;
    rep.n_triples = n_triples;
    rep.seed = seed;
    rep.worst_slack = std::numeric_limits<double>::infinity();

    IndexSampler rng(seed);
    const std::size_t g = dom.sample_grid.size();
    const auto& e = m.eval;

    auto consider = [&](double margin, const Point& x, const Point& y, const Point& z) {
        if (margin < rep.worst_slack) {
            rep.worst_slack = margin;
            rep.worst_x = x;
            rep.worst_y = y;
            rep.worst_z = z;
        }
    };

    for (long t = 0; t < n_triples; ++t) {
        std::size_t ix = rng.next(g), iy = rng.next(g), iz = rng.next(g);
        const Point& x = dom.sample_grid[ix];
        const Point& y = dom.sample_grid[iy];
        const Point& z = dom.sample_grid[iz];

        const double pxx = e(x, x), pyy = e(y, y), pzz = e(z, z);
        const double pxy = e(x, y), pyx = e(y, x);
        const double pyz = e(y, z), pzy = e(z, y);
        const double pxz = e(x, z), pzx = e(z, x);

        // Pairwise checks on the three pairs of the triple.
        struct PairView {
            const Point *a, *b;
            double paa, pbb, pab, pba;
        };
        const PairView pairs[3] = {
            {&x, &y, pxx, pyy, pxy, pyx},
            {&y, &z, pyy, pzz, pyz, pzy},
            {&x, &z, pxx, pzz, pxz, pzx},
        };
        for (const auto& pv : pairs) {
            // P1 forward: equal distances force equal points.
            if (pv.paa == pv.pbb && pv.pbb == pv.pab && !same_point(*pv.a, *pv.b)) {
                rep.violations.p1++;
                consider(-1.0, *pv.a, *pv.b, z);
            }
            // P2: small self-distance, both orientations.
            double m2 = std::min(pv.pab - pv.paa, pv.pab - pv.pbb);
            if (m2 < 0.0) rep.violations.p2++;
            consider(m2, *pv.a, *pv.b, z);
            // P3: symmetry.
            double m3 = kTolSym - std::abs(pv.pab - pv.pba);
            if (m3 < 0.0) rep.violations.p3++;
            consider(m3, *pv.a, *pv.b, z);
        }

        // P4: modified triangle inequality through y.
        double m4 = (pxy + pyz - pyy) - pxz + kTolTri;
        if (m4 < 0.0) rep.violations.p4++;
        consider(m4, x, y, z);

        // Induced-metric triangle inequality on the same triple.
        const double sxy = 2.0 * pxy - pxx - pyy;
        const double syz = 2.0 * pyz - pyy - pzz;
        const double sxz = 2.0 * pxz - pxx - pzz;
        double ms = (sxy + syz) - sxz + kTolTri;
        if (ms < 0.0) rep.violations.ps_triangle++;
        consider(ms, x, y, z);
    }
    return rep;
}

PartialMetric max_metric(double grid_hi, int grid_n) {
    PartialMetric m;
    m.name = "max_metric";
    m.domain = DomainDescriptor::nonneg_reals(grid_hi, grid_n);
    m.structure = MetricStructure::MaxCoord;
    m.eval = [](const Point& x, const Point& y) { return std::max(x[0], y[0]); };
    return m;
}

PartialMetric interval_metric(double lo, double hi, int base_n) {
    PartialMetric m;
    m.name = "interval_metric";
    m.domain = DomainDescriptor::interval_pairs(lo, hi, base_n);
    m.eval = [](const Point& x, const Point& y) {
        return std::max(x[1], y[1]) - std::min(x[0], y[0]);
    };
    return m;
}

PartialMetric mixed_metric(double k, int grid_n) {
    if (!(k > 0.0)) throw std::invalid_argument("mixed_metric: k must be positive");
    PartialMetric m;
    m.name = "mixed_metric";
    m.domain = DomainDescriptor::real_interval(0.0, k, grid_n);
    m.eval = [](const Point& x, const Point& y) {
        if (x[0] < 1.0 && y[0] < 1.0) return std::abs(x[0] - y[0]);
        return std::max(x[0], y[0]);
    };
    return m;
}

PartialMetric sup_pair_metric(int nodes, int n_samples, double value_hi, std::uint64_t seed) {
    PartialMetric m;
    m.name = "sup_pair_metric";
    m.domain = DomainDescriptor::grid_functions(nodes, n_samples, value_hi, seed);
    m.eval = [](const Point& x, const Point& y) {
        return std::max(x.maxCoeff(), y.maxCoeff());
    };
    return m;
}

PartialMetric euclidean_metric(DomainDescriptor domain) {
    PartialMetric m;
    m.name = "euclidean";
    m.domain = std::move(domain);
    m.structure = MetricStructure::Euclidean;
    m.eval = [](const Point& x, const Point& y) { return std::sqrt((x - y).squaredNorm()); };
    return m;
}

}  // namespace pmfix
