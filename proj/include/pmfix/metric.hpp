#ifndef PMFIX_METRIC_HPP
#define PMFIX_METRIC_HPP

#include "pmfix/common.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace pmfix {

enum class DomainKind { RealInterval, NonnegReals, IntervalPairs, GridFunctions };

/// Finite stand-in for a carrier set: box bounds plus a sample grid whose
/// index order is the enumeration order used everywhere for tie-breaking.
struct DomainDescriptor {
    DomainKind kind = DomainKind::RealInterval;
    int dim = 1;
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;
    std::vector<Point> sample_grid;

    bool contains(const Point& p) const;

    static DomainDescriptor real_interval(double lo, double hi, int n);
    static DomainDescriptor planar_box(double lo, double hi, int n_per_axis);
    static DomainDescriptor nonneg_reals(double grid_hi, int n);
    static DomainDescriptor interval_pairs(double lo, double hi, int base_n);
    static DomainDescriptor grid_functions(int nodes, int n_samples, double value_hi,
                                           std::uint64_t seed);
};

/// Structural hints that enable exact fast paths; results never depend on
/// them (pruned evaluations must match the brute-force scan bitwise).
enum class MetricStructure { Generic, Euclidean, MaxCoord };

struct PartialMetric {
    std::string name;
    std::function<double(const Point&, const Point&)> eval;
    DomainDescriptor domain;
    MetricStructure structure = MetricStructure::Generic;
};

double eval_p(const PartialMetric& m, const Point& x, const Point& y);
double induced_ps(const PartialMetric& m, const Point& x, const Point& y);
bool ball_membership(const PartialMetric& m, const Point& center, double eps, const Point& y);

struct AxiomViolations {
    long p1 = 0;
    long p2 = 0;
    long p3 = 0;
    long p4 = 0;
    long ps_triangle = 0;
    long total() const { return p1 + p2 + p3 + p4 + ps_triangle; }
};

struct AxiomReport {
    std::string metric;
    long n_triples = 0;
    std::uint64_t seed = 0;
    AxiomViolations violations;
    // Triple with the smallest margin seen (negative margin == violation).
    Point worst_x, worst_y, worst_z;
    double worst_slack = 0.0;

    nlohmann::json to_json() const;
};

/// Samples n_triples (x, y, z) triples from dom.sample_grid with a seeded
/// generator and counts violations of the four partial-metric axioms plus
/// the triangle inequality of the induced metric.
AxiomReport check_axioms(const PartialMetric& m, const DomainDescriptor& dom, long n_triples,
                         std::uint64_t seed);

// Bundled metrics. Each carries its default verification domain.
PartialMetric max_metric(double grid_hi = 10.0, int grid_n = 2001);
PartialMetric interval_metric(double lo = 0.0, double hi = 5.0, int base_n = 60);
PartialMetric mixed_metric(double k, int grid_n = 2001);
PartialMetric sup_pair_metric(int nodes = 21, int n_samples = 64, double value_hi = 2.0,
                              std::uint64_t seed = 2024);
PartialMetric euclidean_metric(DomainDescriptor domain);

nlohmann::json point_to_json(const Point& p);

inline constexpr double kTolSym = 1e-12;
inline constexpr double kTolTri = 1e-10;

}  // namespace pmfix

#endif
