#ifndef PMFIX_FIXED_POINT_HPP
#define PMFIX_FIXED_POINT_HPP

#include "pmfix/control.hpp"
#include "pmfix/metric.hpp"

#include <json.hpp>

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pmfix {

using PointMap = std::function<Point(const Point&)>;

struct OrderPredicate {
    std::string name;
    std::function<bool(const Point&, const Point&)> leq;
};

/// Componentwise <= (the usual order in one dimension, pointwise on grids).
OrderPredicate usual_leq();

/// Self maps f, g (dominated side) and S, T (dominating side), with exact
/// preimage oracles where available. A null oracle falls back to grid argmin.
struct MapQuartet {
    std::string name;
    PointMap f, g, S, T;
    PointMap preimage_S, preimage_T;
    OrderPredicate order;
};

/// Piecewise-affine map on the line: first matching piece wins.
struct AffinePiece {
    double lo = 0.0, hi = 0.0;
    bool include_lo = true, include_hi = true;
    double c0 = 0.0, c1 = 0.0;  // x -> c0 + c1*x
};

struct PiecewiseMap1D {
    std::vector<AffinePiece> pieces;
    double operator()(double x) const;
};

PointMap make_piecewise(PiecewiseMap1D pm);

double compute_Mp(const PartialMetric& m, const MapQuartet& q, const Point& x, const Point& y);

struct HypothesisReport {
    std::string quartet;
    long grid_size = 0;
    long f_dominated_failures = 0;
    long g_dominated_failures = 0;
    long s_dominating_failures = 0;
    long t_dominating_failures = 0;
    double range_f_in_t_residual = 0.0;
    double range_g_in_s_residual = 0.0;
    bool range_via_oracle = false;
    double tol_pre = 0.0;

    bool passed() const {
        return f_dominated_failures == 0 && g_dominated_failures == 0 &&
               s_dominating_failures == 0 && t_dominating_failures == 0 &&
               range_f_in_t_residual <= tol_pre && range_g_in_s_residual <= tol_pre;
    }
    nlohmann::json to_json() const;
};

HypothesisReport check_dominated_dominating(const PartialMetric& m, const MapQuartet& q,
                                            const DomainDescriptor& grid, double tol_pre = 1e-9);

struct ViolationSample {
    Point x, y;
    double lhs = 0.0, rhs = 0.0, mp = 0.0, slack = 0.0;
};

struct ContractionReport {
    long n_pairs = 0;
    long n_skipped_non_comparable = 0;
    long n_violations = 0;
    double worst_slack = 0.0;
    Point worst_x, worst_y;
    std::vector<ViolationSample> samples;  // first violations in enumeration order
    bool samples_truncated = false;

    nlohmann::json to_json() const;
};

inline constexpr double kTolSlack = 1e-10;
inline constexpr std::size_t kMaxViolationSamples = 100;

ContractionReport verify_contraction(const PartialMetric& m, const MapQuartet& q,
                                     const ControlPair& cp,
                                     const std::vector<std::pair<Point, Point>>& pairs);

/// Sweeps every ordered pair of grid points (comparable ones are checked,
/// the rest counted as skipped).
ContractionReport verify_contraction_grid(const PartialMetric& m, const MapQuartet& q,
                                          const ControlPair& cp, const DomainDescriptor& grid);

struct IterationOptions {
    double tol = 1e-10;
    long max_iters = 100000;
    int window = 3;
    double tol_pre = 1e-9;
};

enum class IterationStatus { Converged, MaxIters, HypothesisViolation, PreimageFailure };

const char* to_string(IterationStatus s);

struct IterationTrace {
    std::vector<Point> xs;         // x_0, x_1, ...
    std::vector<Point> ys;         // ys[0] == x_0 for alignment, then y_1, y_2, ...
    std::vector<double> ps_steps;  // induced-metric step p^S(y_n, y_{n+1})
    std::vector<double> p_steps;   // raw partial-metric step p(y_n, y_{n+1})
    std::vector<double> mp_values;
    std::vector<double> slacks;
    IterationStatus status = IterationStatus::MaxIters;
    Point limit;
    double residual_f = 0.0, residual_g = 0.0, residual_s = 0.0, residual_t = 0.0;
    double self_distance = 0.0;
    std::string message;

    void write_csv(std::ostream& os) const;
};

/// Alternates y_{2n+1} = f x_{2n}, T x_{2n+1} = y_{2n+1}, y_{2n+2} = g x_{2n+1},
/// S x_{2n+2} = y_{2n+2}, resolving preimages through the oracles or a grid
/// argmin, until `window` consecutive induced-metric steps fall below tol.
IterationTrace iterate(const PartialMetric& m, const MapQuartet& q, const ControlPair& cp,
                       const Point& x0, const IterationOptions& opts = {});

struct UniquenessReport {
    std::vector<Point> limits;  // distinct under p^S > tol
    std::vector<IterationStatus> seed_status;
    bool all_limits_comparable = true;

    nlohmann::json to_json() const;
};

UniquenessReport probe_uniqueness(const PartialMetric& m, const MapQuartet& q,
                                  const ControlPair& cp, const std::vector<Point>& seeds,
                                  const IterationOptions& opts = {});

MapQuartet example22_quartet(double k);
MapQuartet identity_quartet();

}  // namespace pmfix

#endif
