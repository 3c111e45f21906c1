#ifndef PMFIX_HAUSDORFF_HPP
#define PMFIX_HAUSDORFF_HPP

#include "pmfix/metric.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace pmfix {

/// Finite point cloud standing in for a compact set. Columns of the backing
/// matrix are points; exact duplicates are removed on construction, keeping
/// the first occurrence (enumeration order is column order).
class FiniteSet {
public:
    explicit FiniteSet(Eigen::MatrixXd columns);
    static FiniteSet from_points(const std::vector<Point>& pts);
    static FiniteSet from_coords(const std::vector<double>& coords);  // d = 1

    int size() const { return static_cast<int>(pts_.cols()); }
    int dim() const { return static_cast<int>(pts_.rows()); }
    const Eigen::MatrixXd& matrix() const { return pts_; }
    Point point(int i) const { return pts_.col(i); }

    struct AlreadyUnique {};
    FiniteSet(Eigen::MatrixXd columns, AlreadyUnique);

private:
    Eigen::MatrixXd pts_;
};

double point_to_set(const PartialMetric& m, const Point& x, const FiniteSet& A);
double delta_p(const PartialMetric& m, const FiniteSet& A, const FiniteSet& B);
double h_p(const PartialMetric& m, const FiniteSet& A, const FiniteSet& B);

struct HausdorffReport {
    std::string metric;
    int n_sets = 0;
    long p42_i = 0, p42_ii = 0, p42_iii = 0, p42_iv = 0;
    long p43_1 = 0, p43_2 = 0, p43_3 = 0, p43_4 = 0;
    double worst_slack = 0.0;
    int worst_i = -1, worst_j = -1, worst_k = -1;

    long total() const { return p42_i + p42_ii + p42_iii + p42_iv + p43_1 + p43_2 + p43_3 + p43_4; }
    nlohmann::json to_json() const;
};

/// Checks the directed-distance and partial-Hausdorff properties over all
/// ordered pairs and triples drawn from `sets`.
HausdorffReport check_hausdorff_props(const PartialMetric& m, const std::vector<FiniteSet>& sets);

void save_cloud_csv(std::ostream& os, const FiniteSet& set);
FiniteSet load_cloud_csv(std::istream& is);

/// Seeded random subsets of a sample grid (sizes drawn uniformly from
/// [min_size, max_size]; duplicate picks collapse).
std::vector<FiniteSet> random_subsets(const DomainDescriptor& grid, int n_sets, int min_size,
                                      int max_size, std::uint64_t seed);

}  // namespace pmfix

#endif
