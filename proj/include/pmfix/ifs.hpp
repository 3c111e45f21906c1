#ifndef PMFIX_IFS_HPP
#define PMFIX_IFS_HPP

#include "pmfix/control.hpp"
#include "pmfix/hausdorff.hpp"
#include "pmfix/metric.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace pmfix {

struct AffineMap {
    Eigen::MatrixXd linear;
    Eigen::VectorXd offset;

    Point apply(const Point& x) const { return linear * x + offset; }
    Eigen::MatrixXd apply_columns(const Eigen::MatrixXd& pts) const {
        return (linear * pts).colwise() + offset;
    }
};

enum class ContractionFamily { PsiPhi, PlainContraction, ExpF, QuadraticF, SqrtF };

const char* to_string(ContractionFamily f);
ContractionFamily family_from_string(const std::string& s);

struct IfsSystem {
    std::string name;
    std::vector<AffineMap> maps;
    PartialMetric metric;
    ControlPair control;
    ContractionFamily family = ContractionFamily::PsiPhi;
    double family_param = 0.0;  // contraction factor k, or tau for the F-families
};

/// Throws if the system is structurally inadmissible (no maps, bad family
/// parameter, or an affine map that leaves the metric's bounding box).
void validate_ifs(const IfsSystem& sys);

/// One application of the union operator: image of every point under every
/// map, then a greedy in-order merge dropping points within induced-metric
/// distance merge_radius of an already kept one (0 = exact duplicates only).
FiniteSet hutchinson(const IfsSystem& sys, const FiniteSet& A, double merge_radius);

struct AttractorOptions {
    double tol = 1e-4;
    long max_iters = 60;
    double merge_radius = -1.0;  // negative: default tol/10
};

enum class AttractorStatus { Converged, MaxIters };

struct AttractorRun {
    FiniteSet prev;   // A_m at stopping time
    FiniteSet final;  // A_{m+1}, the attractor estimate
    std::vector<double> hp_steps;
    AttractorStatus status = AttractorStatus::MaxIters;
    double merge_radius = 0.0;
};

AttractorRun iterate_attractor(const IfsSystem& sys, const FiniteSet& A0,
                               const AttractorOptions& opts = {});

/// Seven-term generalized set distance of the attractor theorem; the union
/// operator and its square are evaluated with merge radius 0.
double compute_MT(const IfsSystem& sys, const FiniteSet& A, const FiniteSet& B);

struct IfsContractionReport {
    long n_pairs = 0;
    long n_violations = 0;
    double worst_slack = 0.0;

    nlohmann::json to_json() const;
};

IfsContractionReport verify_ifs_contraction(
    const IfsSystem& sys, const std::vector<std::pair<FiniteSet, FiniteSet>>& pairs);

enum class FamilyDistance { InducedPs, Partial };

struct FamilyReport {
    std::string family;
    long n_pairs = 0;
    long n_skipped = 0;  // pairs with equal images where the family requires otherwise
    std::vector<long> violations_per_map;
    double worst_slack = 0.0;

    long total_violations() const;
    nlohmann::json to_json() const;
};

/// Evaluates the family's defining inequality per map on the given point
/// pairs, using the induced metric as the distance by default.
FamilyReport check_family(const IfsSystem& sys, const std::vector<std::pair<Point, Point>>& pairs,
                          FamilyDistance dist = FamilyDistance::InducedPs);

struct RasterSpec {
    int width = 512, height = 512;
    double xmin = 0.0, ymin = 0.0, xmax = 1.0, ymax = 1.0;
};

struct Image {
    int width = 0, height = 0;
    std::vector<unsigned char> rgb;  // row-major, 3 bytes per pixel

    long lit_pixels() const;
    void write_ppm(std::ostream& os) const;
};

Image render_attractor(const AttractorRun& run, const RasterSpec& raster);
Image render_points(const FiniteSet& set, const RasterSpec& raster);

IfsSystem sierpinski_system();
IfsSystem dyadic_system();

}  // namespace pmfix

#endif
