#include "pmfix/ifs.hpp"

#include "cell_index.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace pmfix {

namespace {
constexpr double kTolSlackIfs = 1e-10;
}

const char* to_string(ContractionFamily f) {
    switch (f) {
        case ContractionFamily::PsiPhi: return "psi-phi";
        case ContractionFamily::PlainContraction: return "plain-contraction";
        case ContractionFamily::ExpF: return "exp-F";
        case ContractionFamily::QuadraticF: return "quadratic-F";
        case ContractionFamily::SqrtF: return "sqrt-F";
    }
    return "unknown";
}

ContractionFamily family_from_string(const std::string& s) {
    if (s == "psi-phi") return ContractionFamily::PsiPhi;
    if (s == "plain-contraction") return ContractionFamily::PlainContraction;
    if (s == "exp-F") return ContractionFamily::ExpF;
    if (s == "quadratic-F") return ContractionFamily::QuadraticF;
    if (s == "sqrt-F") return ContractionFamily::SqrtF;
    throw std::invalid_argument("unknown contraction family: " + s);
}

void validate_ifs(const IfsSystem& sys) {
    if (sys.maps.empty()) throw std::invalid_argument("ifs: need at least one map");
    const int d = sys.metric.domain.dim;
    for (const auto& map : sys.maps) {
        if (map.linear.rows() != d || map.linear.cols() != d || map.offset.size() != d) {
            throw std::invalid_argument("ifs: map dimensions do not match the metric domain");
        }
    }
    if (sys.family == ContractionFamily::PlainContraction &&
        !(sys.family_param > 0.0 && sys.family_param < 1.0)) {
        throw std::invalid_argument("ifs: plain-contraction needs 0 < k < 1");
    }
    if ((sys.family == ContractionFamily::ExpF || sys.family == ContractionFamily::QuadraticF ||
         sys.family == ContractionFamily::SqrtF) &&
        !(sys.family_param > 0.0)) {
        throw std::invalid_argument("ifs: F-families need tau > 0");
    }
    // Affine maps send a box into the convex hull of its corner images, so
    // corner containment certifies bound preservation.
    const auto& lo = sys.metric.domain.lo;
    const auto& hi = sys.metric.domain.hi;
    bool bounded = true;
    for (int i = 0; i < d; ++i) bounded = bounded && std::isfinite(lo[i]) && std::isfinite(hi[i]);
    if (!bounded || d > 20) return;
    for (const auto& map : sys.maps) {
        for (long corner = 0; corner < (1L << d); ++corner) {
            Point c(d);
            for (int i = 0; i < d; ++i) c[i] = (corner >> i) & 1 ? hi[i] : lo[i];
            if (!sys.metric.domain.contains(map.apply(c))) {
                throw std::invalid_argument("ifs: map leaves the metric domain bounds");
            }
        }
    }
}

namespace {

double ps_raw(const PartialMetric& m, const Point& a, const Point& b) {
    return 2.0 * m.eval(a, b) - m.eval(a, a) - m.eval(b, b);
}

// Greedy in-order merge: keep column j iff no kept column i < j lies within
// induced-metric distance `radius`. The cell-indexed path takes the same
// decisions as the plain scan, only skipping pairs that cannot be within
// range.
std::vector<char> greedy_radius_keep(const PartialMetric& m, const Eigen::MatrixXd& pts,
                                     double radius) {
    const Eigen::Index n = pts.cols();
    std::vector<char> keep(n, 1);
    if (m.structure == MetricStructure::Euclidean && pts.rows() <= 2) {
        const double euclid_radius = radius / 2.0;  // p^S is twice the Euclidean distance
        double extent = 0.0;
        for (Eigen::Index i = 0; i < pts.rows(); ++i) {
            extent = std::max(extent, pts.row(i).maxCoeff() - pts.row(i).minCoeff());
        }
        // Cells at least radius-sized keep the ring-1 neighbourhood exact;
        // the extent floor keeps cell coordinates small.
        const double cell = std::max({euclid_radius, extent / 1048576.0, 1e-12});
        detail::CellIndex index(pts, cell);
        for (Eigen::Index j = 0; j < n; ++j) {
            auto col = pts.col(j);
            std::int64_t cx = index.coord(col[0], 0);
            std::int64_t cy = pts.rows() > 1 ? index.coord(col[1], 1) : 0;
            bool merged = false;
            for (std::int64_t r = 0; r <= 1 && !merged; ++r) {
                index.for_ring(cx, cy, r, [&](std::int32_t i) {
                    if (merged || i >= j || !keep[i]) return;
                    double ps = 2.0 * std::sqrt((pts.col(i) - col).squaredNorm());
                    if (ps <= radius) merged = true;
                });
            }
            if (merged) keep[j] = 0;
        }
        return keep;
    }
    Point a(pts.rows()), b(pts.rows());
    for (Eigen::Index j = 0; j < n; ++j) {
        b = pts.col(j);
        for (Eigen::Index i = 0; i < j; ++i) {
            if (!keep[i]) continue;
            a = pts.col(i);
            if (ps_raw(m, a, b) <= radius) {
                keep[j] = 0;
                break;
            }
        }
    }
    return keep;
}

}  // namespace

FiniteSet hutchinson(const IfsSystem& sys, const FiniteSet& A, double merge_radius) {
    if (merge_radius < 0.0) throw std::invalid_argument("hutchinson: negative merge radius");
    const Eigen::Index n = A.matrix().cols();
    const Eigen::Index nmaps = static_cast<Eigen::Index>(sys.maps.size());
    Eigen::MatrixXd images(A.dim(), nmaps * n);
    for (Eigen::Index k = 0; k < nmaps; ++k) {
        images.middleCols(k * n, n) = sys.maps[static_cast<std::size_t>(k)].apply_columns(A.matrix());
    }
    if (merge_radius == 0.0) return FiniteSet(std::move(images));

    std::vector<char> keep = greedy_radius_keep(sys.metric, images, merge_radius);
    Eigen::Index kept = 0;
    for (char c : keep) kept += c;
    Eigen::MatrixXd out(images.rows(), kept);
    Eigen::Index w = 0;
    for (Eigen::Index j = 0; j < images.cols(); ++j) {
        if (keep[j]) out.col(w++) = images.col(j);
    }
    return FiniteSet(std::move(out), FiniteSet::AlreadyUnique{});
}

AttractorRun iterate_attractor(const IfsSystem& sys, const FiniteSet& A0,
                               const AttractorOptions& opts) {
    const double radius = opts.merge_radius < 0.0 ? opts.tol / 10.0 : opts.merge_radius;
    std::vector<double> steps;
    FiniteSet cur = A0;
    for (long it = 0; it < std::max(opts.max_iters, 1L); ++it) {
        FiniteSet next = hutchinson(sys, cur, radius);
        double step = h_p(sys.metric, cur, next);
        steps.push_back(step);
        if (step <= opts.tol) {
            return AttractorRun{std::move(cur), std::move(next), std::move(steps),
                                AttractorStatus::Converged, radius};
        }
        cur = std::move(next);
    }
    FiniteSet next = hutchinson(sys, cur, radius);
    return AttractorRun{std::move(cur), std::move(next), std::move(steps),
                        AttractorStatus::MaxIters, radius};
}

double compute_MT(const IfsSystem& sys, const FiniteSet& A, const FiniteSet& B) {
    const auto& m = sys.metric;
    FiniteSet TA = hutchinson(sys, A, 0.0);
    FiniteSet T2A = hutchinson(sys, TA, 0.0);
    FiniteSet TB = hutchinson(sys, B, 0.0);
    return std::max({h_p(m, A, B), h_p(m, A, TA), h_p(m, B, TB), h_p(m, T2A, TA),
                     h_p(m, T2A, B), h_p(m, T2A, TB),
                     0.5 * (h_p(m, A, TB) + h_p(m, B, TA))});
}

nlohmann::json IfsContractionReport::to_json() const {
    return nlohmann::json{
        {"n_pairs", n_pairs},
        {"n_violations", n_violations},
        {"worst_slack", worst_slack},
    };
}

IfsContractionReport verify_ifs_contraction(
    const IfsSystem& sys, const std::vector<std::pair<FiniteSet, FiniteSet>>& pairs) {
    if (pairs.empty()) throw std::invalid_argument("verify_ifs_contraction: no pairs");
    IfsContractionReport rep;
    rep.worst_slack = std::numeric_limits<double>::infinity();
    for (const auto& [A, B] : pairs) {
        rep.n_pairs++;
        FiniteSet TA = hutchinson(sys, A, 0.0);
        FiniteSet TB = hutchinson(sys, B, 0.0);
        double mt = compute_MT(sys, A, B);
        double lhs = sys.control.psi(h_p(sys.metric, TA, TB));
        double slack = sys.control.psi(mt) - sys.control.phi(mt) - lhs;
        rep.worst_slack = std::min(rep.worst_slack, slack);
        if (slack < -kTolSlackIfs) rep.n_violations++;
    }
    return rep;
}

long FamilyReport::total_violations() const {
    long t = 0;
    for (long v : violations_per_map) t += v;
    return t;
}

nlohmann::json FamilyReport::to_json() const {
    return nlohmann::json{
        {"family", family},
        {"n_pairs", n_pairs},
        {"n_skipped", n_skipped},
        {"violations_per_map", violations_per_map},
        {"worst_slack", worst_slack},
    };
}

FamilyReport check_family(const IfsSystem& sys, const std::vector<std::pair<Point, Point>>& pairs,
                          FamilyDistance dist) {
    FamilyReport rep;
    rep.family = to_string(sys.family);
    rep.violations_per_map.assign(sys.maps.size(), 0);
    rep.worst_slack = std::numeric_limits<double>::infinity();
    const auto& m = sys.metric;
    const double tau = sys.family_param;

    auto distance = [&](const Point& a, const Point& b) {
        return dist == FamilyDistance::InducedPs ? ps_raw(m, a, b) : m.eval(a, b);
    };

    for (const auto& [x, y] : pairs) {
        rep.n_pairs++;
        for (std::size_t i = 0; i < sys.maps.size(); ++i) {
            const Point fx = sys.maps[i].apply(x);
            const Point fy = sys.maps[i].apply(y);
            double slack;
            if (sys.family == ContractionFamily::PsiPhi) {
                // Per-map generalized contraction with its seven-term bound.
                const Point f2x = sys.maps[i].apply(fx);
                const Point f2y = sys.maps[i].apply(fy);
                double mp = std::max({m.eval(x, y), m.eval(fx, x), m.eval(fy, y),
                                      m.eval(f2x, fx), m.eval(f2y, y), m.eval(f2y, fy),
                                      0.5 * (m.eval(fx, y) + m.eval(fy, x))});
                slack = sys.control.psi(mp) - sys.control.phi(mp) -
                        sys.control.psi(m.eval(fx, fy));
            } else {
                const double dxy = distance(x, y);
                const double dfxy = distance(fx, fy);
                if (sys.family != ContractionFamily::PlainContraction && dfxy == 0.0) {
                    rep.n_skipped++;
                    continue;
                }
                switch (sys.family) {
                    case ContractionFamily::PlainContraction:
                        slack = tau * dxy - dfxy;  // family_param is k here
                        break;
                    case ContractionFamily::ExpF:
                        slack = std::exp(-tau) * dxy - dfxy * std::exp(dfxy - dxy);
                        break;
                    case ContractionFamily::QuadraticF:
                        slack = std::exp(-tau) * dxy * (dxy + 1.0) - dfxy * (dfxy + 1.0);
                        break;
                    case ContractionFamily::SqrtF: {
                        double denom = 1.0 + tau * std::sqrt(dxy);
                        slack = dxy / (denom * denom) - dfxy;
                        break;
                    }
                    default: slack = 0.0; break;
                }
            }
            rep.worst_slack = std::min(rep.worst_slack, slack);
            if (slack < -kTolSlackIfs) rep.violations_per_map[i]++;
        }
    }
    if (!std::isfinite(rep.worst_slack)) rep.worst_slack = 0.0;
    return rep;
}

long Image::lit_pixels() const {
    long count = 0;
    for (std::size_t i = 0; i < rgb.size(); i += 3) {
        if (rgb[i] || rgb[i + 1] || rgb[i + 2]) count++;
    }
    return count;
}

void Image::write_ppm(std::ostream& os) const {
    os << "P6\n" << width << ' ' << height << "\n255\n";
    os.write(reinterpret_cast<const char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
}

Image render_points(const FiniteSet& set, const RasterSpec& raster) {
    if (raster.width <= 0 || raster.height <= 0 || !(raster.xmax > raster.xmin) ||
        !(raster.ymax > raster.ymin)) {
        throw std::invalid_argument("render_attractor: degenerate-bounds");
    }
    if (set.dim() != 2) throw std::invalid_argument("render_attractor: raster needs planar points");
    Image img;
    img.width = raster.width;
    img.height = raster.height;
    img.rgb.assign(static_cast<std::size_t>(raster.width) * raster.height * 3, 0);
    const double sx = raster.width / (raster.xmax - raster.xmin);
    const double sy = raster.height / (raster.ymax - raster.ymin);
    for (int j = 0; j < set.size(); ++j) {
        const double x = set.matrix()(0, j);
        const double y = set.matrix()(1, j);
        int px = static_cast<int>(std::floor((x - raster.xmin) * sx));
        int py = static_cast<int>(std::floor((raster.ymax - y) * sy));
        if (px == raster.width && x == raster.xmax) px = raster.width - 1;
        if (py == raster.height && y == raster.ymin) py = raster.height - 1;
        if (px < 0 || px >= raster.width || py < 0 || py >= raster.height) continue;
        std::size_t at = 3 * (static_cast<std::size_t>(py) * raster.width + px);
        img.rgb[at] = img.rgb[at + 1] = img.rgb[at + 2] = 255;
    }
    return img;
}

Image render_attractor(const AttractorRun& run, const RasterSpec& raster) {
    return render_points(run.final, raster);
}

IfsSystem sierpinski_system() {
    IfsSystem sys;
    sys.name = "sierpinski";
    Eigen::MatrixXd half = 0.5 * Eigen::MatrixXd::Identity(2, 2);
    sys.maps.push_back({half, point2(0.0, 0.0)});
    sys.maps.push_back({half, point2(0.5, 0.0)});
    sys.maps.push_back({half, point2(0.25, std::sqrt(3.0) / 4.0)});
    DomainDescriptor box = DomainDescriptor::planar_box(-0.5, 1.5, 21);
    sys.metric = euclidean_metric(std::move(box));
    sys.control = linear_pair(0.5);
    sys.family = ContractionFamily::PlainContraction;
    sys.family_param = 0.5;
    return sys;
}

IfsSystem dyadic_system() {
    IfsSystem sys;
    sys.name = "dyadic";
    Eigen::MatrixXd half = 0.5 * Eigen::MatrixXd::Identity(1, 1);
    sys.maps.push_back({half, point1(0.0)});
    sys.maps.push_back({half, point1(0.5)});
    sys.metric = euclidean_metric(DomainDescriptor::real_interval(-0.5, 1.5, 401));
    sys.control = linear_pair(0.5);
    sys.family = ContractionFamily::PlainContraction;
    sys.family_param = 0.5;
    return sys;
}

}  // namespace pmfix
