#include "pmfix/hausdorff.hpp"

#include "cell_index.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace pmfix {

namespace {

// Exact-duplicate removal keeping first occurrences. Hash-sorted grouping,
// then flags applied in original column order.
Eigen::MatrixXd dedup_columns(const Eigen::MatrixXd& in) {
    const Eigen::Index n = in.cols();
    if (n == 0) return in;
    std::vector<std::pair<std::uint64_t, std::int32_t>> keyed(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        keyed[j] = {detail::hash_column(in, j), static_cast<std::int32_t>(j)};
    }
    std::sort(keyed.begin(), keyed.end());
    std::vector<char> keep(n, 1);
    std::size_t group = 0;
    while (group < keyed.size()) {
        std::size_t end = group + 1;
        while (end < keyed.size() && keyed[end].first == keyed[group].first) ++end;
        for (std::size_t a = group; a < end; ++a) {
            if (!keep[keyed[a].second]) continue;
            for (std::size_t b = a + 1; b < end; ++b) {
                if (!keep[keyed[b].second]) continue;
                if ((in.col(keyed[a].second).array() == in.col(keyed[b].second).array()).all()) {
                    keep[keyed[b].second] = 0;
                }
            }
        }
        group = end;
    }
    Eigen::Index kept = 0;
    for (Eigen::Index j = 0; j < n; ++j) kept += keep[j];
    if (kept == n) return in;
    Eigen::MatrixXd out(in.rows(), kept);
    Eigen::Index w = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
        if (keep[j]) out.col(w++) = in.col(j);
    }
    return out;
}

void require_set_in_domain(const PartialMetric& m, const FiniteSet& s, const char* what) {
    const auto& M = s.matrix();
    if (M.rows() != m.domain.dim) {
        throw std::domain_error(std::string("domain-mismatch: ") + what + " has wrong dimension");
    }
    for (int i = 0; i < m.domain.dim; ++i) {
        if (M.row(i).minCoeff() < m.domain.lo[i] || M.row(i).maxCoeff() > m.domain.hi[i]) {
            throw std::domain_error(std::string("domain-mismatch: ") + what +
                                    " has points outside the metric domain");
        }
    }
}

double point_to_set_unchecked(const PartialMetric& m, const Point& x, const FiniteSet& A) {
    if (m.structure == MetricStructure::MaxCoord && A.dim() == 1) {
        return std::max(x[0], A.matrix().row(0).minCoeff());
    }
    double best = std::numeric_limits<double>::infinity();
    Point b(A.dim());
    for (int j = 0; j < A.size(); ++j) {
        b = A.matrix().col(j);
        best = std::min(best, m.eval(x, b));
    }
    return best;
}

double delta_p_unchecked(const PartialMetric& m, const FiniteSet& A, const FiniteSet& B) {
    if (m.structure == MetricStructure::MaxCoord && A.dim() == 1) {
        // min over b of max(a, b) is max(a, min B); the outer sup follows.
        return std::max(A.matrix().row(0).maxCoeff(), B.matrix().row(0).minCoeff());
    }
    if (m.structure == MetricStructure::Euclidean && A.dim() <= 2 &&
        static_cast<long>(A.size()) * B.size() > 65536) {
        const auto& BM = B.matrix();
        double extent_b = 0.0, extent_ab = 0.0;
        for (int i = 0; i < B.dim(); ++i) {
            extent_b = std::max(extent_b, BM.row(i).maxCoeff() - BM.row(i).minCoeff());
            double lo = std::min(BM.row(i).minCoeff(), A.matrix().row(i).minCoeff());
            double hi = std::max(BM.row(i).maxCoeff(), A.matrix().row(i).maxCoeff());
            extent_ab = std::max(extent_ab, hi - lo);
        }
        double cell = extent_b / std::max(1.0, std::ceil(std::pow(double(B.size()), 1.0 / B.dim())));
        // keep cell coordinates bounded for queries far from B
        cell = std::max({cell, extent_ab / 1048576.0, 1e-12});
        detail::CellIndex index(BM, cell);
        std::vector<double> chunk_max(worker_count(), 0.0);
        parallel_chunks(static_cast<std::size_t>(A.size()),
                        [&](std::size_t lo, std::size_t hi, unsigned tid) {
                            double local = 0.0;
                            for (std::size_t i = lo; i < hi; ++i) {
                                double sq = index.nn_squared(A.matrix().col(i));
                                local = std::max(local, sq);
                            }
                            chunk_max[tid] = std::max(chunk_max[tid], local);
                        });
        double best_sq = 0.0;
        for (double v : chunk_max) best_sq = std::max(best_sq, v);
        return std::sqrt(best_sq);
    }
    double worst = 0.0;
    Point a(A.dim());
    for (int i = 0; i < A.size(); ++i) {
        a = A.matrix().col(i);
        worst = std::max(worst, point_to_set_unchecked(m, a, B));
    }
    return worst;
}

bool is_subset(const FiniteSet& A, const FiniteSet& B) {
    for (int i = 0; i < A.size(); ++i) {
        bool found = false;
        for (int j = 0; j < B.size() && !found; ++j) {
            found = (A.matrix().col(i).array() == B.matrix().col(j).array()).all();
        }
        if (!found) return false;
    }
    return true;
}

}  // namespace

FiniteSet::FiniteSet(Eigen::MatrixXd columns) : pts_(dedup_columns(columns)) {
    if (pts_.cols() == 0) throw std::invalid_argument("FiniteSet: empty-set");
}

FiniteSet::FiniteSet(Eigen::MatrixXd columns, AlreadyUnique) : pts_(std::move(columns)) {
    if (pts_.cols() == 0) throw std::invalid_argument("FiniteSet: empty-set");
}

FiniteSet FiniteSet::from_points(const std::vector<Point>& pts) {
    if (pts.empty()) throw std::invalid_argument("FiniteSet: empty-set");
    Eigen::MatrixXd m(pts.front().size(), static_cast<Eigen::Index>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (pts[i].size() != m.rows()) {
            throw std::invalid_argument("FiniteSet: mixed point dimensions");
        }
        m.col(static_cast<Eigen::Index>(i)) = pts[i];
    }
    return FiniteSet(std::move(m));
}

FiniteSet FiniteSet::from_coords(const std::vector<double>& coords) {
    if (coords.empty()) throw std::invalid_argument("FiniteSet: empty-set");
    Eigen::MatrixXd m(1, static_cast<Eigen::Index>(coords.size()));
    for (std::size_t i = 0; i < coords.size(); ++i) m(0, static_cast<Eigen::Index>(i)) = coords[i];
    return FiniteSet(std::move(m));
}

double point_to_set(const PartialMetric& m, const Point& x, const FiniteSet& A) {
    require_set_in_domain(m, A, "A");
    if (!m.domain.contains(x)) throw std::domain_error("domain-mismatch: x outside domain");
    return point_to_set_unchecked(m, x, A);
}

double delta_p(const PartialMetric& m, const FiniteSet& A, const FiniteSet& B) {
    require_set_in_domain(m, A, "A");
    require_set_in_domain(m, B, "B");
    return delta_p_unchecked(m, A, B);
}

double h_p(const PartialMetric& m, const FiniteSet& A, const FiniteSet& B) {
    require_set_in_domain(m, A, "A");
    require_set_in_domain(m, B, "B");
    return std::max(delta_p_unchecked(m, A, B), delta_p_unchecked(m, B, A));
}

nlohmann::json HausdorffReport::to_json() const {
    return nlohmann::json{
        {"metric", metric},
        {"n_sets", n_sets},
        {"violations",
         {{"p42_i", p42_i},
          {"p42_ii", p42_ii},
          {"p42_iii", p42_iii},
          {"p42_iv", p42_iv},
          {"p43_1", p43_1},
          {"p43_2", p43_2},
          {"p43_3", p43_3},
          {"p43_4", p43_4}}},
        {"worst", {{"i", worst_i}, {"j", worst_j}, {"k", worst_k}, {"slack", worst_slack}}},
    };
}

HausdorffReport check_hausdorff_props(const PartialMetric& m, const std::vector<FiniteSet>& sets) {
    if (sets.size() < 3) throw std::invalid_argument("check_hausdorff_props: need >= 3 sets");
    const int n = static_cast<int>(sets.size());
    for (const auto& s : sets) require_set_in_domain(m, s, "set");

    HausdorffReport rep;
    rep.metric = m.name;
    rep.n_sets = n;
    rep.worst_slack = std::numeric_limits<double>::infinity();

    auto consider = [&](double margin, int i, int j, int k) {
        if (margin < rep.worst_slack) {
            rep.worst_slack = margin;
            rep.worst_i = i;
            rep.worst_j = j;
            rep.worst_k = k;
        }
    };

    Eigen::MatrixXd D(n, n);
    Eigen::VectorXd self_sup(n), self_inf(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) D(i, j) = delta_p_unchecked(m, sets[i], sets[j]);
        double lo = std::numeric_limits<double>::infinity(), hiv = 0.0;
        Point a(sets[i].dim());
        for (int c = 0; c < sets[i].size(); ++c) {
            a = sets[i].matrix().col(c);
            double s = m.eval(a, a);
            lo = std::min(lo, s);
            hiv = std::max(hiv, s);
        }
        self_inf[i] = lo;
        self_sup[i] = hiv;
    }
    auto H = [&](int i, int j) { return std::max(D(i, j), D(j, i)); };

    for (int i = 0; i < n; ++i) {
        double mi = kTolTri - std::abs(D(i, i) - self_sup[i]);
        if (mi < 0.0) rep.p42_i++;
        consider(mi, i, i, -1);
        for (int j = 0; j < n; ++j) {
            double mii = D(i, j) - D(i, i) + kTolTri;
            if (mii < 0.0) rep.p42_ii++;
            consider(mii, i, j, -1);

            if (D(i, j) <= 0.0 && !is_subset(sets[i], sets[j])) {
                rep.p42_iii++;
                consider(-1.0, i, j, -1);
            }

            double m1 = H(i, j) - H(i, i) + kTolTri;
            if (m1 < 0.0) rep.p43_1++;
            consider(m1, i, j, -1);

            if (H(i, j) != H(j, i)) {
                rep.p43_2++;
                consider(-std::abs(H(i, j) - H(j, i)), i, j, -1);
            }

            if (H(i, j) <= 0.0 && !(is_subset(sets[i], sets[j]) && is_subset(sets[j], sets[i]))) {
                rep.p43_4++;
                consider(-1.0, i, j, -1);
            }

            for (int k = 0; k < n; ++k) {
                double m4 = (D(i, k) + D(k, j) - self_inf[k]) - D(i, j) + kTolTri;
                if (m4 < 0.0) rep.p42_iv++;
                consider(m4, i, j, k);

                double m3 = (H(i, k) + H(k, j) - self_inf[k]) - H(i, j) + kTolTri;
                if (m3 < 0.0) rep.p43_3++;
                consider(m3, i, j, k);
            }
        }
    }
    return rep;
}

void save_cloud_csv(std::ostream& os, const FiniteSet& set) {
    for (int j = 0; j < set.size(); ++j) {
        for (int i = 0; i < set.dim(); ++i) {
            if (i) os << ',';
            os << format_double(set.matrix()(i, j));
        }
        os << '\n';
    }
}

std::vector<FiniteSet> random_subsets(const DomainDescriptor& grid, int n_sets, int min_size,
                                      int max_size, std::uint64_t seed) {
    if (grid.sample_grid.empty() || n_sets < 1 || min_size < 1 || max_size < min_size) {
        throw std::invalid_argument("random_subsets: bad parameters");
    }
    IndexSampler rng(seed);
    std::vector<FiniteSet> sets;
    sets.reserve(n_sets);
    for (int s = 0; s < n_sets; ++s) {
        int size = min_size + static_cast<int>(rng.next(max_size - min_size + 1));
        std::vector<Point> pts;
        pts.reserve(size);
        for (int i = 0; i < size; ++i) pts.push_back(grid.sample_grid[rng.next(grid.sample_grid.size())]);
        sets.push_back(FiniteSet::from_points(pts));
    }
    return sets;
}

FiniteSet load_cloud_csv(std::istream& is) {
    std::vector<Point> pts;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        Point p(static_cast<Eigen::Index>(row.size()));
        for (std::size_t i = 0; i < row.size(); ++i) p[static_cast<Eigen::Index>(i)] = row[i];
        pts.push_back(std::move(p));
    }
    return FiniteSet::from_points(pts);
}

}  // namespace pmfix
