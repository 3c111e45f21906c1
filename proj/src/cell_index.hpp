#ifndef PMFIX_SRC_CELL_INDEX_HPP
#define PMFIX_SRC_CELL_INDEX_HPP

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <utility>
#include <vector>

namespace pmfix::detail {

// Uniform-cell spatial index over the columns of a point matrix (dim 1 or 2).
// Entries are sorted by (cell key, column index), so lookups are binary
// searches and every traversal order is reproducible.
class CellIndex {
public:
    CellIndex(const Eigen::MatrixXd& pts, double cell)
        : pts_(&pts), cell_(cell), dim_(static_cast<int>(pts.rows())) {
        origin_[0] = origin_[1] = 0.0;
        if (pts.cols() > 0) {
            origin_[0] = pts.row(0).minCoeff();
            if (dim_ > 1) origin_[1] = pts.row(1).minCoeff();
        }
        entries_.reserve(static_cast<std::size_t>(pts.cols()));
        for (Eigen::Index j = 0; j < pts.cols(); ++j) {
            entries_.emplace_back(key_for(pts.col(j)), static_cast<std::int32_t>(j));
        }
        std::sort(entries_.begin(), entries_.end());
    }

    std::int64_t coord(double x, int axis) const {
        return static_cast<std::int64_t>(std::floor((x - origin_[axis]) / cell_));
    }

    static std::uint64_t pack(std::int64_t cx, std::int64_t cy) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(cx)) << 32) |
               static_cast<std::uint64_t>(static_cast<std::uint32_t>(cy));
    }

    template <typename Col>
    std::uint64_t key_for(const Col& p) const {
        std::int64_t cx = coord(p[0], 0);
        std::int64_t cy = (dim_ > 1) ? coord(p[1], 1) : 0;
        return pack(cx, cy);
    }

    template <typename Fn>
    void for_cell(std::uint64_t key, Fn&& fn) const {
        auto lo = std::lower_bound(entries_.begin(), entries_.end(),
                                   std::make_pair(key, std::int32_t{-1}));
        for (auto it = lo; it != entries_.end() && it->first == key; ++it) fn(it->second);
    }

    // Visits all indices in cells at Chebyshev cell-distance exactly r from
    // (cx, cy). r == 0 is the home cell.
    template <typename Fn>
    void for_ring(std::int64_t cx, std::int64_t cy, std::int64_t r, Fn&& fn) const {
        if (dim_ == 1) {
            if (r == 0) {
                for_cell(pack(cx, 0), fn);
            } else {
                for_cell(pack(cx - r, 0), fn);
                for_cell(pack(cx + r, 0), fn);
            }
            return;
        }
        if (r == 0) {
            for_cell(pack(cx, cy), fn);
            return;
        }
        for (std::int64_t dx = -r; dx <= r; ++dx) {
            for_cell(pack(cx + dx, cy - r), fn);
            for_cell(pack(cx + dx, cy + r), fn);
        }
        for (std::int64_t dy = -r + 1; dy <= r - 1; ++dy) {
            for_cell(pack(cx - r, cy + dy), fn);
            for_cell(pack(cx + r, cy + dy), fn);
        }
    }

    // Exact squared Euclidean distance from q to its nearest column.
    template <typename Col>
    double nn_squared(const Col& q) const {
        const Eigen::MatrixXd& P = *pts_;
        double best = std::numeric_limits<double>::infinity();
        std::int64_t cx = coord(q[0], 0);
        std::int64_t cy = (dim_ > 1) ? coord(q[1], 1) : 0;
        for (std::int64_t r = 0;; ++r) {
            for_ring(cx, cy, r, [&](std::int32_t idx) {
                double sq = (P.col(idx) - q).squaredNorm();
                if (sq < best) best = sq;
            });
            // Any point in an unexplored ring is at least r*cell away.
            double bound = static_cast<double>(r) * cell_;
            if (best <= bound * bound) return best;
        }
    }

    double cell_size() const { return cell_; }
    int dim() const { return dim_; }

private:
    const Eigen::MatrixXd* pts_;
    double cell_;
    int dim_;
    double origin_[2];
    std::vector<std::pair<std::uint64_t, std::int32_t>> entries_;
};

inline std::uint64_t mix_bits(std::uint64_t h, double v) {
    // canonicalize -0.0 so numerically equal points hash equally
    if (v == 0.0) v = 0.0;
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    h ^= bits + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

inline std::uint64_t hash_column(const Eigen::MatrixXd& m, Eigen::Index j) {
    std::uint64_t h = 0x243f6a8885a308d3ULL;
    for (Eigen::Index i = 0; i < m.rows(); ++i) h = mix_bits(h, m(i, j));
    return h;
}

}  // namespace pmfix::detail

#endif
