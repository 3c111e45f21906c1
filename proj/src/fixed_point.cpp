#include "pmfix/fixed_point.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace pmfix {

namespace {

double ps_raw(const PartialMetric& m, const Point& a, const Point& b) {
    return 2.0 * m.eval(a, b) - m.eval(a, a) - m.eval(b, b);
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void write_point_cell(std::ostream& os, const Point& p);

}  // namespace

OrderPredicate usual_leq() {
    OrderPredicate o;
    o.name = "usual-leq";
    o.leq = [](const Point& a, const Point& b) {
        return a.size() == b.size() && (a.array() <= b.array()).all();
    };
    return o;
}

double PiecewiseMap1D::operator()(double x) const {
    for (const auto& p : pieces) {
        bool above = p.include_lo ? (x >= p.lo) : (x > p.lo);
        bool below = p.include_hi ? (x <= p.hi) : (x < p.hi);
        if (above && below) return p.c0 + p.c1 * x;
    }
    throw std::domain_error("piecewise map: argument matches no piece");
}

PointMap make_piecewise(PiecewiseMap1D pm) {
    return [pm = std::move(pm)](const Point& x) { return point1(pm(x[0])); };
}

double compute_Mp(const PartialMetric& m, const MapQuartet& q, const Point& x, const Point& y) {
    if (!m.domain.contains(x) || !m.domain.contains(y)) {
        throw std::domain_error("domain-mismatch: compute_Mp arguments outside domain");
    }
    const Point fx = q.f(x), gy = q.g(y), Sx = q.S(x), Ty = q.T(y);
    return std::max({m.eval(Sx, Ty), m.eval(fx, Sx), m.eval(gy, Ty),
                     0.5 * (m.eval(Sx, gy) + m.eval(fx, Ty))});
}

nlohmann::json HypothesisReport::to_json() const {
    return nlohmann::json{
        {"quartet", quartet},
        {"grid_size", grid_size},
        {"f_dominated_failures", f_dominated_failures},
        {"g_dominated_failures", g_dominated_failures},
        {"s_dominating_failures", s_dominating_failures},
        {"t_dominating_failures", t_dominating_failures},
        {"range_f_in_t_residual", range_f_in_t_residual},
        {"range_g_in_s_residual", range_g_in_s_residual},
        {"range_via_oracle", range_via_oracle},
        {"tol_pre", tol_pre},
        {"passed", passed()},
    };
}

HypothesisReport check_dominated_dominating(const PartialMetric& m, const MapQuartet& q,
                                            const DomainDescriptor& grid, double tol_pre) {
    if (grid.sample_grid.empty()) {
        throw std::invalid_argument("check_dominated_dominating: empty grid");
    }
    HypothesisReport rep;
    rep.quartet = q.name;
    rep.grid_size = static_cast<long>(grid.sample_grid.size());
    rep.tol_pre = tol_pre;
    rep.range_via_oracle = static_cast<bool>(q.preimage_T) && static_cast<bool>(q.preimage_S);

    for (const Point& x : grid.sample_grid) {
        if (!q.order.leq(q.f(x), x)) rep.f_dominated_failures++;
        if (!q.order.leq(q.g(x), x)) rep.g_dominated_failures++;
        if (!q.order.leq(x, q.S(x))) rep.s_dominating_failures++;
        if (!q.order.leq(x, q.T(x))) rep.t_dominating_failures++;
    }

    // Range inclusions f(X) within T(X) and g(X) within S(X): exact through
    // the oracles when present, nearest grid image otherwise.
    std::vector<Point> t_images, s_images;
    if (!rep.range_via_oracle) {
        t_images.reserve(grid.sample_grid.size());
        s_images.reserve(grid.sample_grid.size());
        for (const Point& w : grid.sample_grid) {
            t_images.push_back(q.T(w));
            s_images.push_back(q.S(w));
        }
    }
    auto residual_against = [&](const Point& target, const PointMap& oracle, const PointMap& fwd,
                                const std::vector<Point>& images) {
        if (oracle) return ps_raw(m, fwd(oracle(target)), target);
        double best = std::numeric_limits<double>::infinity();
        for (const Point& img : images) best = std::min(best, ps_raw(m, img, target));
        return best;
    };
    for (const Point& x : grid.sample_grid) {
        rep.range_f_in_t_residual = std::max(
            rep.range_f_in_t_residual, residual_against(q.f(x), q.preimage_T, q.T, t_images));
        rep.range_g_in_s_residual = std::max(
            rep.range_g_in_s_residual, residual_against(q.g(x), q.preimage_S, q.S, s_images));
    }
    return rep;
}

nlohmann::json ContractionReport::to_json() const {
    nlohmann::json sample_arr = nlohmann::json::array();
    for (const auto& s : samples) {
        sample_arr.push_back({{"x", point_to_json(s.x)},
                              {"y", point_to_json(s.y)},
                              {"lhs", s.lhs},
                              {"rhs", s.rhs},
                              {"mp", s.mp},
                              {"slack", s.slack}});
    }
    return nlohmann::json{
        {"n_pairs", n_pairs},
        {"n_skipped_non_comparable", n_skipped_non_comparable},
        {"n_violations", n_violations},
        {"worst_slack", worst_slack},
        {"worst_x", point_to_json(worst_x)},
        {"worst_y", point_to_json(worst_y)},
        {"violating_pairs", sample_arr},
        {"samples_truncated", samples_truncated},
    };
}

namespace {

struct PairCheck {
    double lhs, rhs, mp, slack;
};

PairCheck check_pair(const PartialMetric& m, const ControlPair& cp, const Point& fx,
                     const Point& gy, const Point& Sx, const Point& Ty, double p_fx_Sx,
                     double p_gy_Ty) {
    const double mp = std::max({m.eval(Sx, Ty), p_fx_Sx, p_gy_Ty,
                                0.5 * (m.eval(Sx, gy) + m.eval(fx, Ty))});
    PairCheck out;
    out.mp = mp;
    out.lhs = cp.psi(m.eval(fx, gy));
    out.rhs = cp.psi(mp) - cp.phi(mp);
    out.slack = out.rhs - out.lhs;
    return out;
}

}  // namespace

ContractionReport verify_contraction(const PartialMetric& m, const MapQuartet& q,
                                     const ControlPair& cp,
                                     const std::vector<std::pair<Point, Point>>& pairs) {
    ContractionReport rep;
    rep.worst_slack = std::numeric_limits<double>::infinity();
    for (const auto& [x, y] : pairs) {
        rep.n_pairs++;
        if (!q.order.leq(x, y) && !q.order.leq(y, x)) {
            rep.n_skipped_non_comparable++;
            continue;
        }
        const Point fx = q.f(x), gy = q.g(y), Sx = q.S(x), Ty = q.T(y);
        auto c = check_pair(m, cp, fx, gy, Sx, Ty, m.eval(fx, Sx), m.eval(gy, Ty));
        if (c.slack < rep.worst_slack) {
            rep.worst_slack = c.slack;
            rep.worst_x = x;
            rep.worst_y = y;
        }
        if (c.slack < -kTolSlack) {
            rep.n_violations++;
            if (rep.samples.size() < kMaxViolationSamples) {
                rep.samples.push_back({x, y, c.lhs, c.rhs, c.mp, c.slack});
            } else {
                rep.samples_truncated = true;
            }
        }
    }
    if (!std::isfinite(rep.worst_slack)) rep.worst_slack = 0.0;
    return rep;
}

ContractionReport verify_contraction_grid(const PartialMetric& m, const MapQuartet& q,
                                          const ControlPair& cp, const DomainDescriptor& grid) {
    const std::size_t n = grid.sample_grid.size();
    if (n == 0) throw std::invalid_argument("verify_contraction_grid: empty grid");

    std::vector<Point> fx(n), gx(n), Sx(n), Tx(n);
    std::vector<double> p_f_S(n), p_g_T(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Point& x = grid.sample_grid[i];
        fx[i] = q.f(x);
        gx[i] = q.g(x);
        Sx[i] = q.S(x);
        Tx[i] = q.T(x);
        p_f_S[i] = m.eval(fx[i], Sx[i]);
        p_g_T[i] = m.eval(gx[i], Tx[i]);
    }

    struct Local {
        long pairs = 0, skipped = 0, violations = 0;
        double worst = std::numeric_limits<double>::infinity();
        std::size_t wi = 0, wj = 0;
        std::vector<ViolationSample> samples;
        bool truncated = false;
    };
    std::vector<Local> locals(worker_count());

    parallel_chunks(n, [&](std::size_t lo, std::size_t hi, unsigned tid) {
        Local& L = locals[tid];
        for (std::size_t i = lo; i < hi; ++i) {
            const Point& x = grid.sample_grid[i];
            for (std::size_t j = 0; j < n; ++j) {
                const Point& y = grid.sample_grid[j];
                L.pairs++;
                if (!q.order.leq(x, y) && !q.order.leq(y, x)) {
                    L.skipped++;
                    continue;
                }
                auto c = check_pair(m, cp, fx[i], gx[j], Sx[i], Tx[j], p_f_S[i], p_g_T[j]);
                if (c.slack < L.worst) {
                    L.worst = c.slack;
                    L.wi = i;
                    L.wj = j;
                }
                if (c.slack < -kTolSlack) {
                    L.violations++;
                    if (L.samples.size() < kMaxViolationSamples) {
                        L.samples.push_back({x, y, c.lhs, c.rhs, c.mp, c.slack});
                    } else {
                        L.truncated = true;
                    }
                }
            }
        }
    });

    ContractionReport rep;
    rep.worst_slack = std::numeric_limits<double>::infinity();
    std::size_t wi = 0, wj = 0;
    for (const Local& L : locals) {
        rep.n_pairs += L.pairs;
        rep.n_skipped_non_comparable += L.skipped;
        rep.n_violations += L.violations;
        if (L.worst < rep.worst_slack ||
            (L.worst == rep.worst_slack && std::make_pair(L.wi, L.wj) < std::make_pair(wi, wj))) {
            rep.worst_slack = L.worst;
            wi = L.wi;
            wj = L.wj;
        }
        for (const auto& s : L.samples) {
            if (rep.samples.size() < kMaxViolationSamples) {
                rep.samples.push_back(s);
            } else {
                rep.samples_truncated = true;
            }
        }
        rep.samples_truncated = rep.samples_truncated || L.truncated;
    }
    if (!std::isfinite(rep.worst_slack)) {
        rep.worst_slack = 0.0;
    } else {
        rep.worst_x = grid.sample_grid[wi];
        rep.worst_y = grid.sample_grid[wj];
    }
    return rep;
}

const char* to_string(IterationStatus s) {
    switch (s) {
        case IterationStatus::Converged: return "converged";
        case IterationStatus::MaxIters: return "max-iters";
        case IterationStatus::HypothesisViolation: return "hypothesis-violation";
        case IterationStatus::PreimageFailure: return "preimage-failure";
    }
    return "unknown";
}

namespace {

void write_point_cell(std::ostream& os, const Point& p) {
    for (int i = 0; i < p.size(); ++i) {
        if (i) os << ';';
        os << format_double(p[i]);
    }
}

struct PreimageResult {
    Point x;
    double residual;
};

PreimageResult resolve_preimage(const PartialMetric& m, const PointMap& oracle,
                                const PointMap& fwd, const Point& target,
                                const std::vector<Point>& grid) {
    if (oracle) {
        Point x = oracle(target);
        return {x, ps_raw(m, fwd(x), target)};
    }
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_idx = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double r = ps_raw(m, fwd(grid[i]), target);
        if (r < best) {  // ties keep the lowest enumeration index
            best = r;
            best_idx = i;
        }
    }
    return {grid[best_idx], best};
}

}  // namespace

void IterationTrace::write_csv(std::ostream& os) const {
    os << "step,x,y,ps_step,mp,slack\n";
    for (std::size_t i = 0; i < ys.size(); ++i) {
        os << i << ',';
        write_point_cell(os, i < xs.size() ? xs[i] : xs.back());
        os << ',';
        write_point_cell(os, ys[i]);
        os << ',' << format_double(i < ps_steps.size() ? ps_steps[i] : kNaN);
        os << ',' << format_double(i < mp_values.size() ? mp_values[i] : kNaN);
        os << ',' << format_double(i < slacks.size() ? slacks[i] : kNaN);
        os << '\n';
    }
}

IterationTrace iterate(const PartialMetric& m, const MapQuartet& q, const ControlPair& cp,
                       const Point& x0, const IterationOptions& opts) {
    if (!m.domain.contains(x0)) throw std::domain_error("iterate: x0 outside domain");

    IterationTrace tr;
    tr.xs.push_back(x0);
    tr.ys.push_back(x0);

    int consecutive_small = 0;
    for (long k = 0; k < opts.max_iters; ++k) {
        const bool f_turn = (k % 2 == 0);
        const Point& xk = tr.xs.back();
        Point y = f_turn ? q.f(xk) : q.g(xk);

        auto pre = f_turn ? resolve_preimage(m, q.preimage_T, q.T, y, m.domain.sample_grid)
                          : resolve_preimage(m, q.preimage_S, q.S, y, m.domain.sample_grid);
        if (pre.residual > opts.tol_pre) {
            tr.status = IterationStatus::PreimageFailure;
            tr.message = f_turn ? "no T-preimage for f image at desk resolution"
                                : "no S-preimage for g image at desk resolution";
            tr.limit = tr.ys.back();
            break;
        }
        if (!q.order.leq(pre.x, xk)) {
            tr.status = IterationStatus::HypothesisViolation;
            tr.message = "iterate chain is not nonincreasing under the declared order";
            tr.limit = tr.ys.back();
            break;
        }

        // Contractive-step bookkeeping for the pair just consumed.
        {
            const Point& xe = f_turn ? xk : pre.x;   // f-side argument
            const Point& xo = f_turn ? pre.x : xk;   // g-side argument
            double mp = compute_Mp(m, q, xe, xo);
            double lhs = cp.psi(m.eval(q.f(xe), q.g(xo)));
            tr.mp_values.push_back(mp);
            tr.slacks.push_back(cp.psi(mp) - cp.phi(mp) - lhs);
        }

        tr.ys.push_back(y);
        tr.xs.push_back(pre.x);

        const Point& y_prev = tr.ys[tr.ys.size() - 2];
        double step_ps = ps_raw(m, y_prev, y);
        tr.ps_steps.push_back(step_ps);
        tr.p_steps.push_back(m.eval(y_prev, y));

        if (step_ps <= opts.tol) {
            if (++consecutive_small >= opts.window) {
                tr.status = IterationStatus::Converged;
                const Point& z = tr.ys.back();
                tr.limit = z;
                tr.residual_f = ps_raw(m, q.f(z), z);
                tr.residual_g = ps_raw(m, q.g(z), z);
                tr.residual_s = ps_raw(m, q.S(z), z);
                tr.residual_t = ps_raw(m, q.T(z), z);
                tr.self_distance = m.eval(z, z);
                break;
            }
        } else {
            consecutive_small = 0;
        }
    }
    if (tr.status == IterationStatus::MaxIters) tr.limit = tr.ys.back();
    return tr;
}

nlohmann::json UniquenessReport::to_json() const {
    nlohmann::json lim = nlohmann::json::array();
    for (const auto& p : limits) lim.push_back(point_to_json(p));
    nlohmann::json st = nlohmann::json::array();
    for (auto s : seed_status) st.push_back(to_string(s));
    return nlohmann::json{
        {"distinct_limits", lim},
        {"seed_status", st},
        {"all_limits_comparable", all_limits_comparable},
        {"singleton", limits.size() == 1},
    };
}

UniquenessReport probe_uniqueness(const PartialMetric& m, const MapQuartet& q,
                                  const ControlPair& cp, const std::vector<Point>& seeds,
                                  const IterationOptions& opts) {
    if (seeds.size() < 2) throw std::invalid_argument("probe_uniqueness: need >= 2 seeds");
    UniquenessReport rep;
    for (const Point& s : seeds) {
        IterationTrace tr = iterate(m, q, cp, s, opts);
        rep.seed_status.push_back(tr.status);
        if (tr.status != IterationStatus::Converged) continue;
        bool known = false;
        for (const Point& z : rep.limits) {
            if (ps_raw(m, z, tr.limit) <= opts.tol) {
                known = true;
                break;
            }
        }
        if (!known) rep.limits.push_back(tr.limit);
    }
    for (std::size_t i = 0; i < rep.limits.size() && rep.all_limits_comparable; ++i) {
        for (std::size_t j = i + 1; j < rep.limits.size(); ++j) {
            if (!q.order.leq(rep.limits[i], rep.limits[j]) &&
                !q.order.leq(rep.limits[j], rep.limits[i])) {
                rep.all_limits_comparable = false;
                break;
            }
        }
    }
    return rep;
}

MapQuartet example22_quartet(double k) {
    if (!(k > 1.0 / 3.0)) throw std::invalid_argument("example22_quartet: need k > 1/3");
    const double third = 1.0 / 3.0;
    MapQuartet q;
    q.name = "example22";
    q.order = usual_leq();
    q.f = make_piecewise({{{0.0, third, true, true, 0.0, 1.0 / 6.0},
                           {third, k, false, true, 1.0 / 18.0, 0.0}}});
    q.g = make_piecewise({{{0.0, third, true, true, 0.0, 0.0},
                           {third, k, false, true, third, 0.0}}});
    q.T = make_piecewise({{{0.0, 0.0, true, true, 0.0, 0.0},
                           {0.0, third, false, true, 0.0, 1.0},
                           {third, k, false, true, k, 0.0}}});
    q.S = make_piecewise({{{0.0, 0.0, true, true, 0.0, 0.0},
                           {0.0, third, false, true, third, 0.0},
                           {third, k, false, true, k, 0.0}}});
    q.preimage_T = [third, k](const Point& y) {
        if (y[0] <= third) return point1(y[0]);
        return point1(k);
    };
    q.preimage_S = [third, k](const Point& y) {
        if (y[0] == 0.0) return point1(0.0);
        if (y[0] <= third) return point1(third);
        return point1(k);
    };
    return q;
}

MapQuartet identity_quartet() {
    MapQuartet q;
    q.name = "identity";
    q.order = usual_leq();
    auto id = [](const Point& x) { return x; };
    q.f = q.g = q.S = q.T = id;
    q.preimage_S = q.preimage_T = id;
    return q;
}

}  // namespace pmfix
