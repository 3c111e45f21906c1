#include "pmfix/integral.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace pmfix {

namespace {
constexpr double kCondTol = 1e-12;
}

GridFunction::GridFunction(Eigen::VectorXd v) : values(std::move(v)) {
    if (values.size() < 2) throw std::invalid_argument("GridFunction: need at least 2 nodes");
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i]) || values[i] < 0.0) {
            throw std::invalid_argument("GridFunction: values must be finite and nonnegative");
        }
    }
}

GridFunction GridFunction::constant(int n, double v) {
    return GridFunction(Eigen::VectorXd::Constant(n, v));
}

GridFunction apply_f(const IntegralProblem& prob, const GridFunction& x) {
    Eigen::VectorXd out(x.n());
    for (int j = 0; j < x.n(); ++j) {
        double v = prob.F(x.node(j), x.values[j]);
        if (!std::isfinite(v) || v < 0.0) {
            throw std::runtime_error("apply_f: negativity (condition (i) violated by F)");
        }
        out[j] = v;
    }
    return GridFunction(std::move(out));
}

GridFunction apply_g(const IntegralProblem& prob, const GridFunction& x) {
    const int n = x.n();
    const double hs = 1.0 / (n - 1);
    Eigen::VectorXd out(n);
    for (int j = 0; j < n; ++j) {
        const double t = x.node(j);
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            double k = prob.kappa(t, x.node(i), x.values[i]);
            if (!std::isfinite(k) || k < 0.0) {
                throw std::runtime_error("apply_g: negativity (kernel left the nonnegative cone)");
            }
            acc += (i == 0 || i == n - 1) ? 0.5 * hs * k : hs * k;
        }
        out[j] = acc;
    }
    return GridFunction(std::move(out));
}

nlohmann::json ConditionReport::to_json() const {
    return nlohmann::json{
        {"violations_i", violations_i},
        {"violations_ii", violations_ii},
        {"violations_iii", violations_iii},
        {"worst_slack", worst_slack},
        {"passed", passed()},
    };
}

ConditionReport check_conditions(const IntegralProblem& prob,
                                 const std::vector<GridFunction>& probes,
                                 const std::vector<double>& a_grid) {
    if (probes.empty()) throw std::invalid_argument("check_conditions: no probes");
    if (!(prob.h >= 0.0 && prob.h < 0.25)) {
        throw std::invalid_argument("check_conditions: h must lie in [0, 1/4)");
    }
    ConditionReport rep;
    rep.worst_slack = std::numeric_limits<double>::infinity();
    auto consider = [&](double slack, long& counter) {
        rep.worst_slack = std::min(rep.worst_slack, slack);
        if (slack < -kCondTol) counter++;
    };

    for (const GridFunction& u : probes) {
        for (int j = 0; j < u.n(); ++j) {
            for (int i = 0; i < u.n(); ++i) {
                consider(prob.h * u.values[j] - prob.F(u.node(i), u.values[j]), rep.violations_i);
            }
        }
        GridFunction gu = apply_g(prob, u);
        consider(2.0 * prob.h * u.sup() - gu.sup(), rep.violations_ii);
    }
    for (double a : a_grid) {
        auto [psi_2a, phi_2a] = eval_pair(prob.control, 2.0 * a);
        consider(psi_2a - prob.control.psi(a) - phi_2a, rep.violations_iii);
    }
    if (!std::isfinite(rep.worst_slack)) rep.worst_slack = 0.0;
    return rep;
}

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "converged";
        case SolveStatus::MaxIters: return "max-iters";
        case SolveStatus::ConditionViolation: return "condition-violation";
    }
    return "unknown";
}

void SolveResult::write_csv(std::ostream& os) const {
    os << "t,u,residual\n";
    for (int j = 0; j < limit.n(); ++j) {
        os << format_double(limit.node(j)) << ',' << format_double(limit.values[j]) << ','
           << format_double(residual[j]) << '\n';
    }
}

SolveResult solve(const IntegralProblem& prob, const GridFunction& x0, const SolveOptions& opts) {
    auto probes = standard_probes(x0.n());
    probes.push_back(x0);
    ConditionReport cond = check_conditions(prob, probes, default_a_grid());

    SolveResult res{GridFunction(x0), Eigen::VectorXd::Zero(x0.n())};
    res.iterates.push_back(x0);
    if (!cond.passed()) {
        res.status = SolveStatus::ConditionViolation;
        return res;
    }

    GridFunction x = x0;
    for (long cycle = 1; cycle <= opts.max_cycles; ++cycle) {
        res.cycles = cycle;
        bool done = false;
        for (int half = 0; half < 2 && !done; ++half) {
            GridFunction next = (half == 0) ? apply_f(prob, x) : apply_g(prob, x);
            double step = (next.values - x.values).cwiseAbs().maxCoeff();
            res.sup_steps.push_back(step);
            res.p_values.push_back(std::max(x.sup(), next.sup()));
            x = std::move(next);
            res.iterates.push_back(x);
            if (step <= opts.tol) {
                res.status = SolveStatus::Converged;
                done = true;
            }
        }
        if (done) break;
    }
    res.limit = x;
    GridFunction fu = apply_f(prob, x);
    GridFunction gu = apply_g(prob, x);
    res.residual = (fu.values - gu.values).cwiseAbs();
    res.residual_sup = res.residual.maxCoeff();
    return res;
}

std::vector<GridFunction> standard_probes(int n) {
    Eigen::VectorXd ramp(n), wave(n);
    for (int j = 0; j < n; ++j) {
        double t = j / (n - 1.0);
        ramp[j] = t;
        wave[j] = 0.5 * (1.0 + std::sin(2.0 * M_PI * t));
    }
    std::vector<GridFunction> probes;
    probes.push_back(GridFunction::constant(n, 1.0));
    probes.push_back(GridFunction(std::move(ramp)));
    probes.push_back(GridFunction(std::move(wave)));
    return probes;
}

std::vector<double> default_a_grid() { return uniform_scalar_grid(0.0, 2.0, 201); }

IntegralProblem linear_problem(double h) {
    if (!(h >= 0.0 && h < 0.25)) throw std::invalid_argument("linear_problem: h in [0, 1/4)");
    IntegralProblem p;
    p.name = "linear";
    p.h = h;
    p.F = [h](double, double u) { return h * u; };
    p.kappa = [h](double, double, double v) { return 2.0 * h * v; };
    p.control = section3_pair();
    return p;
}

IntegralProblem ramp_problem(double h) {
    if (!(h >= 0.0 && h < 0.25)) throw std::invalid_argument("ramp_problem: h in [0, 1/4)");
    IntegralProblem p;
    p.name = "ramp";
    p.h = h;
    p.F = [h](double s, double u) { return h * u * s; };
    p.kappa = [h](double, double s, double v) { return 2.0 * h * v * s; };
    p.control = section3_pair();
    return p;
}

}  // namespace pmfix
