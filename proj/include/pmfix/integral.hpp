#ifndef PMFIX_INTEGRAL_HPP
#define PMFIX_INTEGRAL_HPP

#include "pmfix/common.hpp"
#include "pmfix/control.hpp"

#include <json.hpp>

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace pmfix {

/// Nonnegative function sampled at t_j = j/(N-1) on [0, 1].
struct GridFunction {
    Eigen::VectorXd values;

    explicit GridFunction(Eigen::VectorXd v);
    static GridFunction constant(int n, double v);

    int n() const { return static_cast<int>(values.size()); }
    double node(int j) const { return j / (n() - 1.0); }
    double sup() const { return values.maxCoeff(); }
};

/// Implicit integral problem F(t, x(t)) = integral of kappa(t, s, x(s)) ds
/// over [0, 1], with the admissibility constant h and the attached control
/// pair used by the contraction-side condition.
struct IntegralProblem {
    std::string name;
    std::function<double(double, double)> F;              // (s, u)
    std::function<double(double, double, double)> kappa;  // (t, s, v)
    double h = 0.0;
    ControlPair control;
};

GridFunction apply_f(const IntegralProblem& prob, const GridFunction& x);
GridFunction apply_g(const IntegralProblem& prob, const GridFunction& x);

struct ConditionReport {
    long violations_i = 0;
    long violations_ii = 0;
    long violations_iii = 0;
    double worst_slack = 0.0;

    bool passed() const { return violations_i == 0 && violations_ii == 0 && violations_iii == 0; }
    nlohmann::json to_json() const;
};

/// (i) F(s, u(t)) <= h*u(t) pointwise over the probes; (ii) the operator
/// bound sup (g v) <= 2h * sup v per probe; (iii) psi(a) + phi(2a) <= psi(2a)
/// over the scalar grid.
ConditionReport check_conditions(const IntegralProblem& prob,
                                 const std::vector<GridFunction>& probes,
                                 const std::vector<double>& a_grid);

struct SolveOptions {
    double tol = 1e-10;
    long max_cycles = 500;
};

enum class SolveStatus { Converged, MaxIters, ConditionViolation };

const char* to_string(SolveStatus s);

struct SolveResult {
    GridFunction limit;
    Eigen::VectorXd residual;
    double residual_sup = 0.0;
    long cycles = 0;
    SolveStatus status = SolveStatus::MaxIters;
    std::vector<GridFunction> iterates;  // x_0, f x_0, g f x_0, ...
    std::vector<double> sup_steps;       // sup |x_{n+1} - x_n| per half step
    std::vector<double> p_values;        // sup-based partial metric between iterates

    void write_csv(std::ostream& os) const;  // t, u(t), residual(t)
};

/// Alternates the two operators from x0 (the identity plays both dominating
/// roles) until the sup-norm step drops below tol, then certifies the limit
/// through the implicit residual.
SolveResult solve(const IntegralProblem& prob, const GridFunction& x0,
                  const SolveOptions& opts = {});

std::vector<GridFunction> standard_probes(int n);
std::vector<double> default_a_grid();

IntegralProblem linear_problem(double h);  // F = h*u, kappa = 2h*v
IntegralProblem ramp_problem(double h);    // F = h*u*s, kappa = 2h*v*s

}  // namespace pmfix

#endif
