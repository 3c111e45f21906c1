#ifndef PMFIX_CONTROL_HPP
#define PMFIX_CONTROL_HPP

#include <json.hpp>

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace pmfix {

/// A (psi, phi) pair modulating the contraction inequality: psi is the
/// nondecreasing gauge, phi the strict penalty, both zero exactly at zero.
struct ControlPair {
    std::string name;
    std::function<double(double)> psi;
    std::function<double(double)> phi;
};

std::pair<double, double> eval_pair(const ControlPair& cp, double t);

struct PairReport {
    std::string name;
    long grid_size = 0;
    long monotonicity_violations = 0;
    long positivity_violations = 0;
    bool zero_at_zero = false;

    bool passed() const {
        return zero_at_zero && monotonicity_violations == 0 && positivity_violations == 0;
    }
    nlohmann::json to_json() const;
};

/// Samples zero-at-zero, positivity off zero, and monotonicity of psi over
/// the given ascending grid. Lower semicontinuity of phi is a declared
/// property, not machine-checked.
PairReport verify_pair(const ControlPair& cp, const std::vector<double>& grid);

/// Composes both components with the running integral of `density`
/// (composite trapezoid, `quad_steps` panels over [0, x]).
ControlPair integral_compose(const ControlPair& cp, std::function<double(double)> density,
                             int quad_steps);

ControlPair linear_pair(double c);
ControlPair example22_pair();
ControlPair section3_pair();

std::vector<double> uniform_scalar_grid(double lo, double hi, int n);

}  // namespace pmfix

#endif
