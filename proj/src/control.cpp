#include "pmfix/control.hpp"

#include <cmath>
#include <stdexcept>

namespace pmfix {

std::pair<double, double> eval_pair(const ControlPair& cp, double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw std::invalid_argument("eval_pair: control functions take nonnegative finite input");
    }
    return {cp.psi(t), cp.phi(t)};
}

nlohmann::json PairReport::to_json() const {
    return nlohmann::json{
        {"name", name},
        {"grid_size", grid_size},
        {"monotonicity_violations", monotonicity_violations},
        {"positivity_violations", positivity_violations},
        {"zero_at_zero", zero_at_zero},
    };
}

PairReport verify_pair(const ControlPair& cp, const std::vector<double>& grid) {
    if (grid.empty() || grid.front() != 0.0) {
        throw std::invalid_argument("verify_pair: grid must start at 0");
    }
    PairReport rep;
    rep.name = cp.name;
    rep.grid_size = static_cast<long>(grid.size());
    rep.zero_at_zero = cp.psi(0.0) == 0.0 && cp.phi(0.0) == 0.0;

    double prev_t = grid.front();
    double prev_psi = cp.psi(prev_t);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        double t = grid[i];
        if (t < prev_t) throw std::invalid_argument("verify_pair: grid must be ascending");
        double psi_t = cp.psi(t);
        double phi_t = cp.phi(t);
        if (t > 0.0 && (psi_t <= 0.0 || phi_t <= 0.0)) rep.positivity_violations++;
        if (psi_t < prev_psi) rep.monotonicity_violations++;
        prev_t = t;
        prev_psi = psi_t;
    }
    return rep;
}

namespace {

// Composite trapezoid of f over [0, x]; throws if f turns negative at a node.
double running_integral(const std::function<double(double)>& f, double x, int panels) {
    if (x == 0.0) return 0.0;
    const double h = x / panels;
    double acc = 0.0;
    double prev = f(0.0);
    if (prev < 0.0) throw std::invalid_argument("integral_compose: negative-density");
    for (int i = 1; i <= panels; ++i) {
        double cur = f(h * i);
        if (cur < 0.0) throw std::invalid_argument("integral_compose: negative-density");
        acc += 0.5 * h * (prev + cur);
        prev = cur;
    }
    return acc;
}

}  // namespace

ControlPair integral_compose(const ControlPair& cp, std::function<double(double)> density,
                             int quad_steps) {
    if (quad_steps < 16) throw std::invalid_argument("integral_compose: quad_steps must be >= 16");
    ControlPair out;
    out.name = cp.name + "+integral";
    out.psi = [psi = cp.psi, density, quad_steps](double t) {
        return running_integral(density, psi(t), quad_steps);
    };
    out.phi = [phi = cp.phi, density, quad_steps](double t) {
        return running_integral(density, phi(t), quad_steps);
    };
    return out;
}

ControlPair linear_pair(double c) {
    if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("linear_pair: need 0 < c < 1");
    ControlPair cp;
    cp.name = "linear";
    cp.psi = [](double t) { return t; };
    cp.phi = [c](double t) { return c * t; };
    return cp;
}

ControlPair example22_pair() {
    ControlPair cp;
    cp.name = "example22";
    cp.psi = [](double t) {
        if (t <= 1.0 / 3.0) return 3.0 * t;
        if (t <= 1.0) return 1.0;
        return t;
    };
    cp.phi = [](double t) {
        if (t == 0.0) return 0.0;
        if (t <= 1.0 / 3.0) return t / 3.0;
        return 1.0 / 9.0;
    };
    return cp;
}

ControlPair section3_pair() {
    // psi(a) + phi(2a) == psi(2a) holds with equality for this pair.
    ControlPair cp;
    cp.name = "section3";
    cp.psi = [](double t) { return t; };
    cp.phi = [](double t) { return t / 2.0; };
    return cp;
}

std::vector<double> uniform_scalar_grid(double lo, double hi, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = (n == 1) ? lo : lo + (hi - lo) * i / (n - 1.0);
    return g;
}

}  // namespace pmfix
