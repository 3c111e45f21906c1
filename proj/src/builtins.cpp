#include "pmfix/builtins.hpp"

#include <sstream>
#include <stdexcept>

namespace pmfix::builtins {

using nlohmann::json;

namespace {

std::string spec_name(const json& spec) {
    if (spec.is_string()) return spec.get<std::string>();
    if (spec.is_object() && spec.contains("name")) return spec["name"].get<std::string>();
    throw std::invalid_argument("builtin spec needs a name");
}

double field_or(const json& spec, const char* key, double fallback) {
    if (spec.is_object() && spec.contains(key)) return spec[key].get<double>();
    return fallback;
}

}  // namespace

PartialMetric make_metric(const json& spec, double k) {
    const std::string name = spec_name(spec);
    json grid = spec.is_object() && spec.contains("grid") ? spec["grid"] : json::object();
    if (name == "max_metric") {
        return max_metric(field_or(grid, "hi", 10.0),
                          static_cast<int>(field_or(grid, "n", 2001)));
    }
    if (name == "interval_metric") {
        return interval_metric(field_or(grid, "lo", 0.0), field_or(grid, "hi", 5.0),
                               static_cast<int>(field_or(grid, "base_n", 60)));
    }
    if (name == "mixed_metric") {
        double kk = field_or(spec, "k", k);
        if (!(kk > 0.0)) throw std::invalid_argument("mixed_metric spec needs k > 0");
        return mixed_metric(kk, static_cast<int>(field_or(grid, "n", 2001)));
    }
    if (name == "sup_pair_metric") {
        return sup_pair_metric(static_cast<int>(field_or(spec, "nodes", 21)),
                               static_cast<int>(field_or(spec, "samples", 64)),
                               field_or(spec, "value_hi", 2.0),
                               static_cast<std::uint64_t>(field_or(spec, "seed", 2024)));
    }
    if (name == "euclidean") {
        int dim = static_cast<int>(field_or(spec, "dim", 2));
        double lo = field_or(spec, "lo", -0.5), hi = field_or(spec, "hi", 1.5);
        int n = static_cast<int>(field_or(spec, "n", dim == 1 ? 401 : 21));
        DomainDescriptor dom = (dim == 1) ? DomainDescriptor::real_interval(lo, hi, n)
                                          : DomainDescriptor::planar_box(lo, hi, n);
        return euclidean_metric(std::move(dom));
    }
    throw std::invalid_argument("unknown metric: " + name);
}

ControlPair make_control(const json& spec) {
    const std::string name = spec_name(spec);
    if (name == "linear") return linear_pair(field_or(spec, "c", 0.5));
    if (name == "example22") return example22_pair();
    if (name == "section3") return section3_pair();
    throw std::invalid_argument("unknown control pair: " + name);
}

PiecewiseMap1D parse_piecewise(const json& spec) {
    const json& arr = spec.is_object() && spec.contains("pieces") ? spec["pieces"] : spec;
    if (!arr.is_array() || arr.empty()) {
        throw std::invalid_argument("piecewise map spec needs a non-empty pieces array");
    }
    PiecewiseMap1D pm;
    for (const auto& p : arr) {
        AffinePiece piece;
        piece.lo = p.at("lo").get<double>();
        piece.hi = p.at("hi").get<double>();
        piece.include_lo = p.value("include_lo", true);
        piece.include_hi = p.value("include_hi", true);
        piece.c0 = p.value("c0", 0.0);
        piece.c1 = p.value("c1", 0.0);
        pm.pieces.push_back(piece);
    }
    return pm;
}

MapQuartet make_quartet(const json& spec, double k) {
    if (spec.is_string()) {
        const std::string name = spec.get<std::string>();
        if (name == "example22") return example22_quartet(k > 0.0 ? k : 2.0);
        if (name == "identity") return identity_quartet();
        throw std::invalid_argument("unknown map quartet: " + name);
    }
    MapQuartet q;
    q.name = "custom-piecewise";
    q.order = usual_leq();
    q.f = make_piecewise(parse_piecewise(spec.at("f")));
    q.g = make_piecewise(parse_piecewise(spec.at("g")));
    q.S = make_piecewise(parse_piecewise(spec.at("S")));
    q.T = make_piecewise(parse_piecewise(spec.at("T")));
    return q;
}

IfsSystem make_ifs(const json& payload) {
    if (payload.contains("system")) {
        const std::string name = payload["system"].get<std::string>();
        if (name == "sierpinski") return sierpinski_system();
        if (name == "dyadic") return dyadic_system();
        throw std::invalid_argument("unknown ifs system: " + name);
    }
    IfsSystem sys;
    sys.name = "custom";
    for (const auto& mspec : payload.at("maps")) {
        if (mspec.value("type", "affine") != "affine") {
            throw std::invalid_argument("ifs maps must be affine");
        }
        const auto& rows = mspec.at("matrix");
        const int d = static_cast<int>(rows.size());
        Eigen::MatrixXd linear(d, d);
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) linear(i, j) = rows[i][j].get<double>();
        }
        Eigen::VectorXd offset(d);
        for (int i = 0; i < d; ++i) offset[i] = mspec.at("offset")[i].get<double>();
        sys.maps.push_back({std::move(linear), std::move(offset)});
    }
    sys.metric = make_metric(payload.value("metric", json("euclidean")));
    sys.control = make_control(payload.value("control_pair", json({{"name", "linear"}, {"c", 0.5}})));
    sys.family = family_from_string(payload.value("family", "psi-phi"));
    const json params = payload.value("params", json::object());
    sys.family_param = field_or(params, "k", field_or(params, "tau", 0.0));
    validate_ifs(sys);
    return sys;
}

IntegralProblem make_problem(const json& payload) {
    const double h = payload.at("h").get<double>();
    const std::string f_name = spec_name(payload.value("F", json("linear")));
    const std::string k_name = spec_name(payload.value("kappa", json("linear")));
    IntegralProblem base = (f_name == "ramp" || k_name == "ramp") ? ramp_problem(h)
                                                                  : linear_problem(h);
    // Mixed selections reuse the builtin components.
    IntegralProblem lin = linear_problem(h), rmp = ramp_problem(h);
    base.F = (f_name == "ramp") ? rmp.F : lin.F;
    base.kappa = (k_name == "ramp") ? rmp.kappa : lin.kappa;
    base.name = f_name + "/" + k_name;
    if (payload.contains("control_pair")) base.control = make_control(payload["control_pair"]);
    return base;
}

std::string list_text() {
    std::ostringstream os;
    os << "metrics:\n"
       << "  max_metric        p(x,y) = max{x,y} on the nonnegative reals\n"
       << "  interval_metric   p([a,b],[c,d]) = max{b,d} - min{a,c} on closed intervals\n"
       << "  mixed_metric(k)   |x-y| when both lie in [0,1), max{x,y} otherwise, on [0,k]\n"
       << "  sup_pair_metric   p(x,y) = max(sup x, sup y) on nonnegative grid functions\n"
       << "  euclidean         ordinary Euclidean distance treated as a partial metric\n"
       << "control pairs:\n"
       << "  linear(c)         psi(t) = t, phi(t) = c*t with 0 < c < 1\n"
       << "  example22         psi: 3t on [0,1/3], 1 on (1/3,1], t beyond; phi: t/3 then 1/9\n"
       << "  section3          psi(t) = t, phi(t) = t/2, satisfying psi(a)+phi(2a) <= psi(2a)\n"
       << "map quartets:\n"
       << "  example22(k)      piecewise maps on [0,k] with common fixed point 0\n"
       << "  identity          f = g = S = T = id (every point fixed)\n"
       << "ifs systems:\n"
       << "  sierpinski        three half-scale planar similitudes, gasket attractor\n"
       << "  dyadic            x/2 and x/2 + 1/2 on the line, attractor [0,1]\n"
       << "integral kernels:\n"
       << "  F linear          F(s,u) = h*u   (saturates the pointwise bound)\n"
       << "  F ramp            F(s,u) = h*u*s\n"
       << "  kappa linear      kappa(t,s,v) = 2h*v\n"
       << "  kappa ramp        kappa(t,s,v) = 2h*v*s\n";
    return os.str();
}

}  // namespace pmfix::builtins
