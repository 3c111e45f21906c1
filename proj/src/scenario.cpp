#include "pmfix/scenario.hpp"

#include "pmfix/builtins.hpp"
#include "pmfix/fixed_point.hpp"
#include "pmfix/hausdorff.hpp"
#include "pmfix/ifs.hpp"
#include "pmfix/integral.hpp"
#include "pmfix/metric.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace pmfix {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("io-error: cannot write " + path.string());
    os << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

IterationOptions parse_iter_opts(const json& opts) {
    IterationOptions io;
    io.tol = opts.value("tol", io.tol);
    io.max_iters = opts.value("max_iters", io.max_iters);
    io.window = opts.value("window", io.window);
    io.tol_pre = opts.value("tol_pre", io.tol_pre);
    return io;
}

int run_check_axioms(const json& payload, const fs::path& out,
                     std::optional<std::uint64_t> seed_override, json& summary) {
    json metric_specs = payload.contains("metrics") ? payload["metrics"]
                                                    : json::array({payload.at("metric")});
    const long n_triples = payload.value("n_triples", 10000L);
    const std::uint64_t seed = seed_override.value_or(payload.value("seed", 42ULL));
    long total = 0;
    json per_metric = json::array();
    for (const auto& spec : metric_specs) {
        PartialMetric m = builtins::make_metric(spec, spec.is_object() ? spec.value("k", 0.0) : 0.0);
        AxiomReport rep = check_axioms(m, m.domain, n_triples, seed);
        write_json(out / ("axiom_report_" + m.name + ".json"), rep.to_json());
        total += rep.violations.total();
        per_metric.push_back({{"metric", m.name}, {"violations", rep.violations.total()}});
    }
    summary["metrics"] = per_metric;
    summary["total_violations"] = total;
    return total == 0 ? 0 : 2;
}

int run_contraction(const json& payload, const fs::path& out, bool with_iteration,
                    json& summary) {
    const double k = payload.value("k", 0.0);
    PartialMetric m = builtins::make_metric(payload.at("metric"), k);
    ControlPair cp = builtins::make_control(payload.at("control_pair"));
    MapQuartet q = builtins::make_quartet(payload.at("maps"), k);
    if (payload.value("order", "usual-leq") != std::string("usual-leq")) {
        throw std::invalid_argument("schema-error: only the usual-leq order is available");
    }

    DomainDescriptor grid = m.domain;
    if (payload.contains("grid")) {
        const json& g = payload["grid"];
        grid = DomainDescriptor::real_interval(g.at("lo").get<double>(), g.at("hi").get<double>(),
                                               g.at("n").get<int>());
        m.domain = grid;
    }

    const json opts = payload.value("opts", json::object());
    IterationOptions iter_opts = parse_iter_opts(opts);

    HypothesisReport hyp = check_dominated_dominating(m, q, grid, iter_opts.tol_pre);
    write_json(out / "hypothesis_report.json", hyp.to_json());

    ContractionReport con = verify_contraction_grid(m, q, cp, grid);
    write_json(out / "contraction_report.json", con.to_json());

    summary["hypotheses_passed"] = hyp.passed();
    summary["contraction_violations"] = con.n_violations;

    int rc = (hyp.passed() && con.n_violations == 0) ? 0 : 2;
    if (!with_iteration || rc != 0) return rc;

    std::vector<Point> seeds;
    if (opts.contains("seeds")) {
        for (const auto& s : opts["seeds"]) seeds.push_back(point1(s.get<double>()));
    } else {
        seeds.push_back(point1(opts.value("x0", grid.hi[0])));
    }
    json limits = json::array();
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        IterationTrace tr = iterate(m, q, cp, seeds[i], iter_opts);
        std::ostringstream csv;
        tr.write_csv(csv);
        write_text(out / ("trace_" + std::to_string(i) + ".csv"), csv.str());
        limits.push_back({{"seed", seeds[i][0]},
                          {"status", to_string(tr.status)},
                          {"limit", point_to_json(tr.limit)},
                          {"self_distance", tr.self_distance}});
        if (tr.status != IterationStatus::Converged) rc = 2;
    }
    summary["runs"] = limits;
    if (seeds.size() >= 2) {
        UniquenessReport uq = probe_uniqueness(m, q, cp, seeds, iter_opts);
        write_json(out / "uniqueness_report.json", uq.to_json());
        summary["distinct_limits"] = uq.limits.size();
    }
    return rc;
}

int run_hausdorff(const json& payload, const fs::path& out,
                  std::optional<std::uint64_t> seed_override, json& summary) {
    PartialMetric m = builtins::make_metric(payload.at("metric"), payload.value("k", 0.0));
    std::vector<FiniteSet> sets;
    const json& spec = payload.at("sets");
    if (spec.is_array()) {
        for (const auto& coords : spec) sets.push_back(FiniteSet::from_coords(coords.get<std::vector<double>>()));
    } else {
        const json& gen = spec.at("generator");
        DomainDescriptor grid = m.domain;
        if (gen.contains("grid")) {
            const json& g = gen["grid"];
            grid = DomainDescriptor::real_interval(g.at("lo").get<double>(),
                                                   g.at("hi").get<double>(), g.at("n").get<int>());
        }
        sets = random_subsets(grid, gen.value("n_sets", 20), gen.value("min_size", 1),
                              gen.value("max_size", 50),
                              seed_override.value_or(gen.value("seed", 7ULL)));
    }
    HausdorffReport rep = check_hausdorff_props(m, sets);
    write_json(out / "hausdorff_report.json", rep.to_json());
    summary["violations"] = rep.total();
    return rep.total() == 0 ? 0 : 2;
}

int run_ifs(const json& payload, const fs::path& out, json& summary) {
    IfsSystem sys = builtins::make_ifs(payload);
    const json opts = payload.value("opts", json::object());
    AttractorOptions aopts;
    aopts.tol = opts.value("tol", aopts.tol);
    aopts.max_iters = opts.value("max_iters", aopts.max_iters);
    aopts.merge_radius = opts.value("merge_radius", aopts.merge_radius);

    std::vector<Point> seed_pts;
    for (const auto& p : payload.value("seed_set", json::array({json::array({0.0, 0.0})}))) {
        Point q(static_cast<Eigen::Index>(p.size()));
        for (std::size_t i = 0; i < p.size(); ++i) q[static_cast<Eigen::Index>(i)] = p[i].get<double>();
        seed_pts.push_back(std::move(q));
    }
    AttractorRun run = iterate_attractor(sys, FiniteSet::from_points(seed_pts), aopts);

    std::ostringstream hp;
    hp << "step,hp\n";
    for (std::size_t i = 0; i < run.hp_steps.size(); ++i) {
        hp << i << ',' << format_double(run.hp_steps[i]) << '\n';
    }
    write_text(out / "hp_steps.csv", hp.str());

    std::ostringstream cloud;
    save_cloud_csv(cloud, run.final);
    write_text(out / "attractor.csv", cloud.str());

    if (opts.contains("raster") && run.final.dim() == 2) {
        const json& r = opts["raster"];
        RasterSpec raster;
        raster.width = r.value("width", 512);
        raster.height = r.value("height", 512);
        raster.xmin = r.value("xmin", 0.0);
        raster.ymin = r.value("ymin", 0.0);
        raster.xmax = r.value("xmax", 1.0);
        raster.ymax = r.value("ymax", 1.0);
        std::ostringstream img;
        render_attractor(run, raster).write_ppm(img);
        write_text(out / "attractor.ppm", img.str());
    }

    int rc = run.status == AttractorStatus::Converged ? 0 : 2;
    summary["status"] = run.status == AttractorStatus::Converged ? "converged" : "max-iters";
    summary["iterations"] = run.hp_steps.size();
    summary["final_size"] = run.final.size();

    if (payload.contains("family_pairs")) {
        const json& fp = payload["family_pairs"];
        IndexSampler rng(fp.value("seed", 99ULL));
        const auto& grid = sys.metric.domain.sample_grid;
        std::vector<std::pair<Point, Point>> pairs;
        const int n = fp.value("n", 1000);
        for (int i = 0; i < n; ++i) {
            pairs.emplace_back(grid[rng.next(grid.size())], grid[rng.next(grid.size())]);
        }
        FamilyReport fr = check_family(sys, pairs);
        write_json(out / "family_report.json", fr.to_json());
        summary["family_violations"] = fr.total_violations();
        if (fr.total_violations() > 0) rc = 2;
    }
    return rc;
}

int run_integral(const json& payload, const fs::path& out, json& summary) {
    IntegralProblem prob = builtins::make_problem(payload);
    const int n = payload.value("N", 201);
    GridFunction x0 = GridFunction::constant(n, payload.value("x0", 1.0));

    auto probes = standard_probes(n);
    probes.push_back(x0);
    ConditionReport cond = check_conditions(prob, probes, default_a_grid());
    write_json(out / "condition_report.json", cond.to_json());

    const json opts = payload.value("opts", json::object());
    SolveOptions sopts;
    sopts.tol = opts.value("tol", sopts.tol);
    sopts.max_cycles = opts.value("max_cycles", sopts.max_cycles);

    SolveResult res = solve(prob, x0, sopts);
    std::ostringstream csv;
    res.write_csv(csv);
    write_text(out / "solution.csv", csv.str());

    summary["status"] = to_string(res.status);
    summary["cycles"] = res.cycles;
    summary["residual_sup"] = res.residual_sup;
    summary["condition_violations"] =
        cond.violations_i + cond.violations_ii + cond.violations_iii;
    return (cond.passed() && res.status == SolveStatus::Converged) ? 0 : 2;
}

}  // namespace

RunResult run_scenario(const json& scenario, const std::string& out_dir,
                       std::optional<std::uint64_t> seed_override) {
    const std::string command = scenario.at("command").get<std::string>();
    const json payload = scenario.value("payload", json::object());
    fs::path out(out_dir);
    fs::create_directories(out);

    RunResult result;
    result.summary["command"] = command;
    if (command == "check-axioms") {
        result.exit_code = run_check_axioms(payload, out, seed_override, result.summary);
    } else if (command == "verify-contraction") {
        result.exit_code = run_contraction(payload, out, false, result.summary);
    } else if (command == "fixed-point") {
        result.exit_code = run_contraction(payload, out, true, result.summary);
    } else if (command == "hausdorff") {
        result.exit_code = run_hausdorff(payload, out, seed_override, result.summary);
    } else if (command == "ifs") {
        result.exit_code = run_ifs(payload, out, result.summary);
    } else if (command == "integral") {
        result.exit_code = run_integral(payload, out, result.summary);
    } else {
        throw std::invalid_argument("schema-error: unknown command " + command);
    }
    result.summary["exit_code"] = result.exit_code;
    write_json(out / "summary.json", result.summary);
    return result;
}

int run_scenario_file(const std::string& path, const std::string& out_dir_override,
                      std::optional<std::uint64_t> seed_override) {
    json scenario;
    try {
        std::ifstream is(path);
        if (!is) {
            std::cerr << "error: cannot open scenario file " << path << "\n";
            return 1;
        }
        scenario = json::parse(is);
    } catch (const std::exception& e) {
        std::cerr << "parse-error: " << e.what() << "\n";
        return 1;
    }
    try {
        std::string out = !out_dir_override.empty()
                              ? out_dir_override
                              : scenario.value("output_dir", std::string("pmfix-out"));
        RunResult r = run_scenario(scenario, out, seed_override);
        return r.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

json command_schema(const std::string& command) {
    if (command == "check-axioms") {
        return json{{"command", "check-axioms"},
                    {"payload",
                     {{"metrics", "array of metric specs {name, optional k/grid}"},
                      {"n_triples", "integer >= 1 (default 10000)"},
                      {"seed", "integer (default 42)"}}},
                    {"outputs", {"axiom_report_<metric>.json", "summary.json"}}};
    }
    if (command == "verify-contraction" || command == "fixed-point") {
        json schema{
            {"command", command},
            {"payload",
             {{"metric", "metric spec, e.g. {\"name\": \"mixed_metric\"}"},
              {"k", "domain bound / map parameter"},
              {"control_pair", "{name: linear|example22|section3, c?}"},
              {"maps", "builtin name or {f,g,S,T: {pieces: [{lo,hi,include_lo,include_hi,c0,c1}]}}"},
              {"order", "usual-leq"},
              {"grid", "{lo, hi, n}"},
              {"opts", "{tol, max_iters, window, tol_pre, x0 | seeds}"}}},
            {"outputs", {"hypothesis_report.json", "contraction_report.json", "summary.json"}}};
        if (command == "fixed-point") {
            schema["outputs"].push_back("trace_<i>.csv");
            schema["outputs"].push_back("uniqueness_report.json");
        }
        return schema;
    }
    if (command == "hausdorff") {
        return json{{"command", "hausdorff"},
                    {"payload",
                     {{"metric", "metric spec"},
                      {"sets", "array of 1-d coordinate arrays, or {generator: {seed, n_sets, min_size, max_size, grid}}"}}},
                    {"outputs", {"hausdorff_report.json", "summary.json"}}};
    }
    if (command == "ifs") {
        return json{{"command", "ifs"},
                    {"payload",
                     {{"system", "builtin name (sierpinski, dyadic); or give maps/family/params/metric/control_pair"},
                      {"maps", "[{type: affine, matrix, offset}]"},
                      {"family", "psi-phi | plain-contraction | exp-F | quadratic-F | sqrt-F"},
                      {"params", "{k} or {tau}"},
                      {"seed_set", "array of points"},
                      {"opts", "{tol, max_iters, merge_radius, raster: {width, height, xmin, ymin, xmax, ymax}}"},
                      {"family_pairs", "{n, seed} to sample the family predicate"}}},
                    {"outputs", {"hp_steps.csv", "attractor.csv", "attractor.ppm", "summary.json"}}};
    }
    if (command == "integral") {
        return json{{"command", "integral"},
                    {"payload",
                     {{"F", "linear | ramp"},
                      {"kappa", "linear | ramp"},
                      {"h", "number in [0, 1/4)"},
                      {"N", "grid nodes (default 201)"},
                      {"x0", "constant initial value (default 1)"},
                      {"control_pair", "{name, c?}"},
                      {"opts", "{tol, max_cycles}"}}},
                    {"outputs", {"condition_report.json", "solution.csv", "summary.json"}}};
    }
    throw std::invalid_argument("schema-error: unknown command " + command);
}

}  // namespace pmfix
