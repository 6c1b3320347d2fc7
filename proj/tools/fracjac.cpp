// fracjac command-line tool.
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>

#include <CLI11.hpp>

#include "fracjac/degree.hpp"
#include "fracjac/errors.hpp"
#include "fracjac/extension.hpp"
#include "fracjac/field_library.hpp"
#include "fracjac/flat_norm.hpp"
#include "fracjac/frac_norms.hpp"
#include "fracjac/jacobian.hpp"
#include "fracjac/levelset.hpp"
#include "fracjac/measures.hpp"
#include "fracjac/mollifier.hpp"
#include "fracjac/parallel.hpp"
#include "fracjac/report.hpp"
#include "fracjac/spec_string.hpp"
#include "fracjac/verify.hpp"

using namespace fracjac;

namespace {

struct Outcome {
    Json out;
    bool pass = true;
    std::string csv;  // verify only
};

Json vec_json(const Vec& v)
{
    return Json(std::vector<double>(v.data(), v.data() + v.size()));
}

Vec to_vec(const std::vector<double>& v, const char* what)
{
    if (v.empty()) throw ConfigError(std::string("missing ") + what);
    return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::string require(const std::string& v, const char* key)
{
    if (v.empty()) throw ConfigError(std::string("missing --") + key);
    return v;
}

double pick(double configured, double fallback)
{
    return std::isnan(configured) ? fallback : configured;
}

Outcome run_norm(const RunConfig& c, std::size_t workers)
{
    const VectorField u = fields::lookup(require(c.field, "field"));
    const Domain omega = parse_domain(c.domain.empty() ? "square" : c.domain, c.resolution);
    Outcome o;
    o.out = {{"field", u.name()}, {"domain", omega.describe()}, {"s", c.s}, {"p", c.p},
             {"value", fractional_seminorm(u, omega, c.s, c.p, 0.0, workers)},
             {"lp", lp_norm(u, omega, c.p)}, {"resolution", omega.resolution()}};
    if (!std::isnan(c.alpha))
        o.out["holder"] = {{"alpha", c.alpha}, {"seminorm", holder_seminorm(u, omega, c.alpha, workers)},
                           {"norm", holder_norm(u, omega, c.alpha, workers)}};
    return o;
}

Outcome run_pairing(const RunConfig& c, std::size_t workers)
{
    const VectorField u = fields::lookup(require(c.field, "field"));
    const Domain omega = parse_domain(c.domain.empty() ? "square" : c.domain, c.resolution);
    const TestFunction psi = parse_test_function(require(c.test, "test"), omega.dimension());
    psi.check_support(omega);
    const std::string mode = c.mode.empty() ? "both" : c.mode;
    Outcome o;
    o.out = {{"field", u.name()}, {"domain", omega.describe()}, {"test", psi.name()}, {"mode", mode}};
    if (mode != "both" && mode != "divergence" && mode != "direct")
        throw ConfigError("unknown --mode '" + mode + "'");
    std::optional<double> div, dir;
    if (mode != "direct") o.out["divergence"] = *(div = jacobian_pairing(u, psi, omega, PairingMode::divergence, {}, workers));
    if (mode != "divergence") o.out["direct"] = *(dir = jacobian_pairing(u, psi, omega, PairingMode::direct, {}, workers));
    if (div && dir) {
        const double gap = std::abs(*div - *dir);
        o.out["gap"] = gap;
        o.pass = gap <= 1e-3 * std::max(std::abs(*dir), 1e-12);
    }
    return o;
}

Outcome run_extend(const RunConfig& c, std::size_t)
{
    const VectorField u = fields::lookup(require(c.field, "field"));
    const Domain omega = parse_domain(c.domain.empty() ? "square" : c.domain, c.resolution);
    const ExtensionField U(u, Mollifier(omega.dimension()), omega);
    const Vec x = to_vec(c.probe, "--probe");
    Vec value;
    Mat joint;
    U.evaluate(x, c.t, value, joint);
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < joint.rows(); ++i) rows.push_back(vec_json(joint.row(i).transpose()));
    Outcome o;
    o.out = {{"field", u.name()}, {"domain", omega.describe()}, {"t", c.t}, {"x", vec_json(x)},
             {"value", vec_json(value)}, {"joint_gradient", rows}, {"nodes_per_axis", U.nodes_per_axis(c.t)}};
    return o;
}

Outcome run_degree(const RunConfig& c, std::size_t workers)
{
    const VectorField u = fields::lookup(require(c.field, "field"));
    const Domain omega = parse_domain(c.domain.empty() ? "disk" : c.domain, c.resolution);
    const Vec a = to_vec(c.a, "--a");
    const std::string method = c.method.empty() ? "all" : c.method;
    if (method != "all" && method != "preimage" && method != "boundary" && method != "changevar")
        throw ConfigError("unknown --method '" + method + "'");
    const DegreeSolver solver(u, omega, workers);
    Outcome o;
    o.out = {{"field", u.name()}, {"domain", omega.describe()}, {"a", vec_json(a)}};
    std::vector<double> values;
    if (method == "all" || method == "preimage") {
        const DegreeReport r = solver.preimage(a);
        Json pre = Json::array();
        for (const auto& p : r.preimages) pre.push_back({{"x", vec_json(p.x)}, {"det", p.det}});
        o.out["preimage"] = {{"degree", r.degree}, {"min_abs_det", r.min_abs_det}, {"preimages", pre}};
        values.push_back(r.degree);
    }
    if (method == "all" || method == "boundary") {
        const DegreeReport r = solver.boundary(a);
        o.out["boundary"] = {{"degree", r.degree}, {"raw", r.raw}, {"integral", r.integral},
                             {"boundary_distance", r.boundary_distance}};
        values.push_back(r.raw);
        o.pass = o.pass && r.integral;
    }
    if (method == "all" || method == "changevar") {
        // Narrow bump around a, well inside the complement of u(boundary).
        const double dist = solver.boundary_image().distance(a);
        const double r = std::min(0.1, 0.5 * dist);
        if (!(r > 0.0)) throw BoundaryValue("target lies on the boundary image", dist);
        const TestFunction psi = TestFunction::bump(a, r, 1.0);
        const double mass = bump_integral(omega.dimension(), r, 1.0);
        const double raw = degree_changevar(u, omega, psi, workers) / mass;
        o.out["changevar"] = {{"degree", std::lround(raw)}, {"raw", raw}, {"bump_radius", r}};
        values.push_back(raw);
    }
    double spread = 0.0;
    for (double v : values) spread = std::max(spread, std::abs(v - values.front()));
    o.out["max_disagreement"] = spread;
    o.pass = o.pass && spread < 0.02 * std::max(1.0, std::abs(values.front()));
    o.out["agree"] = o.pass;
    return o;
}

Outcome run_flatnorm(const RunConfig& c, std::size_t)
{
    const Domain omega = parse_domain(c.domain.empty() ? "square" : c.domain, c.resolution);
    std::ifstream in(require(c.atoms, "atoms"));
    if (!in) throw ConfigError("cannot read atoms file '" + c.atoms + "'");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError(std::string("atoms file is not valid JSON: ") + e.what());
    }
    if (!j.is_array()) throw ConfigError("atoms file must hold an array of {x, sign}");
    AtomicMeasure mu;
    for (const auto& item : j) {
        if (!item.is_object() || !item.contains("x") || !item.contains("sign"))
            throw ConfigError("each atom needs keys 'x' and 'sign'");
        for (const auto& [k, v] : item.items())
            if (k != "x" && k != "sign") throw ConfigError("unknown atom key '" + k + "'");
        const int sign = item["sign"].get<int>();
        if (sign != 1 && sign != -1) throw ConfigError("atom sign must be +1 or -1");
        mu.atoms.push_back({to_vec(item["x"].get<std::vector<double>>(), "atom position"), sign});
    }
    const FlatNormResult r = flat_norm(mu, omega);
    Json matching = Json::array();
    for (const auto& m : r.matching)
        matching.push_back({{"positive", m.positive}, {"negative", m.negative}, {"cost", m.cost}});
    Outcome o;
    o.out = {{"domain", omega.describe()}, {"atoms", mu.atoms.size()}, {"value", r.value},
             {"matching", matching}, {"certificate_gap", r.certificate_gap}};
    return o;
}

Json curve_json(const LevelCurve& curve)
{
    Json pts = Json::array();
    for (const auto& v : curve.vertices) pts.push_back(vec_json(v));
    return {{"start", to_string(curve.start.kind)}, {"end", to_string(curve.end.kind)},
            {"start_sign", curve.start.sign},       {"end_sign", curve.end.sign},
            {"closed", curve.closed},               {"length", curve.length},
            {"points", pts}};
}

Outcome run_trace(const RunConfig& c, std::size_t workers)
{
    const VectorField u = fields::lookup(require(c.field, "field"));
    const Domain omega = parse_domain(c.domain.empty() ? "square" : c.domain, c.resolution);
    const Vec a = to_vec(c.a, "--a");
    const std::vector<double> slab = c.slab.empty() ? std::vector<double>{0.05, 0.2} : c.slab;
    if (slab.size() != 2) throw ConfigError("--slab takes two values t_lo,t_hi");
    const ExtensionField U(u, Mollifier(omega.dimension()), omega);
    const LevelSetTracer tracer(U, slab[0], slab[1], {}, workers);
    const CauchyCheck check = cauchy_gap_check(tracer, a);
    Json curves = Json::array();
    for (const auto& curve : check.trace.curves) curves.push_back(curve_json(curve));
    Outcome o;
    o.out = {{"field", u.name()},
             {"domain", omega.describe()},
             {"a", vec_json(a)},
             {"slab", slab},
             {"curves", check.trace.curves.size()},
             {"total_length", check.trace.total_length()},
             {"flat_norm_gap", check.lhs},
             {"length_bound", check.rhs},
             {"unmatched_atoms", check.trace.unmatched_atoms.size()},
             {"complete", check.trace.complete}};
    o.pass = check.trace.complete && check.lhs <= 1.02 * check.rhs + 1e-12;
    if (!c.dump.empty()) {
        std::ofstream dump(c.dump);
        if (!dump) throw ConfigError("cannot write --dump file '" + c.dump + "'");
        dump << Json{{"field", u.name()}, {"a", vec_json(a)}, {"slab", slab}, {"curves", curves}}.dump(2) << '\n';
    }
    return o;
}

Outcome run_verify(const RunConfig& c, std::size_t workers)
{
    const std::string& name = c.experiment;
    const auto names = experiment_names();
    if (std::find(names.begin(), names.end(), name) == names.end())
        throw ConfigError("unknown experiment '" + name + "'");
    const Domain omega = parse_domain(c.domain.empty() ? "square" : c.domain, c.resolution);
    const VectorField u = fields::lookup(require(c.field, "field"));
    SamplerSpec sampler;
    sampler.seed = c.seed;
    sampler.samples = c.samples;
    sampler.margin = c.margin;
    const std::vector<double> mollify = c.mollify.empty() ? std::vector<double>{0.02, 0.04} : c.mollify;
    auto change = [&] {
        const ChangeOfVariables f = parse_change_of_variables(c.F.empty() ? "identity" : c.F);
        f.check_lipschitz();
        return f;
    };
    auto test = [&] { return parse_test_function(require(c.test, "test"), omega.dimension()); };

    ExperimentReport r;
    if (name == "weak_coarea") {
        r = weak_coarea_experiment(u, test(), omega, sampler, mollify, workers);
    } else if (name == "weak_chain") {
        r = weak_chain_experiment(u, change(), test(), omega, sampler, mollify, workers);
    } else if (name == "strong_chain") {
        r = strong_chain_experiment(u, change(), test(), omega, workers);
    } else if (name == "strong_coarea") {
        r = strong_coarea_experiment(u, omega, sampler, c.K, workers);
    } else if (name == "holder_chain") {
        HolderChainOptions options;
        if (!c.eps.empty()) options.eps = c.eps;
        options.alpha_norm = pick(c.alpha, options.alpha_norm);
        options.tol_rel = pick(c.tol_rel, options.tol_rel);
        options.tol_sigma = pick(c.tol_sigma, options.tol_sigma);
        r = holder_chain_experiment(u, change(), parse_lipschitz_set(c.set.empty() ? "circle:r=0.5" : c.set), omega,
                                    sampler, options, workers);
    } else if (name == "ua_continuity") {
        const VectorField w = fields::lookup(c.second_field.empty() ? "perturbation:eps=1" : c.second_field);
        const std::vector<double> eps = c.eps.empty() ? std::vector<double>{0.2, 0.1, 0.05, 0.025} : c.eps;
        r = ua_continuity_experiment(u, w, eps, c.s, c.p, c.radius, omega, sampler, workers);
    } else {
        const VectorField v = fields::lookup(require(c.second_field, "second_field"));
        r = stability_experiment(u, v, test(), omega, pick(c.alpha, 0.75), workers);
    }
    if (name != "holder_chain" && (!std::isnan(c.tol_rel) || !std::isnan(c.tol_sigma))) {
        r.tol_rel = pick(c.tol_rel, r.tol_rel);
        r.tol_sigma = pick(c.tol_sigma, r.tol_sigma);
        finalize_gap(r);
    }
    Outcome o;
    o.out = report_to_json(r);
    o.pass = r.pass;
    o.csv = report_csv(r);
    return o;
}

Outcome dispatch(const RunConfig& c, std::size_t workers)
{
    if (c.command == "norm") return run_norm(c, workers);
    if (c.command == "pairing") return run_pairing(c, workers);
    if (c.command == "extend") return run_extend(c, workers);
    if (c.command == "degree") return run_degree(c, workers);
    if (c.command == "flatnorm") return run_flatnorm(c, workers);
    if (c.command == "trace") return run_trace(c, workers);
    return run_verify(c, workers);
}

std::string utc_now()
{
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << text;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Distributional Jacobians, degree and coarea checks"};
    app.require_subcommand(1);
    RunConfig cfg;
    std::string a_text, probe_text, slab_text, config_path;
    bool no_timestamp = false;
    std::string run_log = std::getenv("FRACJAC_RUN_LOG") ? std::getenv("FRACJAC_RUN_LOG") : "fracjac_runs.jsonl";

    std::map<std::string, CLI::Option*> given;
    auto common = [&](CLI::App* sub) {
        given["field"] = sub->add_option("--field", cfg.field, "field spec, e.g. winding:k=2");
        given["domain"] = sub->add_option("--domain", cfg.domain, "domain spec, e.g. disk:r=1:res=64");
        given["test"] = sub->add_option("--test", cfg.test, "test function, e.g. bump:r=0.3");
        given["F"] = sub->add_option("--F", cfg.F, "change of variables, e.g. sinpert:eps=0.1");
        given["a"] = sub->add_option("--a", a_text, "target point, e.g. 0.5,0");
        given["s"] = sub->add_option("--s", cfg.s, "fractional order");
        given["p"] = sub->add_option("--p", cfg.p, "integrability exponent");
        given["alpha"] = sub->add_option("--alpha", cfg.alpha, "Hölder exponent");
        given["seed"] = sub->add_option("--seed", cfg.seed, "random seed");
        given["workers"] = sub->add_option("--workers", cfg.workers, "worker threads (default: FRACJAC_WORKERS or all)");
        given["out"] = sub->add_option("--out", cfg.out, "write JSON here as well as to stdout");
        given["csv"] = sub->add_option("--csv", cfg.csv, "write flat CSV rows here");
        given["resolution"] = sub->add_option("--resolution", cfg.resolution, "default domain resolution");
        sub->add_flag("--no-timestamp", no_timestamp, "omit timestamp and runtime from the output");
        sub->add_option("--run-log", run_log, "append-only run log");
    };
    auto* norm = app.add_subcommand("norm", "fractional Sobolev and Hölder norms");
    common(norm);
    auto* pairing = app.add_subcommand("pairing", "distributional Jacobian pairing <Ju, psi>");
    common(pairing);
    given["mode"] = pairing->add_option("--mode", cfg.mode, "divergence, direct or both");
    auto* extend = app.add_subcommand("extend", "mollified extension U(x, t)");
    common(extend);
    given["t"] = extend->add_option("--t", cfg.t, "mollification scale in (0, 1)");
    given["probe"] = extend->add_option("--probe", probe_text, "point x, e.g. 0.3,0.4");
    auto* degree = app.add_subcommand("degree", "Brouwer degree by three methods");
    common(degree);
    given["method"] = degree->add_option("--method", cfg.method, "preimage, boundary, changevar or all");
    auto* flat = app.add_subcommand("flatnorm", "flat norm of an atomic measure");
    common(flat);
    given["atoms"] = flat->add_option("--atoms", cfg.atoms, "JSON file [{x: [..], sign: +-1}]");
    auto* trace = app.add_subcommand("trace", "trace U^{-1}(a) over a slab");
    common(trace);
    given["slab"] = trace->add_option("--slab", slab_text, "t_lo,t_hi");
    given["dump"] = trace->add_option("--dump", cfg.dump, "write polylines as JSON");
    auto* verify = app.add_subcommand("verify", "run a verification experiment");
    common(verify);
    given["experiment"] = verify->add_option("experiment", cfg.experiment, "experiment name")->required();
    verify->add_option("--config", config_path, "JSON run configuration");
    given["samples"] = verify->add_option("--samples", cfg.samples, "Monte Carlo samples");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    auto count = [&](const char* key) { return given.count(key) && given[key]->count() > 0; };
    int code = 2;
    std::string outcome = "error";
    try {
        for (auto* sub : app.get_subcommands()) cfg.command = sub->get_name();
        if (!config_path.empty()) {
            // Flags given on the command line override the file.
            const RunConfig flags = cfg;
            RunConfig file = load_config(config_path);
            if (!file.command.empty() && file.command != cfg.command)
                throw ConfigError("config is for command '" + file.command + "'");
            file.command = cfg.command;
            if (!file.experiment.empty() && file.experiment != flags.experiment)
                throw ConfigError("config names experiment '" + file.experiment + "'");
            for (const char* key : {"field", "domain", "test", "F", "seed", "workers", "out", "csv", "samples",
                                    "resolution", "s", "p", "alpha", "experiment"}) {
                if (!count(key)) continue;
                const std::string k = key;
                if (k == "field") file.field = flags.field;
                if (k == "domain") file.domain = flags.domain;
                if (k == "test") file.test = flags.test;
                if (k == "F") file.F = flags.F;
                if (k == "seed") file.seed = flags.seed;
                if (k == "workers") file.workers = flags.workers;
                if (k == "out") file.out = flags.out;
                if (k == "csv") file.csv = flags.csv;
                if (k == "samples") file.samples = flags.samples;
                if (k == "resolution") file.resolution = flags.resolution;
                if (k == "s") file.s = flags.s;
                if (k == "p") file.p = flags.p;
                if (k == "alpha") file.alpha = flags.alpha;
                if (k == "experiment") file.experiment = flags.experiment;
            }
            cfg = file;
        }
        if (!a_text.empty()) cfg.a = parse_real_list(a_text);
        if (!probe_text.empty()) cfg.probe = parse_real_list(probe_text);
        if (!slab_text.empty()) cfg.slab = parse_real_list(slab_text);

        std::size_t workers = 0;
        if (cfg.workers > 0) {
            workers = static_cast<std::size_t>(cfg.workers);
        } else if (const char* env = std::getenv("FRACJAC_WORKERS")) {
            try {
                const int w = std::stoi(env);
                if (w > 0) workers = static_cast<std::size_t>(w);
            } catch (const std::exception&) {
                throw ConfigError("FRACJAC_WORKERS must be a positive integer");
            }
        }
        if (workers > 0) set_default_workers(workers);

        const auto start = std::chrono::steady_clock::now();
        Outcome o = dispatch(cfg, workers);
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        o.out["command"] = cfg.command;
        o.out["config_hash"] = config_hash(cfg);
        o.out["pass"] = o.pass;
        if (no_timestamp) {
            o.out.erase("runtime_ms");
        } else {
            o.out["timestamp"] = utc_now();
            if (!o.out.contains("runtime_ms")) o.out["runtime_ms"] = ms;
        }
        const std::string text = o.out.dump(2) + "\n";
        std::cout << text;
        if (!cfg.out.empty()) write_file(cfg.out, text);
        if (!cfg.csv.empty() && !o.csv.empty()) write_file(cfg.csv, o.csv);
        code = o.pass ? 0 : 1;
        outcome = o.pass ? "pass" : "fail";
    } catch (const ConfigError& e) {
        std::cerr << "fracjac: " << e.what() << '\n';
    } catch (const LookupError& e) {
        std::cerr << "fracjac: " << e.what() << '\n';
    } catch (const InvalidParameter& e) {
        std::cerr << "fracjac: invalid parameter: " << e.what() << '\n';
    } catch (const InvalidGeometry& e) {
        std::cerr << "fracjac: invalid geometry: " << e.what() << '\n';
    } catch (const Error& e) {
        std::cerr << "fracjac: " << e.what() << '\n';
        code = 1;
        outcome = "fail";
    } catch (const std::exception& e) {
        std::cerr << "fracjac: " << e.what() << '\n';
        code = 1;
        outcome = "fail";
    }
    if (!run_log.empty()) append_run_log(run_log, cfg, outcome, code);
    return code;
}
