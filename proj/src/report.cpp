#include "fracjac/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "fracjac/errors.hpp"

namespace fracjac {

namespace {

Json number(double v)
{
    return std::isfinite(v) ? Json(v) : Json(nullptr);
}

double read_number(const Json& j, const char* key, double if_null)
{
    const auto it = j.find(key);
    if (it == j.end()) throw ConfigError(std::string("missing key '") + key + "'");
    if (it->is_null()) return if_null;
    if (!it->is_number()) throw ConfigError(std::string("key '") + key + "' must be a number");
    return it->get<double>();
}

template <class T>
T read(const Json& j, const char* key)
{
    const auto it = j.find(key);
    if (it == j.end()) throw ConfigError(std::string("missing key '") + key + "'");
    try {
        return it->get<T>();
    } catch (const Json::exception&) {
        throw ConfigError(std::string("key '") + key + "' has the wrong type");
    }
}

std::string csv_escape(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string csv_number(double v)
{
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
}

}  // namespace

Json report_to_json(const ExperimentReport& r)
{
    Json rows = Json::array();
    for (const auto& row : r.rows) {
        Json o = Json::object();
        for (const auto& [k, v] : row) o[k] = number(v);
        rows.push_back(o);
    }
    return Json{{"experiment", r.experiment},
                {"inputs", r.inputs},
                {"seed", r.seed},
                {"lhs", number(r.lhs)},
                {"rhs", number(r.rhs)},
                {"lhs_upper", number(r.lhs_upper)},
                {"abs_gap", number(r.abs_gap)},
                {"rel_gap", number(r.rel_gap)},
                {"standard_error", number(r.standard_error)},
                {"samples", r.samples},
                {"skipped", r.skipped},
                {"skip_fraction", number(r.skip_fraction)},
                {"singular_fraction", number(r.singular_fraction)},
                {"runtime_ms", number(r.runtime_ms)},
                {"tolerance", {{"rel", number(r.tol_rel)}, {"sigma", number(r.tol_sigma)}, {"abs", number(r.tol_abs)}}},
                {"unreliable", r.unreliable},
                {"pass", r.pass},
                {"rows", rows},
                {"notes", r.notes}};
}

ExperimentReport report_from_json(const Json& j)
{
    if (!j.is_object()) throw ConfigError("report must be a JSON object");
    ExperimentReport r;
    r.experiment = read<std::string>(j, "experiment");
    r.inputs = read<std::map<std::string, std::string>>(j, "inputs");
    r.seed = read<std::uint64_t>(j, "seed");
    r.lhs = read_number(j, "lhs", NAN);
    r.rhs = read_number(j, "rhs", NAN);
    r.lhs_upper = read_number(j, "lhs_upper", NAN);
    r.abs_gap = read_number(j, "abs_gap", INFINITY);
    r.rel_gap = read_number(j, "rel_gap", INFINITY);
    r.standard_error = read_number(j, "standard_error", -1.0);
    r.samples = read<std::size_t>(j, "samples");
    r.skipped = read<std::size_t>(j, "skipped");
    r.skip_fraction = read_number(j, "skip_fraction", 0.0);
    r.singular_fraction = read_number(j, "singular_fraction", 0.0);
    r.runtime_ms = read_number(j, "runtime_ms", 0.0);
    const Json tol = read<Json>(j, "tolerance");
    r.tol_rel = read_number(tol, "rel", INFINITY);
    r.tol_sigma = read_number(tol, "sigma", INFINITY);
    r.tol_abs = read_number(tol, "abs", INFINITY);
    r.unreliable = read<bool>(j, "unreliable");
    r.pass = read<bool>(j, "pass");
    for (const auto& row : read<Json>(j, "rows")) {
        std::map<std::string, double> m;
        for (const auto& [k, v] : row.items()) m[k] = v.is_null() ? NAN : v.get<double>();
        r.rows.push_back(m);
    }
    r.notes = read<std::vector<std::string>>(j, "notes");
    return r;
}

std::string report_csv(const ExperimentReport& r)
{
    std::set<std::string> keys;
    for (const auto& row : r.rows)
        for (const auto& [k, v] : row) keys.insert(k);
    std::ostringstream out;
    out << "experiment,seed,lhs,rhs,standard_error,pass";
    for (const auto& k : keys) out << ',' << csv_escape(k);
    out << '\n';
    const std::string prefix = csv_escape(r.experiment) + ',' + std::to_string(r.seed) + ',' + csv_number(r.lhs) +
                               ',' + csv_number(r.rhs) + ',' + csv_number(r.standard_error) + ',' +
                               (r.pass ? "1" : "0");
    if (r.rows.empty()) out << prefix << '\n';
    for (const auto& row : r.rows) {
        out << prefix;
        for (const auto& k : keys) {
            out << ',';
            const auto it = row.find(k);
            if (it != row.end()) out << csv_number(it->second);
        }
        out << '\n';
    }
    return out.str();
}

const std::vector<std::string>& RunConfig::commands()
{
    static const std::vector<std::string> names{"norm", "pairing", "extend", "degree", "flatnorm", "trace", "verify"};
    return names;
}

Json config_to_json(const RunConfig& c)
{
    return Json{{"command", c.command},   {"experiment", c.experiment},
                {"field", c.field},       {"second_field", c.second_field},
                {"domain", c.domain},     {"test", c.test},
                {"F", c.F},               {"set", c.set},
                {"mode", c.mode},         {"method", c.method},
                {"a", c.a},               {"probe", c.probe},
                {"slab", c.slab},         {"eps", c.eps},
                {"mollify", c.mollify},   {"s", number(c.s)},
                {"p", number(c.p)},       {"alpha", number(c.alpha)},
                {"t", number(c.t)},       {"radius", number(c.radius)},
                {"margin", number(c.margin)}, {"tol_rel", number(c.tol_rel)},
                {"tol_sigma", number(c.tol_sigma)}, {"seed", c.seed},
                {"samples", c.samples},   {"K", c.K},
                {"resolution", c.resolution}, {"workers", c.workers},
                {"out", c.out},           {"csv", c.csv},
                {"dump", c.dump},         {"atoms", c.atoms}};
}

RunConfig config_from_json(const Json& j)
{
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    const Json known = config_to_json(RunConfig{});
    for (const auto& [k, v] : j.items())
        if (!known.contains(k)) throw ConfigError("unknown config key '" + k + "'");
    RunConfig c;
    auto str = [&](const char* k, std::string& dst) {
        if (j.contains(k)) dst = read<std::string>(j, k);
    };
    auto list = [&](const char* k, std::vector<double>& dst) {
        if (j.contains(k)) dst = read<std::vector<double>>(j, k);
    };
    auto real = [&](const char* k, double& dst) {
        if (j.contains(k)) dst = read_number(j, k, NAN);
    };
    str("command", c.command);
    str("experiment", c.experiment);
    str("field", c.field);
    str("second_field", c.second_field);
    str("domain", c.domain);
    str("test", c.test);
    str("F", c.F);
    str("set", c.set);
    str("mode", c.mode);
    str("method", c.method);
    list("a", c.a);
    list("probe", c.probe);
    list("slab", c.slab);
    list("eps", c.eps);
    list("mollify", c.mollify);
    real("s", c.s);
    real("p", c.p);
    real("alpha", c.alpha);
    real("t", c.t);
    real("radius", c.radius);
    real("margin", c.margin);
    real("tol_rel", c.tol_rel);
    real("tol_sigma", c.tol_sigma);
    if (j.contains("seed")) c.seed = read<std::uint64_t>(j, "seed");
    if (j.contains("samples")) c.samples = read<std::uint64_t>(j, "samples");
    if (j.contains("K")) c.K = read<int>(j, "K");
    if (j.contains("resolution")) c.resolution = read<int>(j, "resolution");
    if (j.contains("workers")) c.workers = read<int>(j, "workers");
    str("out", c.out);
    str("csv", c.csv);
    str("dump", c.dump);
    str("atoms", c.atoms);
    if (!c.command.empty()) {
        const auto& cmds = RunConfig::commands();
        if (std::find(cmds.begin(), cmds.end(), c.command) == cmds.end())
            throw ConfigError("unknown command '" + c.command + "'");
    }
    return c;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError("config file '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

std::string config_hash(const RunConfig& c)
{
    Json j = config_to_json(c);
    for (const char* key : {"workers", "out", "csv", "dump"}) j.erase(key);
    const std::string text = j.dump();
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
    return hex.str();
}

void append_run_log(const std::filesystem::path& log, const RunConfig& c, const std::string& outcome, int exit_code)
{
    std::ofstream out(log, std::ios::app);
    if (!out) return;
    out << Json{{"hash", config_hash(c)},
                {"command", c.command},
                {"experiment", c.experiment},
                {"seed", c.seed},
                {"outcome", outcome},
                {"exit", exit_code}}
               .dump()
        << '\n';
}

}  // namespace fracjac
