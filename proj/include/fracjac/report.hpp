#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracjac/verify.hpp"

namespace fracjac {

using Json = nlohmann::json;

/// Non-finite numbers are written as null.
Json report_to_json(const ExperimentReport& r);
/// Inverse of report_to_json. Throws ConfigError on missing or mistyped keys.
ExperimentReport report_from_json(const Json& j);
/// One header line plus one line per row; report scalars are repeated on
/// every line. A report without rows yields a single data line.
std::string report_csv(const ExperimentReport& r);

/// Everything needed to reproduce one CLI invocation. NaN numeric fields
/// mean "use the command's default".
struct RunConfig {
    std::string command;  // norm, pairing, extend, degree, flatnorm, trace, verify
    std::string experiment;
    std::string field;
    std::string second_field;  // v for stability, w for ua_continuity
    std::string domain;
    std::string test;
    std::string F;
    std::string set;
    std::string mode;
    std::string method;
    std::vector<double> a;
    std::vector<double> probe;
    std::vector<double> slab;
    std::vector<double> eps;
    std::vector<double> mollify;
    double s = 0.5;
    double p = 2.0;
    double alpha = std::numeric_limits<double>::quiet_NaN();
    double t = 0.1;
    double radius = 0.5;
    double margin = 0.2;
    double tol_rel = std::numeric_limits<double>::quiet_NaN();
    double tol_sigma = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t seed = 42;
    std::uint64_t samples = 5000;
    int K = 256;
    int resolution = 64;
    int workers = 0;
    std::string out;
    std::string csv;
    std::string dump;
    std::string atoms;

    static const std::vector<std::string>& commands();
};

Json config_to_json(const RunConfig& c);
/// Rejects unknown keys and unknown commands with ConfigError. Missing keys
/// keep their defaults.
RunConfig config_from_json(const Json& j);
RunConfig load_config(const std::filesystem::path& path);
/// SHA-256 (hex) of the canonical serialization, leaving out the worker
/// count and output paths (they do not change the result).
std::string config_hash(const RunConfig& c);
/// Appends one JSON line {hash, command, experiment, seed, outcome, exit}.
void append_run_log(const std::filesystem::path& log, const RunConfig& c, const std::string& outcome, int exit_code);

}  // namespace fracjac
