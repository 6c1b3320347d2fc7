#include "fracjac/spec_string.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "fracjac/errors.hpp"

namespace fracjac {

namespace {

double to_double(std::string_view key, std::string_view value)
{
    std::string s(value);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (...) {
        used = 0;
    }
    if (used == 0 || used != s.size() || !std::isfinite(v)) {
        throw ConfigError("invalid numeric value for key '" + std::string(key) + "': '" + s + "'");
    }
    return v;
}

std::vector<std::string_view> split(std::string_view text, char sep)
{
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = text.find(sep, start);
        parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

}  // namespace

SpecString SpecString::parse(std::string_view text)
{
    SpecString spec;
    spec.text_ = std::string(text);
    const auto parts = split(text, ':');
    if (parts.empty() || parts.front().empty()) throw ConfigError("empty spec string");
    spec.name_ = std::string(parts.front());
    for (std::size_t i = 1; i < parts.size(); ++i) {
        const std::string_view part = parts[i];
        const std::size_t eq = part.find('=');
        if (eq == std::string_view::npos || eq == 0) {
            throw ConfigError("malformed key in '" + spec.text_ + "': '" + std::string(part) + "'");
        }
        const std::string key(part.substr(0, eq));
        if (spec.params_.count(key)) throw ConfigError("duplicate key '" + key + "' in '" + spec.text_ + "'");
        spec.params_[key] = std::string(part.substr(eq + 1));
    }
    return spec;
}

double SpecString::number(const std::string& key, double fallback) const
{
    const auto it = params_.find(key);
    return it == params_.end() ? fallback : to_double(key, it->second);
}

double SpecString::number(const std::string& key) const
{
    const auto it = params_.find(key);
    if (it == params_.end()) throw ConfigError("missing key '" + key + "' in '" + text_ + "'");
    return to_double(key, it->second);
}

int SpecString::integer(const std::string& key, int fallback) const
{
    const auto it = params_.find(key);
    if (it == params_.end()) return fallback;
    const double v = to_double(key, it->second);
    if (v != std::floor(v)) throw ConfigError("key '" + key + "' must be an integer in '" + text_ + "'");
    return static_cast<int>(v);
}

std::vector<double> SpecString::numbers(const std::string& key) const
{
    const auto it = params_.find(key);
    if (it == params_.end()) throw ConfigError("missing key '" + key + "' in '" + text_ + "'");
    return parse_real_list(it->second);
}

void SpecString::only(std::initializer_list<std::string_view> allowed) const
{
    for (const auto& [key, value] : params_) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError("unknown key '" + key + "' for '" + name_ + "'");
        }
    }
}

std::vector<double> parse_real_list(std::string_view text)
{
    std::vector<double> out;
    for (const auto part : split(text, ',')) out.push_back(to_double("list", part));
    return out;
}

}  // namespace fracjac
