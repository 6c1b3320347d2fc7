#pragma once

#include <initializer_list>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace fracjac {

/// Parsed form of the `name:key=value:key=value` grammar used to name
/// fields, domains, test functions and changes of variables on the command
/// line.
class SpecString {
public:
    static SpecString parse(std::string_view text);

    const std::string& name() const { return name_; }
    const std::string& text() const { return text_; }
    bool has(const std::string& key) const { return params_.count(key) != 0; }

    double number(const std::string& key, double fallback) const;
    double number(const std::string& key) const;
    int integer(const std::string& key, int fallback) const;
    std::vector<double> numbers(const std::string& key) const;  // comma separated

    /// Throws ConfigError naming the first key not in `allowed`.
    void only(std::initializer_list<std::string_view> allowed) const;

private:
    std::string text_;
    std::string name_;
    std::map<std::string, std::string> params_;
};

/// Parses "0.5,0" style comma separated reals.
std::vector<double> parse_real_list(std::string_view text);

}  // namespace fracjac
