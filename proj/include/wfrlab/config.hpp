#pragma once

#include "wfrlab/linalg.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace wfr {

/// Flat `key = value` configuration. Lists use `[a, b, c]`.
/// Every getter records the value it resolved (default or given), so the
/// full resolved configuration can be echoed into output headers.
class Config {
public:
    /// Throws ConfigError with the line number on malformed input.
    static Config parse(const std::string& text, const std::string& source = "config");
    static Config load(const std::string& path);

    /// Apply a `key=value` override.
    void set_override(const std::string& assignment);
    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const { return values_.count(key) > 0; }

    double get_double(const std::string& key, double def) const;
    int get_int(const std::string& key, int def) const;
    std::string get_string(const std::string& key, const std::string& def) const;
    std::vector<double> get_list(const std::string& key, const std::vector<double>& def) const;
    std::optional<double> get_optional_double(const std::string& key) const;

    /// Mean vector and covariance. A covariance list of length d is a diagonal,
    /// length d^2 a full row-major matrix.
    Vec get_vector(const std::string& key, const Vec& def) const;
    Mat get_covariance(const std::string& key, const Mat& def, int dim) const;

    /// Throws ConfigError naming the key and where it was set (file:line or command line).
    [[noreturn]] void fail(const std::string& key, const std::string& message) const;

    /// Keys present in the file/overrides that no getter asked for.
    std::vector<std::string> unused_keys() const;
    /// "k1=v1; k2=v2; ..." over every resolved key, sorted.
    std::string resolved_line() const;
    const std::map<std::string, std::string>& resolved() const { return resolved_; }

private:
    std::map<std::string, std::string> values_;
    std::map<std::string, std::string> origins_;
    mutable std::map<std::string, std::string> resolved_;
};

std::string format_double(double v);
std::string format_list(const std::vector<double>& v);

}  // namespace wfr
