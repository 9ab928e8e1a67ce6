#include "wfrlab/config.hpp"

#include "wfrlab/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace wfr {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        throw ConfigError("field '" + key + "': not a number: '" + t + "'");
    }
    if (used != t.size()) throw ConfigError("field '" + key + "': not a number: '" + t + "'");
    if (!std::isfinite(v)) throw ConfigError("field '" + key + "': non-finite value");
    return v;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
    std::string t = trim(text);
    if (t.empty()) throw ConfigError("field '" + key + "': empty value");
    if (t.front() == '[') {
        if (t.back() != ']') throw ConfigError("field '" + key + "': unterminated list");
        t = t.substr(1, t.size() - 2);
    } else {
        return {parse_number(key, t)};
    }
    std::vector<double> out;
    std::stringstream ss(t);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number(key, item));
    if (out.empty()) throw ConfigError("field '" + key + "': empty list");
    return out;
}

/// "field 'k': message" -> "message"
std::string strip_field(const std::string& what) {
    const auto p = what.find("': ");
    return p == std::string::npos ? what : what.substr(p + 3);
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_list(const std::vector<double>& v) {
    if (v.size() == 1) return format_double(v[0]);
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_double(v[i]);
    return s + "]";
}

Config Config::parse(const std::string& text, const std::string& source) {
    Config c;
    std::stringstream ss(text);
    std::string line;
    int no = 0;
    while (std::getline(ss, line)) {
        ++no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(source + ":" + std::to_string(no) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError(source + ":" + std::to_string(no) + ": empty key");
        const std::string value = trim(line.substr(eq + 1));
        if (value.empty()) throw ConfigError(source + ":" + std::to_string(no) + ": empty value for '" + key + "'");
        c.values_[key] = value;
        c.origins_[key] = source + ":" + std::to_string(no);
    }
    return c;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

void Config::set_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || trim(assignment.substr(0, eq)).empty())
        throw ConfigError("override '" + assignment + "': expected key=value");
    const std::string key = trim(assignment.substr(0, eq));
    set(key, trim(assignment.substr(eq + 1)));
    origins_[key] = "command line";
}

void Config::set(const std::string& key, const std::string& value) {
    if (value.empty()) throw ConfigError("field '" + key + "': empty value");
    values_[key] = value;
    origins_.erase(key);
}

void Config::fail(const std::string& key, const std::string& message) const {
    const auto it = origins_.find(key);
    const std::string where = it == origins_.end() ? "" : it->second + ": ";
    throw ConfigError(where + "field '" + key + "': " + message);
}

double Config::get_double(const std::string& key, double def) const {
    const auto it = values_.find(key);
    double v = def;
    if (it != values_.end()) {
        try {
            v = parse_number(key, it->second);
        } catch (const ConfigError& e) {
            fail(key, strip_field(e.what()));
        }
    }
    resolved_[key] = format_double(v);
    return v;
}

int Config::get_int(const std::string& key, int def) const {
    const double v = get_double(key, def);
    if (v != std::floor(v) || std::abs(v) > 2e9) fail(key, "not an integer");
    resolved_[key] = std::to_string(static_cast<int>(v));
    return static_cast<int>(v);
}

std::string Config::get_string(const std::string& key, const std::string& def) const {
    const auto it = values_.find(key);
    const std::string v = it == values_.end() ? def : it->second;
    resolved_[key] = v;
    return v;
}

std::vector<double> Config::get_list(const std::string& key, const std::vector<double>& def) const {
    const auto it = values_.find(key);
    std::vector<double> v = def;
    if (it != values_.end()) {
        try {
            v = parse_list(key, it->second);
        } catch (const ConfigError& e) {
            fail(key, strip_field(e.what()));
        }
    }
    resolved_[key] = format_list(v);
    return v;
}

std::optional<double> Config::get_optional_double(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return get_double(key, 0.0);
}

Vec Config::get_vector(const std::string& key, const Vec& def) const {
    const std::vector<double> v = get_list(key, std::vector<double>(def.data(), def.data() + def.size()));
    return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Mat Config::get_covariance(const std::string& key, const Mat& def, int dim) const {
    std::vector<double> d;
    for (int i = 0; i < def.rows(); ++i)
        for (int j = 0; j < def.cols(); ++j) d.push_back(def(i, j));
    const bool diag_default = def.isDiagonal();
    if (diag_default) {
        d.clear();
        for (int i = 0; i < def.rows(); ++i) d.push_back(def(i, i));
    }
    const std::vector<double> v = get_list(key, d);
    Mat m;
    if (static_cast<int>(v.size()) == dim) {
        m = Mat::Zero(dim, dim);
        for (int i = 0; i < dim; ++i) m(i, i) = v[i];
    } else if (static_cast<int>(v.size()) == dim * dim) {
        m.resize(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) m(i, j) = v[i * dim + j];
    } else {
        fail(key, dim == 1 ? "expected 1 entry, got " + std::to_string(v.size())
                           : "expected " + std::to_string(dim) + " or " + std::to_string(dim * dim) +
                                 " entries, got " + std::to_string(v.size()));
    }
    if (max_abs(m - m.transpose()) > 1e-12 * max_abs(m)) fail(key, "matrix is not symmetric");
    Eigen::SelfAdjointEigenSolver<Mat> es(m);
    const double hi = es.eigenvalues().maxCoeff();
    if (!(hi > 0.0) || es.eigenvalues().minCoeff() <= 1e-12 * hi)
        fail(key, "covariance is not SPD");
    return m;
}

std::vector<std::string> Config::unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_)
        if (!resolved_.count(k)) out.push_back(k);
    return out;
}

std::string Config::resolved_line() const {
    std::string s;
    for (const auto& [k, v] : resolved_) s += (s.empty() ? "" : "; ") + k + "=" + v;
    return s;
}

}  // namespace wfr
