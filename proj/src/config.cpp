#include "memctrl/config.hpp"

#include <cctype>
#include <cmath>
#include <map>
#include <sstream>

#include "memctrl/serialize.hpp"

namespace memctrl {

namespace {

struct TomlValue {
    enum class Type { Number, Boolean, String, Array } type = Type::Number;
    double number = 0.0;
    bool boolean = false;
    std::string string;
    std::vector<double> array;  // numeric arrays only
    int line = 0;
};

// Minimal TOML subset: [section] headers, key = value lines, # comments,
// values are numbers, booleans, quoted strings or arrays of numbers.
std::map<std::string, TomlValue> parse_toml(const std::string& text) {
    std::map<std::string, TomlValue> out;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line;
        bool in_string = false;
        for (char c : raw) {
            if (c == '"') in_string = !in_string;
            if (c == '#' && !in_string) break;
            line += c;
        }
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);

        if (line.front() == '[') {
            if (line.back() != ']')
                throw ParseError("unterminated section header", lineno,
                                 static_cast<int>(line.size()));
            section = line.substr(1, line.size() - 2);
            if (section.empty()) throw ParseError("empty section name", lineno, 1);
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("expected key = value", lineno, static_cast<int>(first) + 1);
        std::string key = line.substr(0, eq);
        key.erase(key.find_last_not_of(" \t") + 1);
        if (key.empty()) throw ParseError("empty key", lineno, 1);
        std::string value = line.substr(eq + 1);
        value.erase(0, value.find_first_not_of(" \t"));
        if (value.empty())
            throw ParseError("missing value for key '" + key + "'", lineno,
                             static_cast<int>(eq) + 2);

        TomlValue v;
        v.line = lineno;
        if (value.front() == '"') {
            if (value.size() < 2 || value.back() != '"')
                throw ParseError("unterminated string", lineno, static_cast<int>(eq) + 2);
            v.type = TomlValue::Type::String;
            v.string = value.substr(1, value.size() - 2);
        } else if (value == "true" || value == "false") {
            v.type = TomlValue::Type::Boolean;
            v.boolean = (value == "true");
        } else if (value.front() == '[') {
            if (value.back() != ']')
                throw ParseError("unterminated array", lineno, static_cast<int>(eq) + 2);
            v.type = TomlValue::Type::Array;
            std::string body = value.substr(1, value.size() - 2);
            std::istringstream items(body);
            std::string item;
            while (std::getline(items, item, ',')) {
                item.erase(0, item.find_first_not_of(" \t"));
                item.erase(item.find_last_not_of(" \t") + 1);
                if (item.empty()) continue;
                try {
                    std::size_t pos = 0;
                    double d = std::stod(item, &pos);
                    if (pos != item.size()) throw std::invalid_argument(item);
                    v.array.push_back(d);
                } catch (const std::exception&) {
                    throw ParseError("bad array element '" + item + "'", lineno,
                                     static_cast<int>(eq) + 2);
                }
            }
        } else {
            try {
                std::size_t pos = 0;
                v.number = std::stod(value, &pos);
                if (pos != value.size()) throw std::invalid_argument(value);
                v.type = TomlValue::Type::Number;
            } catch (const std::exception&) {
                throw ParseError("bad value '" + value + "' for key '" + key + "'", lineno,
                                 static_cast<int>(eq) + 2);
            }
        }
        std::string full = section.empty() ? key : section + "." + key;
        if (out.count(full)) throw ParseError("duplicate key '" + full + "'", lineno, 1);
        out[full] = v;
    }
    return out;
}

const std::vector<std::string> kKnownKeys = {
    "kernel.alpha",        "kernel.beta",         "kernel.nu",
    "system.modes",        "system.grid_points",  "system.p",
    "time.T",              "time.steps",          "time.grid_kind",
    "time.grading",        "control.operator_kind", "control.kill_mode",
    "control.lambda_sequence", "problem.zeta",    "problem.zeta1",
    "nonlinearity.kind",   "nonlinearity.k0",     "nonlinearity.mu",
    "outputs.directory",   "outputs.formats",
};

double require_number(const std::map<std::string, TomlValue>& kv, const std::string& key,
                      double fallback) {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    if (it->second.type != TomlValue::Type::Number)
        throw ValidationError(key + " must be a number");
    return it->second.number;
}

std::string require_string(const std::map<std::string, TomlValue>& kv, const std::string& key,
                           const std::string& fallback) {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    if (it->second.type != TomlValue::Type::String)
        throw ValidationError(key + " must be a string");
    return it->second.string;
}

int require_int(const std::map<std::string, TomlValue>& kv, const std::string& key, int fallback) {
    double d = require_number(kv, key, fallback);
    if (d != std::floor(d)) throw ValidationError(key + " must be an integer");
    return static_cast<int>(d);
}

}  // namespace

StateSpec StateSpec::parse(const std::string& text) {
    StateSpec s;
    auto open = text.find('(');
    auto close = text.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open)
        throw ValidationError("state spec must look like single_mode(1) or decaying(1, 1): '" +
                              text + "'");
    std::string name = text.substr(0, open);
    std::string args = text.substr(open + 1, close - open - 1);
    std::vector<double> nums;
    std::istringstream in(args);
    std::string item;
    while (std::getline(in, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty()) nums.push_back(std::stod(item));
    }
    if (name == "single_mode") {
        if (nums.size() != 1) throw ValidationError("single_mode takes one argument");
        s.kind = Kind::SingleMode;
        s.mode = static_cast<int>(nums[0]);
        if (s.mode < 1) throw ValidationError("single_mode index must be >= 1");
    } else if (name == "decaying") {
        if (nums.size() != 2) throw ValidationError("decaying takes (c, rate)");
        s.kind = Kind::Decaying;
        s.c = nums[0];
        s.rate = nums[1];
    } else if (name == "zero") {
        s.kind = Kind::Explicit;
        s.coefficients.clear();
    } else {
        throw ValidationError("unknown state spec '" + name + "'");
    }
    return s;
}

StateSpec StateSpec::explicit_coeffs(const std::vector<double>& coeffs) {
    StateSpec s;
    s.kind = Kind::Explicit;
    s.coefficients = coeffs;
    return s;
}

Vector StateSpec::build(int modes) const {
    Vector v = Vector::Zero(modes);
    switch (kind) {
        case Kind::SingleMode:
            if (mode > modes) throw ValidationError("state spec mode exceeds system modes");
            v[mode - 1] = 1.0;
            break;
        case Kind::Decaying:
            for (int m = 0; m < modes; ++m) v[m] = c / std::pow(double(m + 1), rate);
            break;
        case Kind::Explicit:
            for (std::size_t i = 0; i < coefficients.size() && static_cast<int>(i) < modes; ++i)
                v[i] = coefficients[i];
            break;
    }
    return v;
}

std::string StateSpec::describe() const {
    switch (kind) {
        case Kind::SingleMode:
            return "single_mode(" + std::to_string(mode) + ")";
        case Kind::Decaying:
            return "decaying(" + format_double(c) + ", " + format_double(rate) + ")";
        case Kind::Explicit:
            return "explicit[" + std::to_string(coefficients.size()) + "]";
    }
    return "?";
}

TimeGrid ScenarioConfig::time_grid() const {
    if (grid_kind == "uniform") return TimeGrid::uniform(T, steps);
    double g = grading > 0.0 ? grading : 2.0 / nu;
    return TimeGrid::graded(T, steps, g);
}

ControlOperator ScenarioConfig::control_op(const SpectralSystem& sys) const {
    if (kill_mode > 0) return identity_mode_killed(sys, kill_mode);
    if (operator_kind == "identity") return control_operator_matrix(ControlKind::Identity, sys);
    if (operator_kind == "paper_kernel")
        return control_operator_matrix(ControlKind::PaperKernel, sys);
    if (operator_kind == "greens_diagonal")
        return control_operator_matrix(ControlKind::GreensDiagonal, sys);
    throw ValidationError("control.operator_kind must be identity|paper_kernel|greens_diagonal");
}

Nonlinearity ScenarioConfig::nonlinearity() const {
    if (nonlinearity_kind == "zero") return Nonlinearity::zero();
    if (nonlinearity_kind == "sine_cosine") return Nonlinearity::sine_cosine(k0, T);
    if (nonlinearity_kind == "exp_decay_linear") return Nonlinearity::exp_decay_linear(mu);
    throw ValidationError("nonlinearity.kind must be zero|sine_cosine|exp_decay_linear");
}

ScenarioConfig parse_config_text(const std::string& text) {
    auto kv = parse_toml(text);
    for (const auto& [key, value] : kv) {
        bool known = false;
        for (const auto& k : kKnownKeys)
            if (k == key) {
                known = true;
                break;
            }
        if (!known) throw ValidationError("unknown key '" + key + "'");
    }

    ScenarioConfig c;
    c.alpha = require_number(kv, "kernel.alpha", c.alpha);
    c.beta = require_number(kv, "kernel.beta", c.beta);
    c.nu = require_number(kv, "kernel.nu", c.nu);
    if (!(c.alpha > 0.0)) throw ValidationError("kernel.alpha must be > 0");
    if (!(c.beta >= 0.0)) throw ValidationError("kernel.beta must be >= 0");
    if (!(c.nu > 0.0 && c.nu < 1.0)) throw ValidationError("kernel.nu must lie in (0,1)");

    c.modes = require_int(kv, "system.modes", c.modes);
    c.grid_points = require_int(kv, "system.grid_points", c.grid_points);
    c.p = require_number(kv, "system.p", c.p);
    if (c.modes < 1 || c.modes > 32) throw ValidationError("system.modes must lie in [1, 32]");
    if (c.grid_points < c.modes + 2)
        throw ValidationError("system.grid_points must be >= modes + 2");
    if (!(c.p >= 2.0)) throw ValidationError("system.p must be >= 2");

    c.T = require_number(kv, "time.T", c.T);
    c.steps = require_int(kv, "time.steps", c.steps);
    c.grid_kind = require_string(kv, "time.grid_kind", c.grid_kind);
    c.grading = require_number(kv, "time.grading", c.grading);
    if (!(c.T > 0.0)) throw ValidationError("time.T must be > 0");
    if (c.steps < 2 || c.steps > 65536) throw ValidationError("time.steps must lie in [2, 65536]");
    if (c.grid_kind != "uniform" && c.grid_kind != "graded")
        throw ValidationError("time.grid_kind must be uniform|graded");
    if (c.grading != 0.0 && c.grading < 1.0)
        throw ValidationError("time.grading must be >= 1 (or 0 for auto)");

    c.operator_kind = require_string(kv, "control.operator_kind", c.operator_kind);
    if (c.operator_kind != "identity" && c.operator_kind != "paper_kernel" &&
        c.operator_kind != "greens_diagonal")
        throw ValidationError(
            "control.operator_kind must be identity|paper_kernel|greens_diagonal");
    c.kill_mode = require_int(kv, "control.kill_mode", c.kill_mode);
    if (c.kill_mode < 0 || c.kill_mode > c.modes)
        throw ValidationError("control.kill_mode must lie in [0, modes]");
    if (auto it = kv.find("control.lambda_sequence"); it != kv.end()) {
        if (it->second.type != TomlValue::Type::Array)
            throw ValidationError("control.lambda_sequence must be an array");
        c.lambda_sequence = it->second.array;
    }
    if (c.lambda_sequence.empty())
        throw ValidationError("control.lambda_sequence must be nonempty");
    for (std::size_t i = 0; i < c.lambda_sequence.size(); ++i) {
        if (!(c.lambda_sequence[i] > 0.0))
            throw ValidationError("control.lambda_sequence entries must be > 0");
        if (i > 0 && !(c.lambda_sequence[i] < c.lambda_sequence[i - 1]))
            throw ValidationError("control.lambda_sequence must be strictly decreasing");
    }

    c.zeta = StateSpec::parse(require_string(kv, "problem.zeta", "single_mode(1)"));
    c.zeta1 = StateSpec::parse(require_string(kv, "problem.zeta1", "decaying(1, 1)"));

    c.nonlinearity_kind = require_string(kv, "nonlinearity.kind", c.nonlinearity_kind);
    c.k0 = require_number(kv, "nonlinearity.k0", c.k0);
    c.mu = require_number(kv, "nonlinearity.mu", c.mu);
    if (c.nonlinearity_kind != "zero" && c.nonlinearity_kind != "sine_cosine" &&
        c.nonlinearity_kind != "exp_decay_linear")
        throw ValidationError("nonlinearity.kind must be zero|sine_cosine|exp_decay_linear");
    if (c.nonlinearity_kind == "sine_cosine" && !(c.k0 > 0.0))
        throw ValidationError("nonlinearity.k0 must be > 0");
    if (c.nonlinearity_kind == "exp_decay_linear" && !(c.mu > 0.0))
        throw ValidationError("nonlinearity.mu must be > 0");

    c.directory = require_string(kv, "outputs.directory", c.directory);
    c.formats = require_string(kv, "outputs.formats", c.formats);
    if (c.formats != "csv" && c.formats != "json" && c.formats != "both")
        throw ValidationError("outputs.formats must be csv|json|both");

    // constructor-level re-validation (kernel, system, grid)
    (void)c.kernel();
    (void)SpectralSystem(c.modes, c.grid_points, c.p);
    (void)c.time_grid();
    return c;
}

ScenarioConfig parse_config(const std::string& path) {
    return parse_config_text(read_file(path));
}

}  // namespace memctrl
