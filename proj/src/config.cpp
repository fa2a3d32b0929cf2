#include "wba/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace wba::cli {

namespace {

constexpr std::pair<Command, char const*> kCommandNames[] = {
    {Command::Wba, "wba"},           {Command::Dig, "dig"},         {Command::Scan, "scan"},
    {Command::Poincare, "poincare"}, {Command::Fraction, "fraction"}, {Command::Widths, "widths"},
    {Command::Rotation, "rotation"}, {Command::EpsCritical, "eps-critical"},
};

// Largest integer a double holds exactly.
constexpr double kMaxExactInteger = 9007199254740992.0;

struct Value {
    enum class Type { Number, String, Bool, List };
    Type type = Type::Number;
    double number = 0.0;
    std::string text;
    bool flag = false;
    std::vector<double> list;
};

char const* type_name(Value::Type t) {
    switch (t) {
        case Value::Type::Number: return "a number";
        case Value::Type::String: return "a string";
        case Value::Type::Bool: return "true or false";
        case Value::Type::List: return "a list";
    }
    return "?";
}

struct Entry {
    std::string section;
    std::string key;
    Value value;
    int line;
    int column;

    std::string qualified() const { return section.empty() ? key : section + "." + key; }
};

std::set<std::string> const kSections = {"", "system", "orbit", "numeric", "grid", "outer", "poincare", "critical"};

std::map<std::string, std::set<std::string>> const kKeys = {
    {"", {"command", "output", "workers", "seed", "strict", "timing"}},
    {"orbit", {"x0", "observable"}},
    {"numeric",
     {"T", "T_list", "abs_tol", "rel_tol", "initial_step", "max_step", "max_steps", "threshold", "weight", "width",
      "widths"}},
    {"grid", {"axis", "lo", "hi", "points"}},
    {"outer", {"axis", "lo", "hi", "points"}},
    {"poincare", {"crossings"}},
    {"critical", {"eps_lo", "eps_hi", "eps_step", "t_max", "psi_target", "mode_sign"}},
};

std::set<std::string> const kModeKeys = {"mode_m", "mode_n", "mode_numerator", "mode_denominator"};

std::string_view trim(std::string_view s) {
    auto const b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    auto const e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

bool is_identifier(std::string_view s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

bool parse_number(std::string_view s, double& out) {
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    auto const [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && !std::isnan(out);
}

class Parser {
public:
    std::vector<Entry> entries;
    std::vector<Diagnostic> diags;

    void run(std::string const& text) {
        std::istringstream in(text);
        std::string raw;
        std::string section;
        bool section_ok = true;
        std::set<std::string> seen;
        int line_no = 0;
        while (std::getline(in, raw)) {
            ++line_no;
            if (!raw.empty() && raw.back() == '\r') raw.pop_back();
            std::string_view line = strip_comment(raw);
            std::string_view const body = trim(line);
            if (body.empty()) continue;
            int const indent = static_cast<int>(body.data() - raw.data()) + 1;

            if (body.front() == '[') {
                if (body.back() != ']') {
                    error(line_no, indent, "", "section header is missing ']'");
                    section_ok = false;
                    continue;
                }
                section = std::string(trim(body.substr(1, body.size() - 2)));
                section_ok = kSections.count(section) > 0 && !section.empty();
                if (!section_ok) error(line_no, indent + 1, section, "unknown section [" + section + "]");
                if (section_ok && !seen.insert("[" + section + "]").second)
                    error(line_no, indent, section, "section [" + section + "] appears twice");
                continue;
            }

            auto const eq = body.find('=');
            if (eq == std::string_view::npos) {
                error(line_no, indent, "", "expected 'key = value'");
                continue;
            }
            std::string_view const key = trim(body.substr(0, eq));
            if (!is_identifier(key)) {
                error(line_no, indent, std::string(key), "invalid key name '" + std::string(key) + "'");
                continue;
            }
            std::string_view const rest = body.substr(eq + 1);
            std::string_view const vtext = trim(rest);
            int const vcol = indent + static_cast<int>(eq + 1 + (vtext.empty() ? 0 : vtext.data() - rest.data()));
            if (!section_ok) continue;

            Entry e{section, std::string(key), {}, line_no, indent};
            if (!parse_value(vtext, line_no, vcol, e)) continue;
            if (!seen.insert(e.qualified()).second) {
                error(line_no, indent, e.qualified(), "duplicate key '" + e.qualified() + "'");
                continue;
            }
            entries.push_back(std::move(e));
        }
    }

private:
    void error(int line, int column, std::string key, std::string message) {
        diags.push_back({Diagnostic::Kind::Parse, line, column, std::move(key), std::move(message)});
    }

    static std::string_view strip_comment(std::string_view s) {
        bool quoted = false;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '\\' && quoted) {
                ++i;
            } else if (s[i] == '"') {
                quoted = !quoted;
            } else if (s[i] == '#' && !quoted) {
                return s.substr(0, i);
            }
        }
        return s;
    }

    bool parse_value(std::string_view v, int line, int col, Entry& e) {
        std::string const key = e.qualified();
        if (v.empty()) {
            error(line, col, key, "missing value for '" + key + "'");
            return false;
        }
        Value& out = e.value;
        if (v.front() == '"') {
            std::string s;
            std::size_t i = 1;
            for (; i < v.size() && v[i] != '"'; ++i) {
                if (v[i] == '\\' && i + 1 < v.size()) ++i;
                s += v[i];
            }
            if (i >= v.size()) {
                error(line, col, key, "unterminated string");
                return false;
            }
            if (i + 1 != v.size()) {
                error(line, col + static_cast<int>(i) + 1, key, "unexpected text after string");
                return false;
            }
            out.type = Value::Type::String;
            out.text = std::move(s);
            return true;
        }
        if (v.front() == '[') {
            if (v.back() != ']') {
                error(line, col, key, "list is missing ']'");
                return false;
            }
            out.type = Value::Type::List;
            std::string_view inner = v.substr(1, v.size() - 2);
            if (trim(inner).empty()) return true;
            bool ok = true;
            std::size_t start = 0;
            for (;;) {
                auto const comma = inner.find(',', start);
                std::string_view const item = inner.substr(start, comma == std::string_view::npos ? inner.npos : comma - start);
                std::string_view const t = trim(item);
                int const icol = col + 1 + static_cast<int>(start + (t.empty() ? 0 : t.data() - item.data()));
                double x = 0.0;
                if (!parse_number(t, x)) {
                    error(line, icol, key, t.empty() ? "empty list element" : "'" + std::string(t) + "' is not a number");
                    ok = false;
                } else {
                    out.list.push_back(x);
                }
                if (comma == std::string_view::npos) break;
                start = comma + 1;
            }
            return ok;
        }
        if (v == "true" || v == "false") {
            out.type = Value::Type::Bool;
            out.flag = v == "true";
            return true;
        }
        if (parse_number(v, out.number)) {
            out.type = Value::Type::Number;
            return true;
        }
        bool const bare = std::all_of(v.begin(), v.end(), [](char c) {
            return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' || c == '/';
        });
        if (!bare) {
            error(line, col, key, "cannot read value '" + std::string(v) + "'; quote strings containing spaces or symbols");
            return false;
        }
        out.type = Value::Type::String;
        out.text = std::string(v);
        return true;
    }
};

// Turns parsed entries into a RunConfig, recording type errors.
class Builder {
public:
    RunConfig config;
    std::vector<Diagnostic> diags;
    std::map<std::string, std::pair<int, int>> positions;

    void run(std::vector<Entry> const& entries) {
        for (auto const& e : entries) positions[e.qualified()] = {e.line, e.column};

        // System name first: it decides which parameter keys exist.
        std::set<std::string> params;
        for (auto const& e : entries) {
            if (e.section == "system" && e.key == "name" && string(e, config.system.name)) {
                auto const names = system_names();
                if (std::find(names.begin(), names.end(), config.system.name) == names.end()) {
                    std::string list;
                    for (auto const& n : names) list += (list.empty() ? "" : ", ") + n;
                    fail(e, "unknown system '" + config.system.name + "' (expected one of: " + list + ")");
                } else {
                    auto const p = system_parameter_names(config.system.name);
                    params.insert(p.begin(), p.end());
                }
            }
        }

        std::vector<double> mode_m, mode_n, mode_num;
        bool any_modes = false;
        bool grid_seen = false, outer_seen = false;
        GridAxis grid, outer;

        for (auto const& e : entries) {
            auto const& s = e.section;
            auto const& k = e.key;
            if (s == "system") {
                if (k == "name") continue;
                if (kModeKeys.count(k)) {
                    any_modes = any_modes || k != "mode_denominator";
                    if (k == "mode_m") list(e, mode_m);
                    else if (k == "mode_n") list(e, mode_n);
                    else if (k == "mode_numerator") list(e, mode_num);
                    else number(e, config.system.mode_denominator);
                    continue;
                }
                if (config.system.name.empty() || !params.empty()) {
                    if (!params.count(k)) {
                        fail(e, config.system.name.empty() ? "parameter '" + k + "' given without a system name"
                                                           : "unknown parameter '" + k + "' for system '" +
                                                                 config.system.name + "'");
                        continue;
                    }
                }
                double v = 0.0;
                if (number(e, v)) config.system.parameters[k] = v;
                continue;
            }
            if (!kKeys.at(s).count(k)) {
                fail(e, "unknown key '" + e.qualified() + "'");
                continue;
            }
            if (s.empty()) {
                if (k == "command") {
                    std::string name;
                    if (!string(e, name)) continue;
                    if (auto c = command_from_string(name)) config.command = *c;
                    else fail(e, "unknown command '" + name + "'");
                } else if (k == "output") {
                    string(e, config.output);
                } else if (k == "workers") {
                    std::size_t n = 0;
                    if (count(e, n)) config.workers = static_cast<unsigned>(std::min<std::size_t>(n, 65535));
                } else if (k == "seed") {
                    std::size_t n = 0;
                    if (count(e, n)) config.seed = n;
                } else if (k == "strict") {
                    boolean(e, config.strict);
                } else if (k == "timing") {
                    boolean(e, config.timing);
                }
            } else if (s == "orbit") {
                if (k == "x0") list(e, config.x0);
                else string(e, config.observable);
            } else if (s == "numeric") {
                if (k == "T") number(e, config.T);
                else if (k == "T_list") list(e, config.T_list);
                else if (k == "abs_tol") number(e, config.integrator.abs_tol);
                else if (k == "rel_tol") number(e, config.integrator.rel_tol);
                else if (k == "initial_step") number(e, config.integrator.initial_step);
                else if (k == "max_step") number(e, config.integrator.max_step);
                else if (k == "max_steps") count(e, config.integrator.max_steps);
                else if (k == "threshold") number(e, config.threshold);
                else if (k == "width") number(e, config.weight.width);
                else if (k == "widths") list(e, config.widths);
                else if (k == "weight") {
                    std::string name;
                    if (!string(e, name)) continue;
                    try {
                        config.weight.kind = weight_kind_from_string(name);
                    } catch (std::invalid_argument const&) {
                        fail(e, "unknown weight '" + name + "' (expected bump, sin2 or uniform)");
                    }
                }
            } else if (s == "grid" || s == "outer") {
                GridAxis& g = s == "grid" ? grid : outer;
                (s == "grid" ? grid_seen : outer_seen) = true;
                if (k == "axis") string(e, g.name);
                else if (k == "lo") number(e, g.lo);
                else if (k == "hi") number(e, g.hi);
                else count(e, g.points);
            } else if (s == "poincare") {
                count(e, config.crossings);
            } else if (s == "critical") {
                if (k == "eps_lo") number(e, config.critical.eps_lo);
                else if (k == "eps_hi") number(e, config.critical.eps_hi);
                else if (k == "eps_step") number(e, config.critical.eps_step);
                else if (k == "t_max") number(e, config.critical.t_max);
                else if (k == "mode_sign") number(e, config.critical.mode_sign);
                else number(e, config.critical.psi_target);
            }
        }

        if (grid_seen) config.grid = grid;
        if (outer_seen) config.outer = outer;

        if (any_modes) {
            auto const n = mode_m.size();
            if (mode_n.size() != n || mode_num.size() != n) {
                fail_key("system.mode_m", "mode_m, mode_n and mode_numerator must have equal lengths");
            } else if (n == 0) {
                fail_key("system.mode_m", "mode lists are empty");
            } else {
                for (std::size_t i = 0; i < n; ++i) {
                    if (!integral(mode_m[i]) || !integral(mode_n[i])) {
                        fail_key("system.mode_m", "mode_m and mode_n must be integers");
                        break;
                    }
                    config.system.modes.push_back(
                        {static_cast<int>(mode_m[i]), static_cast<int>(mode_n[i]), mode_num[i]});
                }
            }
        }
    }

    void fail_key(std::string const& key, std::string message) {
        auto const it = positions.find(key);
        int const line = it == positions.end() ? 0 : it->second.first;
        int const col = it == positions.end() ? 0 : it->second.second;
        diags.push_back({Diagnostic::Kind::Validation, line, col, key, std::move(message)});
    }

private:
    void fail(Entry const& e, std::string message) {
        diags.push_back({Diagnostic::Kind::Validation, e.line, e.column, e.qualified(), std::move(message)});
    }

    bool expect(Entry const& e, Value::Type t) {
        if (e.value.type == t) return true;
        fail(e, "'" + e.qualified() + "' must be " + type_name(t) + ", got " + type_name(e.value.type));
        return false;
    }

    static bool integral(double x) { return std::isfinite(x) && std::floor(x) == x && std::fabs(x) <= kMaxExactInteger; }

    bool number(Entry const& e, double& out) {
        if (!expect(e, Value::Type::Number)) return false;
        out = e.value.number;
        return true;
    }
    bool count(Entry const& e, std::size_t& out) {
        if (!expect(e, Value::Type::Number)) return false;
        double const x = e.value.number;
        if (!integral(x) || x < 0.0) {
            fail(e, "'" + e.qualified() + "' must be a non-negative integer");
            return false;
        }
        out = static_cast<std::size_t>(x);
        return true;
    }
    bool string(Entry const& e, std::string& out) {
        if (!expect(e, Value::Type::String)) return false;
        out = e.value.text;
        return true;
    }
    bool boolean(Entry const& e, bool& out) {
        if (!expect(e, Value::Type::Bool)) return false;
        out = e.value.flag;
        return true;
    }
    bool list(Entry const& e, std::vector<double>& out) {
        if (!expect(e, Value::Type::List)) return false;
        out = e.value.list;
        return true;
    }
};

bool uses_grid(Command c) { return c == Command::Scan || c == Command::Fraction || c == Command::Rotation; }

std::string quote(std::string const& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + '"';
}

std::string render_list(std::vector<double> const& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_real(v[i]);
    return out + "]";
}

}  // namespace

char const* to_string(Command command) noexcept {
    for (auto const& [c, name] : kCommandNames)
        if (c == command) return name;
    return "?";
}

std::optional<Command> command_from_string(std::string const& name) {
    for (auto const& [c, n] : kCommandNames)
        if (name == n) return c;
    return std::nullopt;
}

std::vector<double> CriticalSearch::grid() const {
    std::vector<double> out;
    if (!(eps_step > 0.0) || !(eps_lo <= eps_hi)) return out;
    // Index-based so that rounding never drops the last point.
    auto const n = static_cast<std::size_t>(std::floor((eps_hi - eps_lo) / eps_step + 1e-9)) + 1;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(eps_lo + static_cast<double>(i) * eps_step);
    return out;
}

std::string Diagnostic::str() const {
    std::ostringstream out;
    if (line > 0) out << "line " << line << ", column " << column << ": ";
    out << (kind == Kind::Parse ? "parse error" : "invalid value");
    if (!key.empty()) out << " [" << key << "]";
    out << ": " << message;
    return out.str();
}

ConfigError::ConfigError(std::vector<Diagnostic> diagnostics)
    : std::runtime_error([&] {
          std::string msg;
          for (auto const& d : diagnostics) msg += (msg.empty() ? "" : "\n") + d.str();
          return msg.empty() ? std::string("invalid configuration") : msg;
      }()),
      diagnostics_(std::move(diagnostics)) {}

std::vector<Diagnostic> validate(RunConfig const& c) {
    std::vector<Diagnostic> out;
    auto fail = [&](std::string key, std::string message) {
        out.push_back({Diagnostic::Kind::Validation, 0, 0, std::move(key), std::move(message)});
    };
    auto positive = [](double x) { return x > 0.0 && std::isfinite(x); };

    if (c.output.empty()) fail("output", "output must not be empty");

    // System and initial condition.
    auto const names = system_names();
    bool const known_system = std::find(names.begin(), names.end(), c.system.name) != names.end();
    ModelSystem system;
    bool have_system = false;
    if (c.system.name.empty()) {
        fail("system.name", "system.name is required");
    } else if (!known_system) {
        fail("system.name", "unknown system '" + c.system.name + "'");
    } else if (c.command == Command::EpsCritical) {
        if (c.system.name != "farey") fail("system.name", "eps-critical needs the farey system");
        if (!c.system.parameters.empty()) fail("system", "eps-critical sweeps epsilon itself; remove system parameters");
        if (!c.system.modes.empty() || c.system.mode_denominator != kFareyDenominator)
            fail("system.mode_m", "eps-critical uses the default mode set");
    } else {
        if (c.system.name != "farey" && c.system.mode_denominator != kFareyDenominator)
            fail("system.mode_denominator", "mode_denominator only applies to the farey system");
        try {
            system = make_system(c.system);
            have_system = true;
        } catch (std::exception const& e) {
            fail("system", e.what());
        }
    }

    if (!std::all_of(c.x0.begin(), c.x0.end(), [](double x) { return std::isfinite(x); }))
        fail("orbit.x0", "x0 must be finite");
    std::size_t const dim = c.command == Command::EpsCritical ? FareyFieldSystem::kDimension
                            : have_system                     ? system.dimension()
                                                              : c.x0.size();
    if (c.x0.size() > dim) fail("orbit.x0", "x0 has " + std::to_string(c.x0.size()) + " components, system has " + std::to_string(dim));

    if (have_system && !c.observable.empty()) {
        try {
            (void)system.observable(c.observable);
        } catch (std::exception const& e) {
            fail("orbit.observable", e.what());
        }
    }

    // Numerics.
    if (!positive(c.T)) fail("numeric.T", "T must be positive");
    if (!positive(c.threshold)) fail("numeric.threshold", "threshold must be positive");
    auto const& ic = c.integrator;
    if (!positive(ic.abs_tol)) fail("numeric.abs_tol", "abs_tol must be positive");
    if (!positive(ic.rel_tol)) fail("numeric.rel_tol", "rel_tol must be positive");
    if (!positive(ic.initial_step)) fail("numeric.initial_step", "initial_step must be positive");
    if (!(ic.max_step > 0.0)) fail("numeric.max_step", "max_step must be positive");
    if (ic.max_steps == 0) fail("numeric.max_steps", "max_steps must be positive");
    if (!positive(c.weight.width)) {
        fail("numeric.width", "width must be positive");
    } else if (c.command != Command::Widths) {
        try {
            (void)c.weight.make();
        } catch (std::exception const& e) {
            fail("numeric.width", e.what());
        }
    }

    if (!c.T_list.empty() && c.command != Command::Dig) fail("numeric.T_list", "T_list is only used by dig");
    for (std::size_t i = 0; i < c.T_list.size(); ++i) {
        if (!positive(c.T_list[i])) {
            fail("numeric.T_list", "T_list entries must be positive");
            break;
        }
        if (i > 0 && !(c.T_list[i] > c.T_list[i - 1])) {
            fail("numeric.T_list", "T_list must be strictly ascending");
            break;
        }
    }
    if (c.command == Command::Widths) {
        if (c.widths.empty()) fail("numeric.widths", "widths needs at least one value");
        if (!std::all_of(c.widths.begin(), c.widths.end(), positive))
            fail("numeric.widths", "widths must be positive");
    } else if (!c.widths.empty()) {
        fail("numeric.widths", "widths is only used by the widths command");
    }

    // Grids.
    if (uses_grid(c.command) || (c.command == Command::Poincare && c.grid)) {
        if (!c.grid) {
            fail("grid", std::string("command ") + to_string(c.command) + " needs a [grid] section");
        } else {
            try {
                c.grid->validate();
                if (have_system) {
                    ScanSpec const spec = make_scan_spec(c);
                    for (double v : {spec.grid.lo, spec.grid.hi})
                        (void)resolve_grid_point(spec.system, spec.x0, spec.grid.name, v);
                }
            } catch (std::exception const& e) {
                fail("grid.axis", e.what());
            }
        }
    } else if (c.grid && c.command != Command::Poincare) {
        fail("grid", std::string("[grid] is not used by command ") + to_string(c.command));
    }
    if (c.outer) {
        if (c.command != Command::Fraction) {
            fail("outer", "[outer] is only used by the fraction command");
        } else {
            try {
                c.outer->validate();
                auto const params = system_parameter_names(c.system.name);
                if (std::find(params.begin(), params.end(), c.outer->name) == params.end())
                    throw std::invalid_argument("outer axis '" + c.outer->name + "' is not a parameter of '" +
                                                c.system.name + "'");
                if (c.grid && c.grid->name == c.outer->name)
                    throw std::invalid_argument("outer and inner axes must differ");
                if (have_system) {
                    for (double v : {c.outer->lo, c.outer->hi}) {
                        SystemDescriptor d = c.system;
                        d.parameters[c.outer->name] = v;
                        (void)make_system(d);
                    }
                }
            } catch (std::exception const& e) {
                fail("outer.axis", e.what());
            }
        }
    }

    if (c.command == Command::Poincare && c.crossings == 0) fail("poincare.crossings", "crossings must be positive");

    if (c.command == Command::EpsCritical) {
        auto const& cr = c.critical;
        if (!std::isfinite(cr.eps_lo) || cr.eps_lo < 0.0) fail("critical.eps_lo", "eps_lo must be non-negative");
        if (!std::isfinite(cr.eps_hi) || !(cr.eps_hi >= cr.eps_lo)) fail("critical.eps_hi", "eps_hi must be >= eps_lo");
        if (!positive(cr.eps_step)) fail("critical.eps_step", "eps_step must be positive");
        if (!positive(cr.t_max)) fail("critical.t_max", "t_max must be positive");
        if (!std::isfinite(cr.psi_target)) fail("critical.psi_target", "psi_target must be finite");
        if (cr.mode_sign != 1.0 && cr.mode_sign != -1.0) fail("critical.mode_sign", "mode_sign must be 1 or -1");
    }
    return out;
}

RunConfig parse_config(std::string const& text) {
    Parser parser;
    parser.run(text);
    Builder builder;
    builder.run(parser.entries);

    std::vector<Diagnostic> diags = std::move(parser.diags);
    diags.insert(diags.end(), builder.diags.begin(), builder.diags.end());
    // Fields that failed to read keep their defaults, so validation still
    // runs; it only reports keys that have no diagnostic yet.
    std::set<std::string> reported;
    for (auto const& d : diags) reported.insert(d.key);
    for (auto& d : validate(builder.config)) {
        if (reported.count(d.key) || (d.key.rfind("system", 0) == 0 && reported.count("system.name"))) continue;
        // Point at the offending line when the key was written out.
        auto it = builder.positions.find(d.key);
        if (it == builder.positions.end()) {
            for (auto const& [k, pos] : builder.positions) {
                if (k.rfind(d.key + ".", 0) == 0) {
                    it = builder.positions.find(k);
                    break;
                }
            }
        }
        if (it != builder.positions.end()) std::tie(d.line, d.column) = it->second;
        diags.push_back(std::move(d));
    }
    if (!diags.empty()) throw ConfigError(std::move(diags));
    return builder.config;
}

std::string render_config(RunConfig const& c) {
    std::ostringstream out;
    out << "command = " << to_string(c.command) << '\n';
    out << "output = " << quote(c.output) << '\n';
    out << "workers = " << c.workers << '\n';
    out << "seed = " << c.seed << '\n';
    out << "strict = " << (c.strict ? "true" : "false") << '\n';
    out << "timing = " << (c.timing ? "true" : "false") << '\n';

    out << "\n[system]\n";
    out << "name = " << quote(c.system.name) << '\n';
    for (auto const& [k, v] : c.system.parameters) out << k << " = " << format_real(v) << '\n';
    if (!c.system.modes.empty()) {
        std::vector<double> m, n, num;
        for (auto const& mode : c.system.modes) {
            m.push_back(mode.m);
            n.push_back(mode.n);
            num.push_back(mode.numerator);
        }
        out << "mode_m = " << render_list(m) << '\n';
        out << "mode_n = " << render_list(n) << '\n';
        out << "mode_numerator = " << render_list(num) << '\n';
    }
    if (c.system.mode_denominator != kFareyDenominator)
        out << "mode_denominator = " << format_real(c.system.mode_denominator) << '\n';

    out << "\n[orbit]\n";
    out << "x0 = " << render_list(c.x0) << '\n';
    out << "observable = " << quote(c.observable) << '\n';

    out << "\n[numeric]\n";
    out << "T = " << format_real(c.T) << '\n';
    if (!c.T_list.empty()) out << "T_list = " << render_list(c.T_list) << '\n';
    out << "abs_tol = " << format_real(c.integrator.abs_tol) << '\n';
    out << "rel_tol = " << format_real(c.integrator.rel_tol) << '\n';
    out << "initial_step = " << format_real(c.integrator.initial_step) << '\n';
    out << "max_step = " << format_real(c.integrator.max_step) << '\n';
    out << "max_steps = " << c.integrator.max_steps << '\n';
    out << "threshold = " << format_real(c.threshold) << '\n';
    out << "weight = " << to_string(c.weight.kind) << '\n';
    out << "width = " << format_real(c.weight.width) << '\n';
    if (!c.widths.empty()) out << "widths = " << render_list(c.widths) << '\n';

    auto axis = [&](char const* section, GridAxis const& g) {
        out << "\n[" << section << "]\n";
        out << "axis = " << quote(g.name) << '\n';
        out << "lo = " << format_real(g.lo) << '\n';
        out << "hi = " << format_real(g.hi) << '\n';
        out << "points = " << g.points << '\n';
    };
    if (c.grid) axis("grid", *c.grid);
    if (c.outer) axis("outer", *c.outer);

    out << "\n[poincare]\n";
    out << "crossings = " << c.crossings << '\n';

    out << "\n[critical]\n";
    out << "eps_lo = " << format_real(c.critical.eps_lo) << '\n';
    out << "eps_hi = " << format_real(c.critical.eps_hi) << '\n';
    out << "eps_step = " << format_real(c.critical.eps_step) << '\n';
    out << "t_max = " << format_real(c.critical.t_max) << '\n';
    out << "psi_target = " << format_real(c.critical.psi_target) << '\n';
    out << "mode_sign = " << format_real(c.critical.mode_sign) << '\n';
    return out.str();
}

ScanSpec make_scan_spec(RunConfig const& c) {
    ScanSpec spec;
    spec.system = c.system;
    spec.x0 = c.x0;
    if (c.grid) spec.grid = *c.grid;
    spec.T = c.T;
    spec.observable = c.observable;
    spec.weight = c.weight;
    spec.threshold = c.threshold;
    spec.integrator = c.integrator;
    spec.workers = std::max(1u, c.workers);
    spec.record_timing = c.timing;
    return spec;
}

}  // namespace wba::cli
