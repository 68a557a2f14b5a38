#include "chaowork/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>

#include "chaowork/errors.hpp"

namespace chaowork {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) out.push_back(trim(item));
  return out;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const std::string& origin, const std::string& expected) {
  throw Error(ErrorKind::ParseError,
              origin + ": value '" + value + "' for " + key + " is not " + expected);
}

double parse_plain(const std::string& text, bool& ok) {
  double v = 0.0;
  const char* b = text.data();
  if (text.size() > 1 && text[0] == '+') ++b;
  const char* e = b + text.size();
  const auto [ptr, ec] = std::from_chars(b, e, v);
  ok = ec == std::errc() && ptr == e && !text.empty();
  return v;
}

// Plain number or a power "a^b", e.g. 2^-12.
double parse_number(const std::string& key, const std::string& raw, const std::string& origin) {
  const std::string text = trim(raw);
  bool ok = false;
  const auto caret = text.find('^');
  double v = 0.0;
  if (caret == std::string::npos) {
    v = parse_plain(text, ok);
  } else {
    bool ok_b = false, ok_e = false;
    const double base = parse_plain(trim(text.substr(0, caret)), ok_b);
    const double exponent = parse_plain(trim(text.substr(caret + 1)), ok_e);
    ok = ok_b && ok_e;
    v = std::pow(base, exponent);
  }
  if (!ok) bad_value(key, raw, origin, "a number");
  return v;
}

std::size_t parse_count(const std::string& key, const std::string& raw, const std::string& origin) {
  const double v = parse_number(key, raw, origin);
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e15) bad_value(key, raw, origin, "a non-negative integer");
  return static_cast<std::size_t>(v);
}

bool parse_bool(const std::string& key, const std::string& raw, const std::string& origin) {
  const std::string v = trim(raw);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(key, raw, origin, "a boolean");
}

std::vector<double> parse_list(const std::string& key, const std::string& raw,
                               const std::string& origin) {
  std::vector<double> out;
  for (const auto& item : split(raw, ',')) out.push_back(parse_number(key, item, origin));
  if (out.empty()) bad_value(key, raw, origin, "a comma-separated list");
  return out;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_number(v[i]);
  return out;
}

struct Field {
  std::string key;
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

Field center_field(std::size_t i) {
  return {"center" + std::to_string(i + 1),
          [i](RunConfig& c, const std::string& v, const std::string& o) {
            const auto xy = parse_list("center" + std::to_string(i + 1), v, o);
            if (xy.size() != 2) bad_value("center" + std::to_string(i + 1), v, o, "an x, y pair");
            c.potential.centers[i] = Vec2(xy[0], xy[1]);
          },
          [i](const RunConfig& c) {
            return format_number(c.potential.centers[i].x()) + ", " +
                   format_number(c.potential.centers[i].y());
          }};
}

template <class T>
Field number_field(const std::string& key, T RunConfig::*member) {
  return {key,
          [key, member](RunConfig& c, const std::string& v, const std::string& o) {
            if constexpr (std::is_same_v<T, double>) c.*member = parse_number(key, v, o);
            else if constexpr (std::is_same_v<T, int>) c.*member = static_cast<int>(parse_count(key, v, o));
            else if constexpr (std::is_same_v<T, std::uint64_t>) c.*member = parse_count(key, v, o);
            else c.*member = parse_count(key, v, o);
          },
          [member](const RunConfig& c) {
            if constexpr (std::is_same_v<T, double>) return format_number(c.*member);
            else return std::to_string(c.*member);
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> list = [] {
    std::vector<Field> f;
    f.push_back({"scenario",
                 [](RunConfig& c, const std::string& v, const std::string& o) {
                   const std::string s = trim(v);
                   if (s != "" && s != "fig2" && s != "fig3" && s != "fig4")
                     bad_value("scenario", v, o, "one of fig2, fig3, fig4");
                   c.scenario = s;
                 },
                 [](const RunConfig& c) { return c.scenario; }});
    f.push_back({"radius",
                 [](RunConfig& c, const std::string& v, const std::string& o) {
                   c.geometry.radius = parse_number("radius", v, o);
                 },
                 [](const RunConfig& c) { return format_number(c.geometry.radius); }});
    f.push_back({"length",
                 [](RunConfig& c, const std::string& v, const std::string& o) {
                   c.geometry.length = parse_number("length", v, o);
                 },
                 [](const RunConfig& c) { return format_number(c.geometry.length); }});
    for (std::size_t i = 0; i < 4; ++i) f.push_back(center_field(i));
    f.push_back({"signs",
                 [](RunConfig& c, const std::string& v, const std::string& o) {
                   const auto s = parse_list("signs", v, o);
                   if (s.size() != 4) bad_value("signs", v, o, "four signs");
                   for (std::size_t i = 0; i < 4; ++i) c.potential.signs[i] = s[i];
                 },
                 [](const RunConfig& c) {
                   return format_list({c.potential.signs.begin(), c.potential.signs.end()});
                 }});
    f.push_back({"sigma",
                 [](RunConfig& c, const std::string& v, const std::string& o) {
                   c.potential.sigma = parse_number("sigma", v, o);
                 },
                 [](const RunConfig& c) { return format_number(c.potential.sigma); }});
    f.push_back({"xi_0",
                 [](RunConfig& c, const std::string& v, const std::string& o) {
                   c.potential.xi_0 = parse_number("xi_0", v, o);
                 },
                 [](const RunConfig& c) { return format_number(c.potential.xi_0); }});
    f.push_back({"xi_f",
                 [](RunConfig& c, const std::string& v, const std::string& o) {
                   c.potential.xi_f = parse_number("xi_f", v, o);
                 },
                 [](const RunConfig& c) { return format_number(c.potential.xi_f); }});
    f.push_back({"anisotropic_saddle",
                 [](RunConfig& c, const std::string& v, const std::string& o) {
                   c.potential.anisotropic_saddle = parse_bool("anisotropic_saddle", v, o);
                 },
                 [](const RunConfig& c) { return std::string(c.potential.anisotropic_saddle ? "true" : "false"); }});
    f.push_back({"betas",
                 [](RunConfig& c, const std::string& v, const std::string& o) { c.betas = parse_list("betas", v, o); },
                 [](const RunConfig& c) { return format_list(c.betas); }});
    f.push_back({"hbars",
                 [](RunConfig& c, const std::string& v, const std::string& o) { c.hbars = parse_list("hbars", v, o); },
                 [](const RunConfig& c) { return format_list(c.hbars); }});
    f.push_back(number_field("n_semiclassical", &RunConfig::n_semiclassical));
    f.push_back(number_field("n_classical", &RunConfig::n_classical));
    f.push_back(number_field("pilot_samples", &RunConfig::pilot_samples));
    f.push_back(number_field("batches", &RunConfig::batches));
    f.push_back(number_field("grid_points", &RunConfig::grid_points));
    f.push_back(number_field("grid_padding", &RunConfig::grid_padding));
    f.push_back({"broadening",
                 [](RunConfig& c, const std::string& v, const std::string& o) {
                   c.broadening = trim(v) == "auto" ? -1.0 : parse_number("broadening", v, o);
                   if (trim(v) != "auto" && c.broadening < 0.0)
                     throw Error(ErrorKind::RangeError, "broadening must be >= 0 or auto");
                 },
                 [](const RunConfig& c) {
                   return c.broadening < 0.0 ? std::string("auto") : format_number(c.broadening);
                 }});
    f.push_back({"max_bounces",
                 [](RunConfig& c, const std::string& v, const std::string& o) {
                   c.propagation.max_bounces = parse_count("max_bounces", v, o);
                 },
                 [](const RunConfig& c) { return std::to_string(c.propagation.max_bounces); }});
    f.push_back({"line_integral",
                 [](RunConfig& c, const std::string& v, const std::string& o) {
                   const std::string s = trim(v);
                   if (s == "closed_form") c.propagation.line_integral = LineIntegral::closed_form;
                   else if (s == "simpson") c.propagation.line_integral = LineIntegral::simpson;
                   else bad_value("line_integral", v, o, "closed_form or simpson");
                 },
                 [](const RunConfig& c) {
                   return std::string(c.propagation.line_integral == LineIntegral::simpson ? "simpson"
                                                                                          : "closed_form");
                 }});
    f.push_back({"shell_estimator",
                 [](RunConfig& c, const std::string& v, const std::string& o) {
                   c.shell_estimator = parse_bool("shell_estimator", v, o);
                 },
                 [](const RunConfig& c) { return std::string(c.shell_estimator ? "true" : "false"); }});
    f.push_back(number_field("shell_count", &RunConfig::shell_count));
    f.push_back(number_field("samples_per_shell", &RunConfig::samples_per_shell));
    f.push_back(number_field("quantum_hbar", &RunConfig::quantum_hbar));
    f.push_back(number_field("quantum_h", &RunConfig::quantum_h));
    f.push_back(number_field("quantum_min_basis", &RunConfig::quantum_min_basis));
    f.push_back(number_field("quantum_max_basis", &RunConfig::quantum_max_basis));
    f.push_back(number_field("seed", &RunConfig::seed));
    f.push_back(number_field("workers", &RunConfig::workers));
    f.push_back({"out", [](RunConfig& c, const std::string& v, const std::string&) { c.out = trim(v); },
                 [](const RunConfig& c) { return c.out; }});
    return f;
  }();
  return list;
}

// Singular spellings accepted for one-value lists.
std::string canonical_key(const std::string& key) {
  if (key == "beta") return "betas";
  if (key == "hbar") return "hbars";
  return key;
}

const Field* find_field(const std::string& raw_key) {
  const std::string key = canonical_key(raw_key);
  for (const auto& f : fields())
    if (f.key == key) return &f;
  return nullptr;
}

[[noreturn]] void range_error(const std::string& field, const std::string& what) {
  throw Error(ErrorKind::RangeError, field + " " + what);
}

void require_positive(const std::string& field, double v) {
  if (!(v > 0.0) || !std::isfinite(v)) range_error(field, "must be positive and finite");
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& f : fields()) k.push_back(f.key);
    return k;
  }();
  return keys;
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value,
                   const std::string& origin) {
  const Field* f = find_field(key);
  if (!f) throw Error(ErrorKind::ParseError, origin + ": unknown key '" + key + "'");
  f->set(cfg, value, origin);
  cfg.explicit_keys.insert(f->key);
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream is(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string body = line.substr(0, line.find('#'));
    if (trim(body).empty()) continue;
    const auto eq = body.find('=');
    const auto first = body.find_first_not_of(" \t");
    if (eq == std::string::npos) {
      throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ", column " +
                                             std::to_string(first + 1) + ": expected key = value");
    }
    const std::string key = trim(body.substr(0, eq));
    if (key.empty() || !std::all_of(key.begin(), key.end(), [](unsigned char ch) {
          return std::isalnum(ch) || ch == '_';
        })) {
      throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ", column " +
                                             std::to_string(first + 1) + ": malformed key '" + key + "'");
    }
    const std::string where =
        "line " + std::to_string(line_no) + ", column " + std::to_string(first + 1);
    if (!find_field(key)) throw Error(ErrorKind::ParseError, where + ": unknown key '" + key + "'");
    const auto value_col = body.find_first_not_of(" \t", eq + 1);
    const std::string value_where =
        "line " + std::to_string(line_no) + ", column " +
        std::to_string((value_col == std::string::npos ? eq + 1 : value_col) + 1);
    apply_setting(cfg, key, body.substr(eq + 1), value_where);
  }
  return cfg;
}

void apply_environment(RunConfig& cfg) {
  for (const auto& key : config_keys()) {
    std::string name = "CHAOWORK_" + key;
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
    if (const char* v = std::getenv(name.c_str())) apply_setting(cfg, key, v, name);
  }
}

void apply_scenario_defaults(RunConfig& cfg) {
  const auto unset = [&](const char* key) { return cfg.explicit_keys.count(key) == 0; };
  if (cfg.scenario == "fig2") {
    if (unset("betas"))
      cfg.betas = {std::ldexp(1.0, -6), std::ldexp(1.0, -8), std::ldexp(1.0, -10), std::ldexp(1.0, -12)};
    if (unset("hbars")) cfg.hbars = {1.0};
    if (unset("quantum_hbar")) cfg.quantum_hbar = 1.0;
  } else if (cfg.scenario == "fig3") {
    if (unset("betas")) {
      cfg.betas.clear();
      for (int k = 7; k <= 13; ++k) cfg.betas.push_back(std::ldexp(1.0, -k));
    }
    if (unset("hbars")) cfg.hbars = {1.0};
  } else if (cfg.scenario == "fig4") {
    if (unset("betas")) cfg.betas = {std::ldexp(1.0, -12)};
    if (unset("hbars")) cfg.hbars = {0.01, 0.1, 0.5, 1.0};
  }
}

void validate(const RunConfig& cfg) {
  require_positive("radius", cfg.geometry.radius);
  if (!(cfg.geometry.length >= 0.0) || !std::isfinite(cfg.geometry.length))
    range_error("length", "must be non-negative and finite");
  require_positive("sigma", cfg.potential.sigma);
  for (std::size_t i = 0; i < 4; ++i) {
    const Vec2& c = cfg.potential.centers[i];
    if (!std::isfinite(c.x()) || !std::isfinite(c.y()))
      range_error("center" + std::to_string(i + 1), "must be finite");
    if (cfg.potential.signs[i] != 1.0 && cfg.potential.signs[i] != -1.0)
      range_error("signs", "entries must be +1 or -1");
  }
  if (!std::isfinite(cfg.potential.xi_f)) range_error("xi_f", "must be finite");
  // The dynamics is force-free only before the quench.
  if (cfg.potential.xi_0 != 0.0) range_error("xi_0", "must be 0 (force-free initial dynamics)");
  if (cfg.betas.empty()) range_error("betas", "must not be empty");
  for (double b : cfg.betas) require_positive("betas", b);
  if (cfg.hbars.empty()) range_error("hbars", "must not be empty");
  for (double h : cfg.hbars) require_positive("hbars", h);
  if (cfg.n_semiclassical < 1) range_error("n_semiclassical", "must be at least 1");
  if (cfg.n_classical < 1) range_error("n_classical", "must be at least 1");
  if (cfg.pilot_samples < 2) range_error("pilot_samples", "must be at least 2");
  if (cfg.batches < 1) range_error("batches", "must be at least 1");
  if (cfg.grid_points < 8 || (cfg.grid_points & (cfg.grid_points - 1)) != 0)
    range_error("grid_points", "must be a power of two >= 8");
  if (!(cfg.grid_padding >= 0.0) || !std::isfinite(cfg.grid_padding))
    range_error("grid_padding", "must be non-negative and finite");
  if (!std::isfinite(cfg.broadening)) range_error("broadening", "must be finite");
  if (cfg.propagation.max_bounces < 1) range_error("max_bounces", "must be at least 1");
  if (cfg.shell_count < 1) range_error("shell_count", "must be at least 1");
  if (cfg.samples_per_shell < 1) range_error("samples_per_shell", "must be at least 1");
  require_positive("quantum_hbar", cfg.quantum_hbar);
  if (!(cfg.quantum_h >= 0.0) || !std::isfinite(cfg.quantum_h))
    range_error("quantum_h", "must be non-negative (0 selects the planner)");
  if (cfg.quantum_max_basis < 1) range_error("quantum_max_basis", "must be at least 1");
  if (cfg.quantum_min_basis > cfg.quantum_max_basis)
    range_error("quantum_min_basis", "must not exceed quantum_max_basis");
  if (cfg.workers < 0) range_error("workers", "must be >= 0");
  if (cfg.out.empty()) range_error("out", "must not be empty");
}

RunConfig validate_config(const std::string& text) {
  RunConfig cfg = parse_config(text);
  apply_scenario_defaults(cfg);
  validate(cfg);
  return cfg;
}

std::string canonical_text(const RunConfig& cfg) {
  std::string out;
  for (const auto& f : fields()) {
    // Output location and thread count never change results.
    if (f.key == "out" || f.key == "workers") continue;
    out += f.key + " = " + f.get(cfg) + "\n";
  }
  return out;
}

}  // namespace chaowork
