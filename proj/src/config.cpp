#include "ravflow/config.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ravflow/errors.hpp"
#include "ravflow/grid.hpp"

namespace ravflow {

namespace {

struct Value {
  enum class Kind { Number, String, Bool, Array } kind;
  std::string text;             // number / string / bool token
  std::vector<std::string> items;  // array elements
  int line;
};

using Table = std::map<std::string, std::map<std::string, Value>>;

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// Drops a trailing '#' comment that is not inside a string.
std::string strip_comment(const std::string& s) {
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') in_string = !in_string;
    if (s[i] == '#' && !in_string) return s.substr(0, i);
  }
  return s;
}

Value parse_value(const std::string& raw, int line) {
  if (raw.empty()) fail(line, "missing value");
  if (raw.front() == '"') {
    if (raw.size() < 2 || raw.back() != '"') fail(line, "unterminated string");
    const std::string inner = raw.substr(1, raw.size() - 2);
    if (inner.find('"') != std::string::npos) fail(line, "stray quote in string");
    return {Value::Kind::String, inner, {}, line};
  }
  if (raw == "true" || raw == "false") return {Value::Kind::Bool, raw, {}, line};
  if (raw.front() == '[') {
    if (raw.back() != ']') fail(line, "unterminated array");
    Value v{Value::Kind::Array, raw, {}, line};
    std::stringstream ss(raw.substr(1, raw.size() - 2));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      v.items.push_back(item);
    }
    return v;
  }
  return {Value::Kind::Number, raw, {}, line};
}

Table parse_table(std::string_view text) {
  static const std::set<std::string> sections{"grid", "time", "model", "output"};
  Table table;
  std::string section;
  std::stringstream ss{std::string(text)};
  std::string raw_line;
  int line = 0;
  while (std::getline(ss, raw_line)) {
    ++line;
    const std::string l = trim(strip_comment(raw_line));
    if (l.empty()) continue;
    if (l.front() == '[') {
      if (l.back() != ']') fail(line, "malformed section header");
      section = trim(l.substr(1, l.size() - 2));
      if (!sections.count(section)) fail(line, "unknown section [" + section + "]");
      if (table.count(section)) fail(line, "duplicate section [" + section + "]");
      table[section];
      continue;
    }
    const auto eq = l.find('=');
    if (eq == std::string::npos) fail(line, "expected key = value");
    if (section.empty()) fail(line, "key outside any section");
    const std::string key = trim(l.substr(0, eq));
    if (key.empty()) fail(line, "empty key");
    auto& sec = table[section];
    if (sec.count(key)) fail(line, "duplicate key " + key);
    sec.emplace(key, parse_value(trim(l.substr(eq + 1)), line));
  }
  return table;
}

double to_double(const std::string& s, int line) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) {
    fail(line, "not a number: " + s);
  }
  return v;
}

double as_double(const Value& v) {
  if (v.kind != Value::Kind::Number) fail(v.line, "expected a number");
  return to_double(v.text, v.line);
}

long long as_int(const Value& v) {
  if (v.kind != Value::Kind::Number) fail(v.line, "expected an integer");
  long long out = 0;
  const char* end = v.text.data() + v.text.size();
  const auto res = std::from_chars(v.text.data(), end, out);
  if (res.ec != std::errc() || res.ptr != end) fail(v.line, "expected an integer: " + v.text);
  return out;
}

std::uint64_t as_u64(const Value& v) {
  if (v.kind != Value::Kind::Number) fail(v.line, "expected an unsigned integer");
  std::uint64_t out = 0;
  const char* end = v.text.data() + v.text.size();
  const auto res = std::from_chars(v.text.data(), end, out);
  if (res.ec != std::errc() || res.ptr != end) {
    fail(v.line, "expected an unsigned integer: " + v.text);
  }
  return out;
}

bool as_bool(const Value& v) {
  if (v.kind != Value::Kind::Bool) fail(v.line, "expected true or false");
  return v.text == "true";
}

std::string as_string(const Value& v) {
  if (v.kind != Value::Kind::String) fail(v.line, "expected a quoted string");
  return v.text;
}

std::vector<double> as_list(const Value& v) {
  if (v.kind != Value::Kind::Array) fail(v.line, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& item : v.items) out.push_back(to_double(item, v.line));
  return out;
}

constexpr std::array<std::pair<ModelKind, std::string_view>, 4> kModels{{
    {ModelKind::CahnHilliard, "ch"},
    {ModelKind::Pfc, "pfc"},
    {ModelKind::Vesicle, "vesicle"},
    {ModelKind::Surfactant, "surfactant"},
}};
constexpr std::array<std::pair<SchemeKind, std::string_view>, 5> kSchemes{{
    {SchemeKind::RavCn, "rav_cn"},
    {SchemeKind::RavBdf3, "rav_bdf3"},
    {SchemeKind::RavBdf4, "rav_bdf4"},
    {SchemeKind::Sav1, "sav1"},
    {SchemeKind::SavCn, "sav_cn"},
}};
constexpr std::array<std::pair<InitKind, std::string_view>, 5> kInits{{
    {InitKind::SineCh, "sine_ch"},
    {InitKind::SinePfc, "sine_pfc"},
    {InitKind::RandomOffset, "random_offset"},
    {InitKind::TanhEllipse, "tanh_ellipse"},
    {InitKind::RandomTwoField, "random_two_field"},
}};

template <typename E, std::size_t N>
E lookup(const std::array<std::pair<E, std::string_view>, N>& table, const Value& v,
         const char* what) {
  const std::string s = as_string(v);
  for (const auto& [e, name] : table) {
    if (name == s) return e;
  }
  fail(v.line, std::string("unknown ") + what + " \"" + s + "\"");
}

template <typename E, std::size_t N>
std::string_view name_of(const std::array<std::pair<E, std::string_view>, N>& table, E e) {
  for (const auto& [k, name] : table) {
    if (k == e) return name;
  }
  return "?";
}

// Documented model parameter defaults.
const std::map<std::string, double>& param_defaults(ModelKind m) {
  static const std::map<std::string, double> ch{{"epsilon", 0.1}};
  static const std::map<std::string, double> pfc{{"epsilon", 0.02}};
  static const std::map<std::string, double> ves{
      {"epsilon", 0.1}, {"lambda_vesicle", 1e-3}, {"M1", 5e4}, {"M2", 5e4}};
  static const std::map<std::string, double> surf{{"epsilon", 0.08}, {"delta", 0.08},
                                                  {"gamma1", 0.5},   {"gamma2", 1e-4},
                                                  {"M_phi", 2e-3},   {"M_rho", 2e-3}};
  switch (m) {
    case ModelKind::CahnHilliard: return ch;
    case ModelKind::Pfc: return pfc;
    case ModelKind::Vesicle: return ves;
    case ModelKind::Surfactant: return surf;
  }
  return ch;
}

bool is_multiple(double t, double dt) {
  const double n = std::round(t / dt);
  return n >= 1.0 && std::abs(n * dt - t) <= 1e-9 * t;
}

}  // namespace

std::string_view to_string(ModelKind m) { return name_of(kModels, m); }
std::string_view to_string(SchemeKind s) { return name_of(kSchemes, s); }
std::string_view to_string(InitKind i) { return name_of(kInits, i); }

bool compatible(ModelKind model, SchemeKind scheme) {
  switch (scheme) {
    case SchemeKind::RavCn: return true;
    case SchemeKind::RavBdf3:
    case SchemeKind::RavBdf4: return model != ModelKind::Surfactant;
    case SchemeKind::Sav1:
    case SchemeKind::SavCn: return model == ModelKind::CahnHilliard || model == ModelKind::Pfc;
  }
  return false;
}

RunConfig parse_config(std::string_view text) {
  Table t = parse_table(text);
  RunConfig cfg;

  // Pops a key so that whatever remains at the end is unknown.
  auto take = [&](const char* sec, const char* key) -> std::optional<Value> {
    auto s = t.find(sec);
    if (s == t.end()) return std::nullopt;
    auto k = s->second.find(key);
    if (k == s->second.end()) return std::nullopt;
    Value v = k->second;
    s->second.erase(k);
    return v;
  };

  const auto model = take("model", "model");
  if (!model) throw ConfigError("config: [model] model is required");
  cfg.model = lookup(kModels, *model, "model");
  if (auto v = take("model", "init")) cfg.init = lookup(kInits, *v, "init");
  if (auto v = take("model", "lambda_stab")) cfg.lambda_stab = as_double(*v);
  if (auto v = take("model", "C0")) cfg.c0 = as_double(*v);
  if (auto v = take("model", "dealias")) cfg.dealias = as_bool(*v);
  if (auto v = take("model", "seed")) cfg.seed = as_u64(*v);
  for (const auto& [key, def] : param_defaults(cfg.model)) {
    if (auto v = take("model", key.c_str())) cfg.model_params[key] = as_double(*v);
  }

  if (auto v = take("grid", "nx")) cfg.nx = static_cast<int>(as_int(*v));
  if (auto v = take("grid", "ny")) cfg.ny = static_cast<int>(as_int(*v));
  if (auto v = take("grid", "Lx")) cfg.lx = as_double(*v);
  if (auto v = take("grid", "Ly")) cfg.ly = as_double(*v);

  if (auto v = take("time", "scheme")) cfg.scheme = lookup(kSchemes, *v, "scheme");
  if (auto v = take("time", "dt")) cfg.dt = as_double(*v);
  if (auto v = take("time", "t_end")) cfg.t_end = as_double(*v);
  if (auto v = take("time", "dt_list")) cfg.dt_list = as_list(*v);
  if (auto v = take("time", "dt_ref")) cfg.dt_ref = as_double(*v);
  if (cfg.dt == 0.0 && !cfg.dt_list.empty()) cfg.dt = cfg.dt_list.front();

  if (auto v = take("output", "output_dir")) cfg.output_dir = as_string(*v);
  if (auto v = take("output", "snapshot_every")) cfg.snapshot_every = as_int(*v);

  for (const auto& [sec, keys] : t) {
    for (const auto& [key, v] : keys) {
      std::string hint;
      if (sec == "model") hint = " (not a parameter of model " + std::string(to_string(cfg.model)) + ")";
      fail(v.line, "unknown key [" + sec + "] " + key + hint);
    }
  }
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

void validate(const RunConfig& cfg) {
  if (!compatible(cfg.model, cfg.scheme)) {
    throw ConfigError("scheme " + std::string(to_string(cfg.scheme)) +
                      " is not available for model " + std::string(to_string(cfg.model)));
  }
  const bool two_field_init = cfg.init == InitKind::RandomTwoField;
  if (two_field_init != (cfg.model == ModelKind::Surfactant)) {
    throw ConfigError("init " + std::string(to_string(cfg.init)) + " does not fit model " +
                      std::string(to_string(cfg.model)));
  }
  Grid2D(cfg.nx, cfg.ny, cfg.lx, cfg.ly);
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw ConfigError("[time] dt must be positive");
  if (!(cfg.t_end >= cfg.dt) || !std::isfinite(cfg.t_end)) {
    throw ConfigError("[time] t_end must be at least dt");
  }
  if (!is_multiple(cfg.t_end, cfg.dt)) throw ConfigError("[time] t_end must be a multiple of dt");
  for (std::size_t i = 0; i < cfg.dt_list.size(); ++i) {
    const double d = cfg.dt_list[i];
    if (!(d > 0.0)) throw ConfigError("[time] dt_list entries must be positive");
    if (!is_multiple(cfg.t_end, d)) throw ConfigError("[time] t_end must be a multiple of every dt_list entry");
    if (i > 0 && std::abs(cfg.dt_list[i - 1] / d - 2.0) > 1e-9) {
      throw ConfigError("[time] dt_list must halve at every entry");
    }
  }
  if (cfg.dt_ref) {
    if (cfg.dt_list.empty()) throw ConfigError("[time] dt_ref needs dt_list");
    const double finest = cfg.dt_list.back();
    if (!(*cfg.dt_ref > 0.0) || !(*cfg.dt_ref < finest / 4.0)) {
      throw ConfigError("[time] dt_ref must be positive and below min(dt_list)/4");
    }
    if (!is_multiple(cfg.t_end, *cfg.dt_ref)) throw ConfigError("[time] t_end must be a multiple of dt_ref");
  }
  if (!(cfg.lambda_stab >= 0.0)) throw ConfigError("[model] lambda_stab must be >= 0");
  if (cfg.snapshot_every < 0) throw ConfigError("[output] snapshot_every must be >= 0");
  for (const auto& [key, v] : cfg.model_params) {
    if (!param_defaults(cfg.model).count(key)) {
      throw ConfigError("[model] " + key + " is not a parameter of model " +
                        std::string(to_string(cfg.model)));
    }
    if (!std::isfinite(v)) throw ConfigError("[model] " + key + " must be finite");
  }
}

double model_param(const RunConfig& cfg, const std::string& key) {
  const auto& defs = param_defaults(cfg.model);
  const auto d = defs.find(key);
  if (d == defs.end()) {
    throw ConfigError(key + " is not a parameter of model " + std::string(to_string(cfg.model)));
  }
  const auto it = cfg.model_params.find(key);
  return it != cfg.model_params.end() ? it->second : d->second;
}

}  // namespace ravflow
