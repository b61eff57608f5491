#pragma once

// Run configuration. The config file uses a small TOML subset: top-level
// keys, [table] headers, string / integer / float / boolean values, and
// `#` comments.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <iterator>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "physeeio/core_model.hpp"
#include "physeeio/error.hpp"
#include "physeeio/io/csv.hpp"
#include "physeeio/physical_extension.hpp"

namespace physeeio::io {

using TomlValue = std::variant<std::string, long long, double, bool>;

/// table name ("" for top level) -> key -> value
using TomlDocument = std::map<std::string, std::map<std::string, TomlValue>>;

namespace detail {

inline std::string_view strip_comment(std::string_view line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

inline std::string parse_basic_string(std::string_view s, const SourceLocation& where,
                                      std::size_t& consumed) {
  std::string out;
  for (std::size_t i = 1; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '"') {
      consumed = i + 1;
      return out;
    }
    if (c == '\\' && i + 1 < s.size()) {
      const char e = s[++i];
      switch (e) {
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        default: throw Error(ErrorCode::ConfigError, std::string("unsupported escape \\") + e, where);
      }
    } else {
      out.push_back(c);
    }
  }
  throw Error(ErrorCode::ConfigError, "unterminated string", where);
}

inline std::string parse_key(std::string_view k, const SourceLocation& where) {
  k = trim(k);
  if (k.empty()) throw Error(ErrorCode::ConfigError, "empty key", where);
  if (k.front() == '"') {
    std::size_t used = 0;
    auto s = parse_basic_string(k, where, used);
    if (used != k.size()) throw Error(ErrorCode::ConfigError, "junk after quoted key", where);
    return s;
  }
  for (char c : k) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) {
      throw Error(ErrorCode::ConfigError, "invalid bare key '" + std::string(k) + "'", where);
    }
  }
  return std::string(k);
}

inline TomlValue parse_value(std::string_view v, const SourceLocation& where) {
  v = trim(v);
  if (v.empty()) throw Error(ErrorCode::ConfigError, "missing value", where);
  if (v.front() == '"') {
    std::size_t used = 0;
    auto s = parse_basic_string(v, where, used);
    if (!trim(v.substr(used)).empty()) throw Error(ErrorCode::ConfigError, "junk after string value", where);
    return s;
  }
  if (v == "true") return true;
  if (v == "false") return false;
  std::string digits;
  for (char c : v) {
    if (c != '_') digits.push_back(c);
  }
  const char* b = digits.data();
  const char* e = b + digits.size();
  if (*b == '+') ++b;
  long long iv = 0;
  if (auto [p, ec] = std::from_chars(b, e, iv); ec == std::errc() && p == e) return iv;
  double dv = 0.0;
  if (auto [p, ec] = std::from_chars(b, e, dv); ec == std::errc() && p == e) return dv;
  throw Error(ErrorCode::ConfigError, "unsupported value '" + std::string(v) + "'", where);
}

}  // namespace detail

inline TomlDocument parse_toml(std::string_view text, const std::string& file) {
  TomlDocument doc;
  doc[""];
  std::string table;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    const SourceLocation where{file, line_no, 0};
    line = detail::trim(detail::strip_comment(line));
    if (!line.empty() && line.back() == '\r') line = detail::trim(line.substr(0, line.size() - 1));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3 || line[1] == '[') {
        throw Error(ErrorCode::ConfigError, "malformed table header", where);
      }
      table = detail::parse_key(line.substr(1, line.size() - 2), where);
      if (doc.count(table) && !doc[table].empty()) {
        throw Error(ErrorCode::ConfigError, "table [" + table + "] defined twice", where);
      }
      doc[table];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw Error(ErrorCode::ConfigError, "expected key = value", where);
    // a quoted key may itself contain '='
    std::size_t split = eq;
    if (detail::trim(line).front() == '"') {
      std::size_t used = 0;
      detail::parse_basic_string(detail::trim(line), where, used);
      split = line.find('=', used);
      if (split == std::string_view::npos) throw Error(ErrorCode::ConfigError, "expected key = value", where);
    }
    const auto key = detail::parse_key(line.substr(0, split), where);
    auto value = detail::parse_value(line.substr(split + 1), where);
    if (!doc[table].emplace(key, std::move(value)).second) {
      throw Error(ErrorCode::ConfigError, "duplicate key '" + key + "'", where);
    }
  }
  return doc;
}

struct InputPaths {
  std::filesystem::path sectors, a, demand, gross_output, satellite;
  std::optional<std::filesystem::path> trade, duty, hs2naics, naics2bea, tau, waste, production;
};

struct RunConfig {
  InputPaths inputs;
  std::optional<ClassificationLevel> level;
  std::string year;
  std::map<SectorId, PriceMethod> overrides;
  std::filesystem::path output_dir;
  unsigned threads = 1;
  std::string source;  // config file, for messages
};

inline std::optional<PriceMethod> parse_method(std::string_view s) {
  if (s == "data_driven") return PriceMethod::DataDriven;
  if (s == "price_driven") return PriceMethod::PriceDriven;
  if (s == "input_driven") return PriceMethod::InputDriven;
  return std::nullopt;
}

/// Builds a RunConfig; relative paths resolve against `base_dir`. Every
/// referenced input file must exist.
inline RunConfig make_run_config(const TomlDocument& doc, const std::filesystem::path& base_dir,
                                 const std::string& file) {
  RunConfig cfg;
  cfg.source = file;
  const SourceLocation where{file, 0, 0};
  auto get_string = [&](const std::string& table, const std::string& key) -> std::optional<std::string> {
    auto t = doc.find(table);
    if (t == doc.end()) return std::nullopt;
    auto it = t->second.find(key);
    if (it == t->second.end()) return std::nullopt;
    if (auto s = std::get_if<std::string>(&it->second)) return *s;
    throw Error(ErrorCode::ConfigError, "'" + key + "' must be a string", where);
  };
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };
  auto existing = [&](const std::string& key, bool required) -> std::optional<std::filesystem::path> {
    auto s = get_string("inputs", key);
    if (!s) {
      if (required) throw Error(ErrorCode::ConfigError, "missing required input '" + key + "'", where);
      return std::nullopt;
    }
    auto p = resolve(*s);
    if (!std::filesystem::is_regular_file(p)) {
      throw Error(ErrorCode::FileNotFound, "input '" + key + "' does not exist", {p.string(), 0, 0});
    }
    return p;
  };

  for (const auto& [table, keys] : doc) {
    if (table != "" && table != "inputs" && table != "overrides") {
      throw Error(ErrorCode::ConfigError, "unknown table [" + table + "]", where);
    }
  }
  static const char* kTopKeys[] = {"year", "level", "output_dir", "threads"};
  for (const auto& [key, v] : doc.at("")) {
    if (std::find(std::begin(kTopKeys), std::end(kTopKeys), key) == std::end(kTopKeys)) {
      throw Error(ErrorCode::ConfigError, "unknown key '" + key + "'", where);
    }
  }
  static const char* kInputKeys[] = {"sectors", "a", "demand", "gross_output", "satellite", "trade",
                                     "duty", "hs2naics", "naics2bea", "tau", "waste", "production"};
  if (auto t = doc.find("inputs"); t != doc.end()) {
    for (const auto& [key, v] : t->second) {
      if (std::find(std::begin(kInputKeys), std::end(kInputKeys), key) == std::end(kInputKeys)) {
        throw Error(ErrorCode::ConfigError, "unknown input '" + key + "'", where);
      }
    }
  }

  cfg.inputs.sectors = *existing("sectors", true);
  cfg.inputs.a = *existing("a", true);
  cfg.inputs.demand = *existing("demand", true);
  cfg.inputs.gross_output = *existing("gross_output", true);
  cfg.inputs.satellite = *existing("satellite", true);
  cfg.inputs.trade = existing("trade", false);
  cfg.inputs.duty = existing("duty", false);
  cfg.inputs.hs2naics = existing("hs2naics", false);
  cfg.inputs.naics2bea = existing("naics2bea", false);
  cfg.inputs.tau = existing("tau", false);
  cfg.inputs.waste = existing("waste", false);
  cfg.inputs.production = existing("production", false);
  const int trade_group = !!cfg.inputs.trade + !!cfg.inputs.duty + !!cfg.inputs.hs2naics + !!cfg.inputs.naics2bea;
  if (trade_group != 0 && trade_group != 4) {
    throw Error(ErrorCode::ConfigError, "trade, duty, hs2naics and naics2bea must be given together", where);
  }

  cfg.year = get_string("", "year").value_or("");
  if (auto lv = get_string("", "level")) {
    cfg.level = parse_level(*lv);
    if (!cfg.level) throw Error(ErrorCode::ConfigError, "unknown level '" + *lv + "'", where);
  }
  cfg.output_dir = resolve(get_string("", "output_dir").value_or("out"));
  if (auto t = doc.at("").find("threads"); t != doc.at("").end()) {
    auto n = std::get_if<long long>(&t->second);
    if (!n || *n < 1 || *n > 256) throw Error(ErrorCode::ConfigError, "threads must be an integer in [1, 256]", where);
    cfg.threads = static_cast<unsigned>(*n);
  }
  if (auto t = doc.find("overrides"); t != doc.end()) {
    for (const auto& [sector, v] : t->second) {
      auto s = std::get_if<std::string>(&v);
      auto m = s ? parse_method(*s) : std::nullopt;
      if (!m) {
        throw Error(ErrorCode::ConfigError,
                    "override for '" + sector + "' must be data_driven, price_driven or input_driven", where);
      }
      cfg.overrides.emplace(SectorId(sector), *m);
    }
  }
  return cfg;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  const auto text = read_file(path);
  const auto doc = parse_toml(text, path.string());
  return make_run_config(doc, path.parent_path(), path.string());
}

}  // namespace physeeio::io
