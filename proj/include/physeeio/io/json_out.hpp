#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "physeeio/error.hpp"

namespace physeeio::io {

using Json = nlohmann::ordered_json;

/// Rounds to 12 significant digits so serialized output is stable and short.
inline double round12(double v) {
  if (!std::isfinite(v) || v == 0.0) return v == 0.0 ? 0.0 : v;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

inline Json number(double v) {
  if (!std::isfinite(v)) return Json(nullptr);
  return Json(round12(v));
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::FileNotFound, "cannot write output file", {path.string(), 0, 0});
  out << text;
  if (!out) throw Error(ErrorCode::FileNotFound, "failed writing output file", {path.string(), 0, 0});
}

}  // namespace physeeio::io
