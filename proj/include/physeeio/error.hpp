#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace physeeio {

enum class ErrorCode {
  DimensionMismatch,
  DuplicateSectorId,
  NonProductiveEconomy,
  NegativeCoefficient,
  NegativeValue,
  NonFiniteValue,
  SingularMatrix,
  UnknownImpactCategory,
  UnknownSector,
  MissingPrice,
  NonPositivePrice,
  UnitMismatch,
  ZeroCif,
  DegenerateRange,
  EmptyRates,
  ZeroWeight,
  NonPositiveTau,
  ZeroInputMass,
  InvalidWasteCoefficient,
  UnresolvedDependency,
  NonConvergentCycle,
  MalformedCode,
  EmptyFile,
  NonPositiveMass,
  SchemaViolation,
  EncodingError,
  FileNotFound,
  ConfigError,
};

inline constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DuplicateSectorId: return "DuplicateSectorId";
    case ErrorCode::NonProductiveEconomy: return "NonProductiveEconomy";
    case ErrorCode::NegativeCoefficient: return "NegativeCoefficient";
    case ErrorCode::NegativeValue: return "NegativeValue";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::UnknownImpactCategory: return "UnknownImpactCategory";
    case ErrorCode::UnknownSector: return "UnknownSector";
    case ErrorCode::MissingPrice: return "MissingPrice";
    case ErrorCode::NonPositivePrice: return "NonPositivePrice";
    case ErrorCode::UnitMismatch: return "UnitMismatch";
    case ErrorCode::ZeroCif: return "ZeroCif";
    case ErrorCode::DegenerateRange: return "DegenerateRange";
    case ErrorCode::EmptyRates: return "EmptyRates";
    case ErrorCode::ZeroWeight: return "ZeroWeight";
    case ErrorCode::NonPositiveTau: return "NonPositiveTau";
    case ErrorCode::ZeroInputMass: return "ZeroInputMass";
    case ErrorCode::InvalidWasteCoefficient: return "InvalidWasteCoefficient";
    case ErrorCode::UnresolvedDependency: return "UnresolvedDependency";
    case ErrorCode::NonConvergentCycle: return "NonConvergentCycle";
    case ErrorCode::MalformedCode: return "MalformedCode";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::NonPositiveMass: return "NonPositiveMass";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::EncodingError: return "EncodingError";
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

/// Location of a problem inside an input file. Line and column are 1-based;
/// zero means "not applicable".
struct SourceLocation {
  std::string file;
  std::size_t line = 0;
  std::size_t column = 0;

  bool empty() const { return file.empty() && line == 0; }
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, SourceLocation where = {})
      : std::runtime_error(format(code, message, where)),
        code_(code),
        detail_(message),
        where_(std::move(where)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }
  const SourceLocation& where() const noexcept { return where_; }

 private:
  static std::string format(ErrorCode code, const std::string& message,
                            const SourceLocation& where) {
    std::string out(to_string(code));
    if (!where.file.empty()) {
      out += " [" + where.file;
      if (where.line > 0) out += ":" + std::to_string(where.line);
      if (where.column > 0) out += ":" + std::to_string(where.column);
      out += "]";
    }
    out += ": " + message;
    return out;
  }

  ErrorCode code_;
  std::string detail_;
  SourceLocation where_;
};

}  // namespace physeeio
