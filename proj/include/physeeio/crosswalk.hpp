#pragma once

// HS -> NAICS -> BEA concordances and aggregation of import records onto
// BEA sectors. Amounts are split in fixed-point so totals are conserved
// exactly, including whatever cannot be mapped.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "physeeio/core_model.hpp"
#include "physeeio/decimal.hpp"
#include "physeeio/error.hpp"
#include "physeeio/io/csv.hpp"
#include "physeeio/parallel.hpp"
#include "physeeio/price_imputation.hpp"

namespace physeeio {

namespace detail {
inline bool all_digits(std::string_view s) {
  return !s.empty() &&
         std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}
}  // namespace detail

/// Six-digit Harmonized System commodity code.
class HsCode {
 public:
  HsCode() = default;
  explicit HsCode(std::string code) : code_(std::move(code)) {
    if (!valid(code_)) throw Error(ErrorCode::MalformedCode, "'" + code_ + "' is not a 6-digit HS code");
  }
  static bool valid(std::string_view s) { return s.size() == 6 && detail::all_digits(s); }
  const std::string& str() const { return code_; }
  friend auto operator<=>(const HsCode&, const HsCode&) = default;

 private:
  std::string code_;
};

/// NAICS code at the 2-, 3-, 4- or 6-digit level.
class NaicsCode {
 public:
  NaicsCode() = default;
  explicit NaicsCode(std::string code) : code_(std::move(code)) {
    if (!valid(code_)) {
      throw Error(ErrorCode::MalformedCode, "'" + code_ + "' is not a 2/3/4/6-digit NAICS code");
    }
  }
  static bool valid(std::string_view s) {
    return (s.size() == 2 || s.size() == 3 || s.size() == 4 || s.size() == 6) && detail::all_digits(s);
  }
  const std::string& str() const { return code_; }
  friend auto operator<=>(const NaicsCode&, const NaicsCode&) = default;

 private:
  std::string code_;
};

inline bool valid_sector_code(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '/';
  });
}

enum class ConcordanceKind { HsToNaics, NaicsToBea };

struct ConcordanceTarget {
  std::string code;
  std::optional<double> share;
};

struct Concordance {
  ConcordanceKind kind = ConcordanceKind::HsToNaics;
  std::string provenance;
  std::map<std::string, std::vector<ConcordanceTarget>> entries;
  std::vector<std::string> warnings;

  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& [src, targets] : entries) n += targets.size();
    return n;
  }

  /// Shares for one source: explicit when given, else an equal split.
  std::vector<double> shares_of(const std::vector<ConcordanceTarget>& targets) const {
    std::vector<double> out;
    for (const auto& t : targets) out.push_back(t.share ? *t.share : 1.0 / static_cast<double>(targets.size()));
    return out;
  }
};

/// Parses `source_code,target_code[,share]`. Duplicate pairs are dropped with
/// a warning. If any row of a source gives a share, all of its rows must, and
/// they must sum to 1.
inline Concordance parse_concordance(const io::CsvTable& t, ConcordanceKind kind) {
  const bool has_share = io::expect_header(t, {"source_code", "target_code"}, {"share"}) == 1;
  if (t.rows.empty()) throw Error(ErrorCode::EmptyFile, "concordance has no rows", {t.file, 0, 0});
  Concordance c;
  c.kind = kind;
  c.provenance = t.file;
  std::map<std::string, std::size_t> first_line;
  for (const auto& row : t.rows) {
    const auto& src = io::non_empty(t, row, 0);
    const auto& dst = io::non_empty(t, row, 1);
    const bool src_ok = kind == ConcordanceKind::HsToNaics ? HsCode::valid(src) : NaicsCode::valid(src);
    const bool dst_ok = kind == ConcordanceKind::HsToNaics ? NaicsCode::valid(dst) : valid_sector_code(dst);
    if (!src_ok) throw Error(ErrorCode::MalformedCode, "malformed source code '" + src + "'", t.at(row, 1));
    if (!dst_ok) throw Error(ErrorCode::MalformedCode, "malformed target code '" + dst + "'", t.at(row, 2));
    std::optional<double> share;
    if (has_share && !row.fields[2].empty()) {
      share = io::parse_number(t, row, 2);
      if (!(*share > 0.0 && *share <= 1.0)) {
        throw Error(ErrorCode::SchemaViolation, "share must lie in (0, 1]", t.at(row, 3));
      }
    }
    auto& targets = c.entries[src];
    auto dup = std::find_if(targets.begin(), targets.end(), [&](const auto& x) { return x.code == dst; });
    if (dup != targets.end()) {
      c.warnings.push_back(t.file + ":" + std::to_string(row.line) + ": duplicate mapping " + src +
                           " -> " + dst + " ignored");
      continue;
    }
    targets.push_back({dst, share});
    first_line.try_emplace(src, row.line);
  }
  for (const auto& [src, targets] : c.entries) {
    const auto explicit_count = std::count_if(targets.begin(), targets.end(), [](const auto& x) { return x.share.has_value(); });
    if (explicit_count == 0) continue;
    const SourceLocation where{t.file, first_line[src], 3};
    if (static_cast<std::size_t>(explicit_count) != targets.size()) {
      throw Error(ErrorCode::SchemaViolation, "source '" + src + "' mixes explicit and blank shares", where);
    }
    double sum = 0.0;
    for (const auto& x : targets) sum += *x.share;
    if (std::abs(sum - 1.0) > 1e-9) {
      throw Error(ErrorCode::SchemaViolation,
                  "shares for source '" + src + "' sum to " + std::to_string(sum), where);
    }
  }
  return c;
}

inline Concordance parse_concordance(const std::filesystem::path& file, ConcordanceKind kind) {
  return parse_concordance(io::read_csv(file), kind);
}

/// Result of translating one HS code: sector shares plus whatever fraction
/// could not be mapped. A code with no mapping at all has unmapped_share 1.
struct Translation {
  std::vector<std::pair<SectorId, double>> shares;  // sorted by sector
  double unmapped_share = 0.0;

  bool unmapped() const { return shares.empty(); }
};

/// HS -> BEA table composed from the two concordances at construction.
class Crosswalk {
 public:
  Crosswalk(const Concordance& hs2naics, const Concordance& naics2bea) {
    for (const auto& [hs, naics_targets] : hs2naics.entries) {
      const auto stage1 = hs2naics.shares_of(naics_targets);
      bool any_explicit = false;
      for (const auto& t : naics_targets) any_explicit |= t.share.has_value();
      std::map<SectorId, double> composed;
      double unmapped = 0.0;
      std::size_t unmapped_paths = 0;
      for (std::size_t k = 0; k < naics_targets.size(); ++k) {
        auto it = naics2bea.entries.find(naics_targets[k].code);
        if (it == naics2bea.entries.end()) {
          unmapped += stage1[k];
          ++unmapped_paths;
          continue;
        }
        const auto stage2 = naics2bea.shares_of(it->second);
        for (const auto& t : it->second) any_explicit |= t.share.has_value();
        for (std::size_t m = 0; m < it->second.size(); ++m) {
          composed[SectorId(it->second[m].code)] += stage1[k] * stage2[m];
        }
      }
      Translation tr;
      if (!any_explicit && !composed.empty()) {
        // no share data on the path: the mapped part splits equally over the
        // distinct BEA targets
        unmapped = static_cast<double>(unmapped_paths) / static_cast<double>(naics_targets.size());
        const double each = (1.0 - unmapped) / static_cast<double>(composed.size());
        for (auto& [sector, s] : composed) s = each;
      }
      for (const auto& [sector, s] : composed) tr.shares.emplace_back(sector, s);
      tr.unmapped_share = composed.empty() ? 1.0 : unmapped;
      table_.emplace(hs, std::move(tr));
    }
  }

  Translation translate(const HsCode& hs) const {
    auto it = table_.find(hs.str());
    if (it == table_.end()) return Translation{{}, 1.0};
    return it->second;
  }

  const std::map<std::string, Translation>& table() const { return table_; }

 private:
  std::map<std::string, Translation> table_;
};

inline Translation translate(const HsCode& hs, const Concordance& hs2naics, const Concordance& naics2bea) {
  return Crosswalk(hs2naics, naics2bea).translate(hs);
}

struct TradeRecord {
  HsCode hs;
  Decimal cif_usd;
  Decimal net_weight_kg;
};

struct DutyRecord {
  HsCode hs;
  Decimal duty_usd;
};

struct CrosswalkDiagnostics {
  std::size_t trade_records = 0;
  std::size_t duty_records = 0;
  Decimal input_cif, input_weight, input_duty;
  Decimal unmapped_cif, unmapped_weight, unmapped_duty;
  std::map<std::string, std::size_t> unmapped_codes;  // HS code -> record count
  std::size_t multi_mapped_codes = 0;
  std::size_t partially_mapped_codes = 0;
};

struct AggregationResult {
  std::vector<IndustryTradeAggregate> aggregates;  // sorted by sector
  CrosswalkDiagnostics diagnostics;
};

namespace detail {

struct Bucket {
  Decimal cif, weight, duty;
};

struct ChunkTotals {
  std::map<SectorId, Bucket> sectors;
  Bucket unmapped;
  std::map<std::string, std::size_t> unmapped_codes;
};

inline void distribute(const Translation& tr, Decimal amount, Decimal Bucket::*field,
                       ChunkTotals& into) {
  std::vector<double> shares;
  for (const auto& [sector, s] : tr.shares) shares.push_back(s);
  shares.push_back(tr.unmapped_share);
  const auto parts = split_exact(amount, shares);
  for (std::size_t k = 0; k < tr.shares.size(); ++k) {
    into.sectors[tr.shares[k].first].*field += parts[k];
  }
  into.unmapped.*field += parts.back();
}

}  // namespace detail

/// Sums CIF, weight and duty per BEA sector. Per-sector totals plus the
/// unmapped bucket equal the input totals exactly. Output does not depend on
/// record order or on `threads`.
inline AggregationResult aggregate(const std::vector<TradeRecord>& trade,
                                   const std::vector<DutyRecord>& duty, const Crosswalk& cw,
                                   unsigned threads = 1) {
  const std::size_t total = trade.size() + duty.size();
  std::vector<detail::ChunkTotals> chunks(chunk_count(total, threads));
  parallel_chunks(total, threads, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    auto& out = chunks[chunk];
    for (std::size_t r = begin; r < end; ++r) {
      if (r < trade.size()) {
        const auto& rec = trade[r];
        const auto tr = cw.translate(rec.hs);
        if (tr.unmapped()) ++out.unmapped_codes[rec.hs.str()];
        detail::distribute(tr, rec.cif_usd, &detail::Bucket::cif, out);
        detail::distribute(tr, rec.net_weight_kg, &detail::Bucket::weight, out);
      } else {
        const auto& rec = duty[r - trade.size()];
        const auto tr = cw.translate(rec.hs);
        if (tr.unmapped()) ++out.unmapped_codes[rec.hs.str()];
        detail::distribute(tr, rec.duty_usd, &detail::Bucket::duty, out);
      }
    }
  });

  AggregationResult result;
  auto& diag = result.diagnostics;
  diag.trade_records = trade.size();
  diag.duty_records = duty.size();
  for (const auto& r : trade) {
    diag.input_cif += r.cif_usd;
    diag.input_weight += r.net_weight_kg;
  }
  for (const auto& r : duty) diag.input_duty += r.duty_usd;

  std::map<SectorId, detail::Bucket> merged;
  for (const auto& c : chunks) {
    for (const auto& [sector, b] : c.sectors) {
      auto& m = merged[sector];
      m.cif += b.cif;
      m.weight += b.weight;
      m.duty += b.duty;
    }
    diag.unmapped_cif += c.unmapped.cif;
    diag.unmapped_weight += c.unmapped.weight;
    diag.unmapped_duty += c.unmapped.duty;
    for (const auto& [code, n] : c.unmapped_codes) diag.unmapped_codes[code] += n;
  }
  std::set<std::string> seen;
  auto note_code = [&](const HsCode& hs) {
    if (!seen.insert(hs.str()).second) return;
    const auto tr = cw.translate(hs);
    if (tr.shares.size() > 1) ++diag.multi_mapped_codes;
    if (!tr.unmapped() && tr.unmapped_share > 0.0) ++diag.partially_mapped_codes;
  };
  for (const auto& r : trade) note_code(r.hs);
  for (const auto& r : duty) note_code(r.hs);

  for (const auto& [sector, b] : merged) result.aggregates.push_back({sector, b.cif, b.weight, b.duty});
  return result;
}

inline std::vector<TradeRecord> parse_trade_records(const io::CsvTable& t) {
  io::expect_header(t, {"hs_code", "cif_usd", "net_weight_kg"});
  std::vector<TradeRecord> out;
  out.reserve(t.rows.size());
  for (const auto& row : t.rows) {
    const auto& code = io::non_empty(t, row, 0);
    if (!HsCode::valid(code)) throw Error(ErrorCode::MalformedCode, "'" + code + "' is not a 6-digit HS code", t.at(row, 1));
    out.push_back({HsCode(code), io::parse_decimal(t, row, 1), io::parse_decimal(t, row, 2)});
  }
  return out;
}

inline std::vector<DutyRecord> parse_duty_records(const io::CsvTable& t) {
  io::expect_header(t, {"hs_code", "duty_usd"});
  std::vector<DutyRecord> out;
  out.reserve(t.rows.size());
  for (const auto& row : t.rows) {
    const auto& code = io::non_empty(t, row, 0);
    if (!HsCode::valid(code)) throw Error(ErrorCode::MalformedCode, "'" + code + "' is not a 6-digit HS code", t.at(row, 1));
    out.push_back({HsCode(code), io::parse_decimal(t, row, 1)});
  }
  return out;
}

}  // namespace physeeio
