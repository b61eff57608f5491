#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "physeeio/error.hpp"

namespace physeeio {

/// Fixed-point decimal with six fractional digits (micro-USD, milligrams).
/// Trade quantities are held in this form so that splitting and summing
/// across the crosswalk conserves totals exactly.
class Decimal {
 public:
  using Rep = __int128;
  static constexpr int kFractionDigits = 6;
  static constexpr std::int64_t kScale = 1'000'000;

  constexpr Decimal() = default;

  static constexpr Decimal from_units(Rep units) {
    Decimal d;
    d.units_ = units;
    return d;
  }

  /// Parses plain or scientific decimal notation ("12.5", "-3", "1.2e3").
  /// Digits beyond the sixth fractional place are rounded half-to-even.
  /// Returns false on malformed text or overflow.
  static bool parse(std::string_view text, Decimal& out) {
    std::size_t pos = 0;
    bool negative = false;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
      negative = text[pos] == '-';
      ++pos;
    }
    std::string digits;
    int point_shift = 0;
    bool seen_point = false;
    bool any_digit = false;
    for (; pos < text.size(); ++pos) {
      const char c = text[pos];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        any_digit = true;
        digits.push_back(c);
        if (seen_point) ++point_shift;
      } else if (c == '.' && !seen_point) {
        seen_point = true;
      } else {
        break;
      }
    }
    if (!any_digit) return false;
    int exponent = 0;
    if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
      ++pos;
      bool exp_negative = false;
      if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
        exp_negative = text[pos] == '-';
        ++pos;
      }
      if (pos >= text.size()) return false;
      long e = 0;
      for (; pos < text.size(); ++pos) {
        const char c = text[pos];
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
        e = e * 10 + (c - '0');
        if (e > 400) return false;
      }
      exponent = static_cast<int>(exp_negative ? -e : e);
    }
    if (pos != text.size()) return false;

    // value = digits * 10^(exponent - point_shift); want digits * 10^(shift)
    const int shift = exponent - point_shift + kFractionDigits;
    const auto first_nonzero = digits.find_first_not_of('0');
    if (first_nonzero == std::string::npos) {
      out = Decimal{};
      return true;
    }
    digits.erase(0, first_nonzero);
    constexpr int kMaxDigits = 36;
    Rep units = 0;
    if (shift >= 0) {
      if (static_cast<int>(digits.size()) + shift > kMaxDigits) return false;
      for (char c : digits) units = units * 10 + (c - '0');
      for (int i = 0; i < shift; ++i) units *= 10;
    } else {
      const int drop = -shift;
      const int keep = static_cast<int>(digits.size()) - drop;
      if (keep > kMaxDigits) return false;
      for (int i = 0; i < keep; ++i) units = units * 10 + (digits[i] - '0');
      // half-to-even rounding on the dropped tail
      if (keep >= 0 && drop > 0) {
        const std::string_view tail = std::string_view(digits).substr(keep);
        const int first = tail[0] - '0';
        const bool rest_nonzero = tail.find_first_not_of('0', 1) != std::string_view::npos;
        if (first > 5 || (first == 5 && (rest_nonzero || (units % 2) != 0))) ++units;
      }
    }
    out.units_ = negative ? -units : units;
    return true;
  }

  constexpr Rep units() const { return units_; }
  double to_double() const {
    return static_cast<double>(static_cast<long double>(units_) / kScale);
  }
  constexpr bool is_negative() const { return units_ < 0; }
  constexpr bool is_zero() const { return units_ == 0; }

  std::string to_string() const {
    Rep v = units_ < 0 ? -units_ : units_;
    std::string whole;
    Rep w = v / kScale;
    do {
      whole.insert(whole.begin(), static_cast<char>('0' + static_cast<int>(w % 10)));
      w /= 10;
    } while (w > 0);
    std::string frac(kFractionDigits, '0');
    Rep f = v % kScale;
    for (int i = kFractionDigits - 1; i >= 0; --i) {
      frac[i] = static_cast<char>('0' + static_cast<int>(f % 10));
      f /= 10;
    }
    while (!frac.empty() && frac.back() == '0') frac.pop_back();
    std::string out = (units_ < 0 ? "-" : "") + whole;
    if (!frac.empty()) out += "." + frac;
    return out;
  }

  constexpr Decimal& operator+=(Decimal o) {
    units_ += o.units_;
    return *this;
  }
  friend constexpr Decimal operator+(Decimal a, Decimal b) { return a += b; }
  friend constexpr Decimal operator-(Decimal a, Decimal b) {
    return from_units(a.units_ - b.units_);
  }
  friend constexpr bool operator==(Decimal a, Decimal b) { return a.units_ == b.units_; }
  friend constexpr auto operator<=>(Decimal a, Decimal b) { return a.units_ <=> b.units_; }

 private:
  Rep units_ = 0;
};

/// Splits a non-negative amount into parts proportional to `shares` (which
/// must be non-negative and sum to ~1) so that the parts sum exactly to the
/// amount. Leftover units go to the largest fractional remainders, ties to the
/// lowest index.
inline std::vector<Decimal> split_exact(Decimal amount, std::span<const double> shares) {
  std::vector<Decimal> parts(shares.size());
  if (shares.empty()) return parts;
  const Decimal::Rep total = amount.units();
  const long double share_sum =
      std::accumulate(shares.begin(), shares.end(), static_cast<long double>(0));
  std::vector<Decimal::Rep> base(shares.size());
  std::vector<long double> frac(shares.size());
  Decimal::Rep assigned = 0;
  for (std::size_t k = 0; k < shares.size(); ++k) {
    const long double exact = static_cast<long double>(total) * shares[k] / share_sum;
    const long double fl = std::floor(exact);
    base[k] = static_cast<Decimal::Rep>(fl);
    frac[k] = exact - fl;
    assigned += base[k];
  }
  Decimal::Rep leftover = total - assigned;
  std::vector<std::size_t> order(shares.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
  // long double products can miss by a unit or two either way
  std::size_t cursor = 0;
  while (leftover > 0) {
    ++base[order[cursor % order.size()]];
    --leftover;
    ++cursor;
  }
  cursor = 0;
  while (leftover < 0) {
    const std::size_t k = order[order.size() - 1 - (cursor % order.size())];
    if (base[k] > 0) {
      --base[k];
      ++leftover;
    }
    ++cursor;
  }
  for (std::size_t k = 0; k < shares.size(); ++k) parts[k] = Decimal::from_units(base[k]);
  return parts;
}

}  // namespace physeeio
