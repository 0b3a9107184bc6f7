#pragma once

#include <boost/rational.hpp>

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>

#include "flipbench/error.hpp"

namespace flipbench {

using Rational = boost::rational<std::int64_t>;

/// Formats as `num/den` (always with a denominator, `0/1` for zero).
inline std::string to_string(const Rational& r) {
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

inline double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline std::int64_t floor(const Rational& r) { return floor_div(r.numerator(), r.denominator()); }
inline std::int64_t ceil(const Rational& r) { return -floor_div(-r.numerator(), r.denominator()); }

namespace detail {

inline std::int64_t parse_int(std::string_view s, std::string_view whole) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ParseError(0, "not a rational: '" + std::string(whole) + "'");
  return v;
}

}  // namespace detail

/// Accepts `a/b`, `a`, or a plain decimal such as `0.25` (converted exactly).
inline Rational parse_rational(std::string_view text) {
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto num = detail::parse_int(text.substr(0, slash), text);
    auto den = detail::parse_int(text.substr(slash + 1), text);
    if (den == 0) throw ParseError(0, "zero denominator in '" + std::string(text) + "'");
    return Rational(num, den);
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view ip = text.substr(0, dot), fp = text.substr(dot + 1);
    if (fp.size() > 15) throw ParseError(0, "too many decimals in '" + std::string(text) + "'");
    bool neg = !ip.empty() && ip.front() == '-';
    if (neg) ip.remove_prefix(1);
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < fp.size(); ++i) scale *= 10;
    std::int64_t whole = ip.empty() ? 0 : detail::parse_int(ip, text);
    std::int64_t frac = fp.empty() ? 0 : detail::parse_int(fp, text);
    Rational r(whole * scale + frac, scale);
    return neg ? -r : r;
  }
  return Rational(detail::parse_int(text, text));
}

}  // namespace flipbench
