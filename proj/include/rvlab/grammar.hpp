#pragma once

// Tiny term language used in configs: name, name(arg, ...), where an argument
// is a number, `inf`, or another term. Example: max_of(norm(2), beta_star(0.25)).

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

#include "rvlab/error.hpp"

namespace rvlab {

struct Term;
using TermArg = std::variant<double, Term>;

struct Term {
  std::string name;
  std::vector<TermArg> args;
  bool has_parens = false;
};

/// Shortest round-trip decimal form; "inf" / "-inf" for infinities.
inline std::string format_number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace detail {

class TermParser {
 public:
  explicit TermParser(std::string_view text) : s_(text) {}

  Term parse_all() {
    Term t = term();
    skip_ws();
    if (pos_ != s_.size()) error("unexpected trailing input");
    return t;
  }

 private:
  [[noreturn]] void error(const std::string& msg) const {
    fail(ErrorCode::Config, msg + " at position " + std::to_string(pos_) + " in '" + std::string(s_) + "'");
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  Term term() {
    skip_ws();
    Term t;
    const auto start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    if (pos_ == start) error("expected a name");
    t.name = std::string(s_.substr(start, pos_ - start));
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == '(') {
      t.has_parens = true;
      ++pos_;
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == ')') {
        ++pos_;
        return t;
      }
      for (;;) {
        t.args.push_back(arg());
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == ',') {
          ++pos_;
          continue;
        }
        if (pos_ < s_.size() && s_[pos_] == ')') {
          ++pos_;
          break;
        }
        error("expected ',' or ')'");
      }
    }
    return t;
  }

  TermArg arg() {
    skip_ws();
    if (pos_ >= s_.size()) error("unexpected end of input");
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.') return number();
    if (s_.substr(pos_, 3) == "inf") {
      const auto after = pos_ + 3;
      if (after >= s_.size() || !(std::isalnum(static_cast<unsigned char>(s_[after])) || s_[after] == '_' || s_[after] == '(')) {
        pos_ = after;
        return std::numeric_limits<double>::infinity();
      }
    }
    return term();
  }

  double number() {
    auto begin = s_.data() + pos_;
    if (*begin == '+') ++begin;
    if (s_.substr(pos_).starts_with("-inf")) {
      pos_ += 4;
      return -std::numeric_limits<double>::infinity();
    }
    double v = 0.0;
    auto res = std::from_chars(begin, s_.data() + s_.size(), v);
    if (res.ec != std::errc()) error("bad number");
    pos_ = static_cast<std::size_t>(res.ptr - s_.data());
    return v;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Term parse_term(std::string_view text) { return detail::TermParser(text).parse_all(); }

/// Helpers for interpreting a parsed term.
inline double term_number(const Term& t, std::size_t i) {
  if (i >= t.args.size() || !std::holds_alternative<double>(t.args[i]))
    fail(ErrorCode::Config, "'" + t.name + "' expects a number as argument " + std::to_string(i + 1));
  return std::get<double>(t.args[i]);
}

inline const Term& term_child(const Term& t, std::size_t i) {
  if (i >= t.args.size() || !std::holds_alternative<Term>(t.args[i]))
    fail(ErrorCode::Config, "'" + t.name + "' expects a term as argument " + std::to_string(i + 1));
  return std::get<Term>(t.args[i]);
}

inline void term_arity(const Term& t, std::size_t n) {
  if (t.args.size() != n)
    fail(ErrorCode::Config, "'" + t.name + "' takes " + std::to_string(n) + " argument(s), got " +
                                std::to_string(t.args.size()));
}

inline std::size_t term_index(const Term& t, std::size_t i) {
  const double v = term_number(t, i);
  if (v < 0 || v != std::floor(v) || v > 1e9)
    fail(ErrorCode::Config, "'" + t.name + "' expects a nonnegative integer as argument " + std::to_string(i + 1));
  return static_cast<std::size_t>(v);
}

}  // namespace rvlab
