#pragma once

// Experiment config files: a TOML subset parsed into JSON.
//
//   # comment
//   name = "frechet_mda"          strings, numbers, true/false
//   probes = [0.5, 1, 2]          flat arrays, may span lines
//   [generator]                   table; dotted headers nest: [generator.point]
//   alpha = 1.0
//
// Keys are bare words ([A-Za-z0-9_-]). A table may be declared once. Config
// errors name the offending key path.

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "rvlab/error.hpp"

namespace rvlab {

using Json = nlohmann::json;

namespace detail {

class ConfigParser {
 public:
  explicit ConfigParser(std::string_view text) : text_(text) {}

  Json parse() {
    Json root = Json::object();
    Json* table = &root;
    std::string table_path;
    while (!at_end()) {
      skip_blank_and_comments();
      if (at_end()) break;
      if (peek() == '[') {
        ++pos_;
        const auto path = dotted_key();
        expect(']');
        end_of_line();
        table = &root;
        table_path.clear();
        for (const auto& part : path) {
          table_path += (table_path.empty() ? "" : ".") + part;
          if (!table->contains(part)) (*table)[part] = Json::object();
          table = &(*table)[part];
          if (!table->is_object()) error(table_path + ": not a table");
        }
        if (!declared_.insert_unique(table_path)) error(table_path + ": table declared twice");
        continue;
      }
      const auto key = bare_key();
      const auto full = table_path.empty() ? key : table_path + "." + key;
      skip_spaces();
      expect('=');
      skip_spaces();
      Json v = value(full);
      end_of_line();
      if (table->contains(key)) error(full + ": duplicate key");
      (*table)[key] = std::move(v);
    }
    return root;
  }

 private:
  struct Seen {
    std::vector<std::string> items;
    bool insert_unique(const std::string& s) {
      for (const auto& x : items)
        if (x == s) return false;
      items.push_back(s);
      return true;
    }
  };

  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorCode::Config, "line " + std::to_string(line_) + ": " + what);
  }

  [[nodiscard]] bool at_end() const { return pos_ >= text_.size(); }
  [[nodiscard]] char peek() const { return at_end() ? '\0' : text_[pos_]; }

  void skip_spaces() {
    while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) ++pos_;
  }

  void skip_blank_and_comments() {
    for (;;) {
      skip_spaces();
      if (peek() == '#') {
        while (!at_end() && peek() != '\n') ++pos_;
      }
      if (peek() == '\n') {
        ++pos_;
        ++line_;
        continue;
      }
      return;
    }
  }

  void end_of_line() {
    skip_spaces();
    if (peek() == '#')
      while (!at_end() && peek() != '\n') ++pos_;
    if (at_end()) return;
    if (peek() != '\n') error(std::string("unexpected '") + peek() + "'");
    ++pos_;
    ++line_;
  }

  void expect(char c) {
    if (peek() != c) error(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string bare_key() {
    const auto start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-')) ++pos_;
    if (pos_ == start) error("expected a key");
    return std::string(text_.substr(start, pos_ - start));
  }

  std::vector<std::string> dotted_key() {
    std::vector<std::string> parts;
    skip_spaces();
    parts.push_back(bare_key());
    while (peek() == '.') {
      ++pos_;
      parts.push_back(bare_key());
    }
    skip_spaces();
    return parts;
  }

  Json value(const std::string& key) {
    const char c = peek();
    if (c == '"') return string_value(key);
    if (c == '[') {
      ++pos_;
      Json arr = Json::array();
      for (;;) {
        skip_blank_and_comments();
        if (peek() == ']') {
          ++pos_;
          return arr;
        }
        arr.push_back(value(key));
        skip_blank_and_comments();
        if (peek() == ',') {
          ++pos_;
          continue;
        }
        if (peek() != ']') error(key + ": expected ',' or ']' in array");
      }
    }
    const auto start = pos_;
    while (!at_end() && !std::isspace(static_cast<unsigned char>(peek())) && peek() != ',' && peek() != ']' &&
           peek() != '#')
      ++pos_;
    const std::string word(text_.substr(start, pos_ - start));
    if (word == "true") return true;
    if (word == "false") return false;
    if (word == "inf" || word == "+inf") return std::numeric_limits<double>::infinity();
    if (word.empty()) error(key + ": missing value");
    std::string digits;
    for (char ch : word)
      if (ch != '_') digits += ch;
    const bool integral = digits.find_first_of(".eEn") == std::string::npos;
    try {
      std::size_t used = 0;
      if (integral) {
        const long long v = std::stoll(digits, &used);
        if (used == digits.size()) return v;
      } else {
        const double v = std::stod(digits, &used);
        if (used == digits.size()) return v;
      }
    } catch (const std::exception&) {
    }
    error(key + ": cannot parse value '" + word + "'");
  }

  Json string_value(const std::string& key) {
    ++pos_;
    std::string out;
    while (!at_end() && peek() != '"') {
      char ch = text_[pos_++];
      if (ch == '\n') error(key + ": unterminated string");
      if (ch == '\\') {
        if (at_end()) break;
        const char e = text_[pos_++];
        switch (e) {
          case 'n': ch = '\n'; break;
          case 't': ch = '\t'; break;
          case '"': ch = '"'; break;
          case '\\': ch = '\\'; break;
          default: error(key + ": unknown escape");
        }
      }
      out += ch;
    }
    expect('"');
    return out;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  Seen declared_;
};

}  // namespace detail

inline Json parse_config_text(std::string_view text) { return detail::ConfigParser(text).parse(); }

inline Json load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::Config, "cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

/// Read-only view of a config table that reports errors with the key path.
class ConfigNode {
 public:
  ConfigNode(const Json& j, std::string path) : j_(&j), path_(std::move(path)) {}

  [[nodiscard]] const Json& json() const { return *j_; }
  [[nodiscard]] const std::string& path() const { return path_; }
  [[nodiscard]] bool has(const std::string& key) const { return j_->is_object() && j_->contains(key); }

  [[nodiscard]] std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  [[noreturn]] void error(const std::string& key, const std::string& what) const {
    fail(ErrorCode::Config, key_path(key) + ": " + what);
  }

  [[nodiscard]] ConfigNode child(const std::string& key) const {
    if (!has(key)) error(key, "missing table");
    const auto& c = j_->at(key);
    if (!c.is_object()) error(key, "expected a table");
    return {c, key_path(key)};
  }

  [[nodiscard]] double number(const std::string& key) const {
    if (!has(key)) error(key, "missing required number");
    const auto& v = j_->at(key);
    if (!v.is_number()) error(key, "expected a number");
    return v.get<double>();
  }
  [[nodiscard]] double number(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }

  [[nodiscard]] std::uint64_t count(const std::string& key) const {
    if (!has(key)) error(key, "missing required integer");
    const auto& v = j_->at(key);
    if (v.is_number_integer() && v.get<long long>() >= 0) return v.get<std::uint64_t>();
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (d >= 0.0 && d == std::floor(d) && d < 1.8e19) return static_cast<std::uint64_t>(d);
    }
    error(key, "expected a nonnegative integer");
  }
  [[nodiscard]] std::uint64_t count(const std::string& key, std::uint64_t fallback) const {
    return has(key) ? count(key) : fallback;
  }

  [[nodiscard]] bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto& v = j_->at(key);
    if (!v.is_boolean()) error(key, "expected true or false");
    return v.get<bool>();
  }

  [[nodiscard]] std::string string(const std::string& key) const {
    if (!has(key)) error(key, "missing required string");
    const auto& v = j_->at(key);
    if (!v.is_string()) error(key, "expected a string");
    return v.get<std::string>();
  }
  [[nodiscard]] std::string string(const std::string& key, const std::string& fallback) const {
    return has(key) ? string(key) : fallback;
  }

  [[nodiscard]] std::vector<double> numbers(const std::string& key) const {
    if (!has(key)) error(key, "missing required array");
    const auto& v = j_->at(key);
    if (!v.is_array()) error(key, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) error(key, "expected an array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }
  [[nodiscard]] std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const {
    return has(key) ? numbers(key) : fallback;
  }

  [[nodiscard]] std::vector<std::string> strings(const std::string& key) const {
    if (!has(key)) error(key, "missing required array");
    const auto& v = j_->at(key);
    if (!v.is_array()) error(key, "expected an array of strings");
    std::vector<std::string> out;
    for (const auto& x : v) {
      if (!x.is_string()) error(key, "expected an array of strings");
      out.push_back(x.get<std::string>());
    }
    return out;
  }

 private:
  const Json* j_;
  std::string path_;
};

}  // namespace rvlab
