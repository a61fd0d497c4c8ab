#pragma once

// Minimal TOML reader: tables, dotted keys, basic/literal strings, integers,
// floats, booleans, arrays and inline tables. Enough for the config files
// this project reads; datetimes and arrays-of-tables are not supported.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace fdchk::toml {

class Value;
using Array = std::vector<Value>;
using Table = std::map<std::string, Value>;

class Value {
 public:
  using Storage = std::variant<std::string, std::int64_t, double, bool, std::shared_ptr<Array>, std::shared_ptr<Table>>;

  Value() : v_(std::make_shared<Table>()) {}
  Value(std::string s) : v_(std::move(s)) {}
  Value(const char* s) : v_(std::string(s)) {}
  Value(std::int64_t i) : v_(i) {}
  Value(int i) : v_(static_cast<std::int64_t>(i)) {}
  Value(double d) : v_(d) {}
  Value(bool b) : v_(b) {}
  Value(Array a) : v_(std::make_shared<Array>(std::move(a))) {}
  Value(Table t) : v_(std::make_shared<Table>(std::move(t))) {}

  bool is_string() const { return std::holds_alternative<std::string>(v_); }
  bool is_integer() const { return std::holds_alternative<std::int64_t>(v_); }
  bool is_float() const { return std::holds_alternative<double>(v_); }
  bool is_number() const { return is_integer() || is_float(); }
  bool is_bool() const { return std::holds_alternative<bool>(v_); }
  bool is_array() const { return std::holds_alternative<std::shared_ptr<Array>>(v_); }
  bool is_table() const { return std::holds_alternative<std::shared_ptr<Table>>(v_); }

  // The as_* accessors throw ConfigError naming `what` on a type mismatch.
  const std::string& as_string(std::string_view what = "value") const;
  double as_number(std::string_view what = "value") const;
  std::int64_t as_integer(std::string_view what = "value") const;
  bool as_bool(std::string_view what = "value") const;
  const Array& as_array(std::string_view what = "value") const;
  const Table& as_table(std::string_view what = "value") const;
  Array& mutable_array();
  Table& mutable_table();

  /// Looks up a dotted path ("phi.params.p") in a table value.
  const Value* find(std::string_view dotted) const;

 private:
  Storage v_;
};

/// Parses a document; throws ParseError on malformed input.
Value parse(std::string_view text);
Value parse_file(const std::string& path);

/// Serializes a table as TOML (sub-tables become [headers]).
std::string dump(const Value& root);

}  // namespace fdchk::toml
