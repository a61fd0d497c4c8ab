#include "fdchk/toml.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "fdchk/errors.hpp"

namespace fdchk::toml {

namespace {

bool bare_key_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
}

class Reader {
 public:
  explicit Reader(std::string_view text) : s_(text) {}

  Value document() {
    Value root;
    Table* current = &root.mutable_table();
    for (;;) {
      skip_blank_lines();
      if (eof()) break;
      if (peek() == '[') {
        ++pos_;
        if (!eof() && peek() == '[') throw ParseError(pos_, "table header (arrays of tables are unsupported)");
        skip_inline_ws();
        auto path = key_path();
        skip_inline_ws();
        expect(']');
        current = &open_table(root.mutable_table(), path, true);
      } else {
        key_value(*current);
      }
      end_of_line();
    }
    return root;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;

  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }

  void expect(char c) {
    if (eof() || peek() != c) throw ParseError(pos_, std::string("'") + c + "'");
    ++pos_;
  }

  void skip_inline_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }

  void skip_comment() {
    if (!eof() && peek() == '#')
      while (!eof() && peek() != '\n') ++pos_;
  }

  void skip_blank_lines() {
    for (;;) {
      skip_inline_ws();
      skip_comment();
      if (!eof() && (peek() == '\n' || peek() == '\r')) {
        ++pos_;
        continue;
      }
      return;
    }
  }

  // Whitespace, comments and newlines inside arrays.
  void skip_ws_multiline() { skip_blank_lines(); }

  void end_of_line() {
    skip_inline_ws();
    skip_comment();
    if (eof()) return;
    if (peek() == '\r') ++pos_;
    if (eof()) return;
    if (peek() != '\n') throw ParseError(pos_, "end of line");
    ++pos_;
  }

  std::string single_key() {
    if (eof()) throw ParseError(pos_, "key");
    if (peek() == '"') return basic_string();
    if (peek() == '\'') return literal_string();
    const std::size_t start = pos_;
    while (!eof() && bare_key_char(peek())) ++pos_;
    if (pos_ == start) throw ParseError(pos_, "key");
    return std::string(s_.substr(start, pos_ - start));
  }

  std::vector<std::string> key_path() {
    std::vector<std::string> path{single_key()};
    for (;;) {
      skip_inline_ws();
      if (!eof() && peek() == '.') {
        ++pos_;
        skip_inline_ws();
        path.push_back(single_key());
      } else {
        return path;
      }
    }
  }

  Table& open_table(Table& root, const std::vector<std::string>& path, bool header) {
    Table* t = &root;
    for (const auto& k : path) {
      auto it = t->find(k);
      if (it == t->end()) it = t->emplace(k, Value(Table{})).first;
      if (!it->second.is_table()) throw ParseError(pos_, "key '" + k + "' to name a table");
      t = &it->second.mutable_table();
    }
    (void)header;
    return *t;
  }

  void key_value(Table& table) {
    const std::size_t at = pos_;
    auto path = key_path();
    skip_inline_ws();
    expect('=');
    skip_inline_ws();
    Value v = value();
    std::vector<std::string> parent(path.begin(), path.end() - 1);
    Table& dst = open_table(table, parent, false);
    if (!dst.emplace(path.back(), std::move(v)).second) throw ParseError(at, "unique key ('" + path.back() + "' repeated)");
  }

  Value value() {
    if (eof()) throw ParseError(pos_, "value");
    const char c = peek();
    if (c == '"') return Value(basic_string());
    if (c == '\'') return Value(literal_string());
    if (c == '[') return array();
    if (c == '{') return inline_table();
    if (s_.substr(pos_, 4) == "true") {
      pos_ += 4;
      return Value(true);
    }
    if (s_.substr(pos_, 5) == "false") {
      pos_ += 5;
      return Value(false);
    }
    return number();
  }

  std::string basic_string() {
    expect('"');
    std::string out;
    for (;;) {
      if (eof() || peek() == '\n') throw ParseError(pos_, "closing '\"'");
      const char c = s_[pos_++];
      if (c == '"') return out;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (eof()) throw ParseError(pos_, "escape sequence");
      const char e = s_[pos_++];
      switch (e) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        default: throw ParseError(pos_ - 1, "supported escape (\\n \\t \\r \\\" \\\\)");
      }
    }
  }

  std::string literal_string() {
    expect('\'');
    const std::size_t start = pos_;
    while (!eof() && peek() != '\'' && peek() != '\n') ++pos_;
    if (eof() || peek() != '\'') throw ParseError(pos_, "closing \"'\"");
    std::string out(s_.substr(start, pos_ - start));
    ++pos_;
    return out;
  }

  Value number() {
    const std::size_t start = pos_;
    std::string digits;
    bool is_float = false;
    while (!eof()) {
      const char c = peek();
      if ((c >= '0' && c <= '9') || c == '+' || c == '-') {
        digits += c;
      } else if (c == '.' || c == 'e' || c == 'E') {
        digits += c;
        is_float = true;
      } else if (c == '_') {
      } else if (c == 'i' || c == 'n') {
        // inf / nan with optional sign
        const auto rest = s_.substr(pos_, 3);
        if (rest == "inf" || rest == "nan") {
          pos_ += 3;
          const bool neg = !digits.empty() && digits[0] == '-';
          if (rest == "nan") return Value(std::numeric_limits<double>::quiet_NaN());
          return Value(neg ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity());
        }
        break;
      } else {
        break;
      }
      ++pos_;
    }
    if (digits.empty()) throw ParseError(start, "value");
    const char* b = digits.data();
    const char* e = digits.data() + digits.size();
    if (*b == '+') ++b;
    if (is_float) {
      double d = 0;
      auto [p, ec] = std::from_chars(b, e, d);
      if (ec != std::errc() || p != e) throw ParseError(start, "number");
      return Value(d);
    }
    std::int64_t i = 0;
    auto [p, ec] = std::from_chars(b, e, i);
    if (ec != std::errc() || p != e) throw ParseError(start, "number");
    return Value(i);
  }

  Value array() {
    expect('[');
    Array out;
    for (;;) {
      skip_ws_multiline();
      if (eof()) throw ParseError(pos_, "']'");
      if (peek() == ']') {
        ++pos_;
        return Value(std::move(out));
      }
      out.push_back(value());
      skip_ws_multiline();
      if (!eof() && peek() == ',') {
        ++pos_;
        continue;
      }
      skip_ws_multiline();
      expect(']');
      return Value(std::move(out));
    }
  }

  Value inline_table() {
    expect('{');
    Value out{Table{}};
    skip_inline_ws();
    if (!eof() && peek() == '}') {
      ++pos_;
      return out;
    }
    for (;;) {
      skip_inline_ws();
      key_value(out.mutable_table());
      skip_inline_ws();
      if (!eof() && peek() == ',') {
        ++pos_;
        continue;
      }
      expect('}');
      return out;
    }
  }
};

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

std::string format_key(const std::string& k) {
  for (char c : k)
    if (!bare_key_char(c)) return quote(k);
  return k.empty() ? quote(k) : k;
}

void dump_inline(const Value& v, std::string& out) {
  if (v.is_string()) {
    out += quote(v.as_string());
  } else if (v.is_integer()) {
    out += std::to_string(v.as_integer());
  } else if (v.is_float()) {
    const double d = v.as_number();
    if (std::isinf(d)) {
      out += d > 0 ? "inf" : "-inf";
    } else if (std::isnan(d)) {
      out += "nan";
    } else {
      char buf[64];
      auto [p, ec] = std::to_chars(buf, buf + sizeof buf, d);
      std::string num(buf, p);
      if (num.find_first_of(".eE") == std::string::npos) num += ".0";
      out += num;
    }
  } else if (v.is_bool()) {
    out += v.as_bool() ? "true" : "false";
  } else if (v.is_array()) {
    out += '[';
    const auto& a = v.as_array();
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (i) out += ", ";
      dump_inline(a[i], out);
    }
    out += ']';
  } else {
    out += '{';
    bool first = true;
    for (const auto& [k, x] : v.as_table()) {
      if (!first) out += ", ";
      first = false;
      out += format_key(k) + " = ";
      dump_inline(x, out);
    }
    out += '}';
  }
}

void dump_table(const Table& t, const std::string& prefix, std::string& out) {
  for (const auto& [k, v] : t) {
    if (v.is_table()) continue;
    out += format_key(k) + " = ";
    dump_inline(v, out);
    out += '\n';
  }
  for (const auto& [k, v] : t) {
    if (!v.is_table()) continue;
    const std::string name = prefix.empty() ? format_key(k) : prefix + "." + format_key(k);
    out += "\n[" + name + "]\n";
    dump_table(v.as_table(), name, out);
  }
}

}  // namespace

const std::string& Value::as_string(std::string_view what) const {
  if (auto p = std::get_if<std::string>(&v_)) return *p;
  throw ConfigError(std::string(what) + ": expected a string");
}

double Value::as_number(std::string_view what) const {
  if (auto p = std::get_if<double>(&v_)) return *p;
  if (auto p = std::get_if<std::int64_t>(&v_)) return static_cast<double>(*p);
  throw ConfigError(std::string(what) + ": expected a number");
}

std::int64_t Value::as_integer(std::string_view what) const {
  if (auto p = std::get_if<std::int64_t>(&v_)) return *p;
  throw ConfigError(std::string(what) + ": expected an integer");
}

bool Value::as_bool(std::string_view what) const {
  if (auto p = std::get_if<bool>(&v_)) return *p;
  throw ConfigError(std::string(what) + ": expected a boolean");
}

const Array& Value::as_array(std::string_view what) const {
  if (auto p = std::get_if<std::shared_ptr<Array>>(&v_)) return **p;
  throw ConfigError(std::string(what) + ": expected an array");
}

const Table& Value::as_table(std::string_view what) const {
  if (auto p = std::get_if<std::shared_ptr<Table>>(&v_)) return **p;
  throw ConfigError(std::string(what) + ": expected a table");
}

Array& Value::mutable_array() {
  auto& p = std::get<std::shared_ptr<Array>>(v_);
  if (p.use_count() > 1) p = std::make_shared<Array>(*p);
  return *p;
}

Table& Value::mutable_table() {
  auto& p = std::get<std::shared_ptr<Table>>(v_);
  if (p.use_count() > 1) p = std::make_shared<Table>(*p);
  return *p;
}

const Value* Value::find(std::string_view dotted) const {
  const Value* cur = this;
  while (!dotted.empty()) {
    if (!cur->is_table()) return nullptr;
    const auto dot = dotted.find('.');
    const std::string key(dotted.substr(0, dot));
    const auto& t = cur->as_table();
    auto it = t.find(key);
    if (it == t.end()) return nullptr;
    cur = &it->second;
    dotted = dot == std::string_view::npos ? std::string_view{} : dotted.substr(dot + 1);
  }
  return cur;
}

Value parse(std::string_view text) { return Reader(text).document(); }

Value parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string dump(const Value& root) {
  std::string out;
  dump_table(root.as_table(), "", out);
  return out;
}

}  // namespace fdchk::toml
