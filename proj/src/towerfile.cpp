#include "residua/towerfile.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "residua/error.hpp"

namespace residua {

DocValue DocValue::string(std::string s) {
  DocValue v;
  v.text = std::move(s);
  return v;
}
DocValue DocValue::integer_value(std::int64_t x) {
  DocValue v;
  v.kind = Kind::Integer;
  v.integer = x;
  return v;
}
DocValue DocValue::real_value(double x) {
  DocValue v;
  v.kind = Kind::Real;
  v.real = x;
  return v;
}
DocValue DocValue::boolean_value(bool x) {
  DocValue v;
  v.kind = Kind::Boolean;
  v.boolean = x;
  return v;
}
DocValue DocValue::array(std::vector<DocValue> items) {
  DocValue v;
  v.kind = Kind::Array;
  v.items = std::move(items);
  return v;
}

const DocEntry* DocTable::find(std::string_view key) const {
  for (const auto& e : entries) {
    if (e.key == key) return &e;
  }
  return nullptr;
}

DocTable& DocTable::add(std::string key, DocValue value) {
  entries.push_back({std::move(key), std::move(value), 0});
  return *this;
}

Document::Document() { tables.emplace_back(); }

DocTable& Document::add_table(std::string name, bool array_item) {
  tables.push_back({std::move(name), array_item, 0, {}});
  return tables.back();
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Document run() {
    Document doc;
    while (pos_ < text_.size()) {
      skip_blank();
      if (pos_ >= text_.size()) break;
      const char c = text_[pos_];
      if (c == '\n') {
        advance();
        continue;
      }
      if (c == '#') {
        skip_comment();
        continue;
      }
      if (c == '[') {
        const std::size_t line = line_;
        const bool array = text_.substr(pos_, 2) == "[[";
        pos_ += array ? 2 : 1;
        skip_blank();
        std::string name = identifier();
        skip_blank();
        expect(array ? "]]" : "]");
        end_of_line();
        auto& t = doc.add_table(std::move(name), array);
        t.line = line;
        continue;
      }
      const std::size_t line = line_;
      std::string key = identifier();
      skip_blank();
      expect("=");
      skip_blank();
      DocValue value = parse_value();
      end_of_line();
      auto& table = doc.tables.back();
      if (table.find(key)) fail(fmt::format("duplicate key '{}'", key));
      table.entries.push_back({std::move(key), std::move(value), line});
    }
    return doc;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw InvalidArgument(fmt::format("line {}: {}", line_, what));
  }

  void advance() {
    if (text_[pos_] == '\n') ++line_;
    ++pos_;
  }

  void skip_blank() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r')) ++pos_;
  }

  void skip_comment() {
    while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
  }

  // Blank space, comments and newlines, used inside arrays.
  void skip_space() {
    for (;;) {
      skip_blank();
      if (pos_ < text_.size() && text_[pos_] == '#') skip_comment();
      if (pos_ < text_.size() && text_[pos_] == '\n') {
        advance();
        continue;
      }
      return;
    }
  }

  void end_of_line() {
    skip_blank();
    if (pos_ < text_.size() && text_[pos_] == '#') skip_comment();
    if (pos_ < text_.size()) {
      if (text_[pos_] != '\n') fail(fmt::format("unexpected '{}'", text_[pos_]));
      advance();
    }
  }

  void expect(std::string_view token) {
    if (text_.substr(pos_, token.size()) != token) fail(fmt::format("expected '{}'", token));
    pos_ += token.size();
  }

  std::string identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.') {
        ++pos_;
      } else {
        break;
      }
    }
    if (pos_ == start) fail("expected a key");
    return std::string(text_.substr(start, pos_ - start));
  }

  DocValue parse_value() {
    if (pos_ >= text_.size()) fail("missing value");
    const char c = text_[pos_];
    if (c == '"') return DocValue::string(quoted());
    if (c == '[') {
      ++pos_;
      std::vector<DocValue> items;
      skip_space();
      while (pos_ < text_.size() && text_[pos_] != ']') {
        items.push_back(parse_value());
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == ',') {
          ++pos_;
          skip_space();
        } else {
          break;
        }
      }
      expect("]");
      return DocValue::array(std::move(items));
    }
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != ',' &&
           text_[pos_] != ']' && text_[pos_] != '#') {
      ++pos_;
    }
    const std::string_view token = text_.substr(start, pos_ - start);
    if (token == "true") return DocValue::boolean_value(true);
    if (token == "false") return DocValue::boolean_value(false);
    if (token == "inf" || token == "+inf") return DocValue::real_value(HUGE_VAL);
    if (token == "-inf") return DocValue::real_value(-HUGE_VAL);
    if (token == "nan") return DocValue::real_value(std::nan(""));
    const char* first = token.data() + (token.starts_with('+') ? 1 : 0);
    const char* last = token.data() + token.size();
    std::int64_t i = 0;
    if (auto [p, ec] = std::from_chars(first, last, i); ec == std::errc() && p == last) {
      return DocValue::integer_value(i);
    }
    double d = 0.0;
    if (auto [p, ec] = std::from_chars(first, last, d); ec == std::errc() && p == last) {
      return DocValue::real_value(d);
    }
    fail(fmt::format("cannot parse value '{}'", token));
  }

  std::string quoted() {
    ++pos_;
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      char c = text_[pos_++];
      if (c == '\n') fail("unterminated string");
      if (c == '\\') {
        if (pos_ >= text_.size()) fail("unterminated escape");
        const char e = text_[pos_++];
        switch (e) {
          case 'n': c = '\n'; break;
          case 't': c = '\t'; break;
          case '"': c = '"'; break;
          case '\\': c = '\\'; break;
          default: fail(fmt::format("unknown escape '\\{}'", e));
        }
      }
      out.push_back(c);
    }
    expect("\"");
    return out;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  return out + "\"";
}

std::string format_value(const DocValue& v) {
  switch (v.kind) {
    case DocValue::Kind::String: return quote(v.text);
    case DocValue::Kind::Integer: return fmt::format("{}", v.integer);
    case DocValue::Kind::Boolean: return v.boolean ? "true" : "false";
    case DocValue::Kind::Real: {
      if (std::isnan(v.real)) return "nan";
      if (std::isinf(v.real)) return v.real > 0 ? "inf" : "-inf";
      std::string s = fmt::format("{:.17g}", v.real);
      if (s.find_first_of(".en") == std::string::npos) s += ".0";
      return s;
    }
    case DocValue::Kind::Array: {
      std::string out = "[";
      for (std::size_t i = 0; i < v.items.size(); ++i) {
        if (i) out += ", ";
        out += format_value(v.items[i]);
      }
      return out + "]";
    }
  }
  return {};
}

}  // namespace

Document parse_document(std::string_view text) { return Parser(text).run(); }

std::string format_document(const Document& doc) {
  std::string out;
  for (std::size_t i = 0; i < doc.tables.size(); ++i) {
    const auto& t = doc.tables[i];
    if (i > 0) {
      if (!out.empty()) out += "\n";
      out += t.array_item ? fmt::format("[[{}]]\n", t.name) : fmt::format("[{}]\n", t.name);
    }
    for (const auto& e : t.entries) out += fmt::format("{} = {}\n", e.key, format_value(e.value));
  }
  return out;
}

namespace {

const std::string& string_field(const DocEntry& e) {
  if (e.value.kind != DocValue::Kind::String) {
    throw InvalidArgument(fmt::format("line {}: '{}' must be a string", e.line, e.key));
  }
  return e.value.text;
}

std::vector<std::string> string_list(const DocEntry& e) {
  if (e.value.kind != DocValue::Kind::Array) {
    throw InvalidArgument(fmt::format("line {}: '{}' must be an array of strings", e.line, e.key));
  }
  std::vector<std::string> out;
  for (const auto& item : e.value.items) {
    if (item.kind != DocValue::Kind::String) {
      throw InvalidArgument(fmt::format("line {}: '{}' must be an array of strings", e.line, e.key));
    }
    out.push_back(item.text);
  }
  return out;
}

}  // namespace

TowerFile parse_tower_file(std::string_view text) {
  const Document doc = parse_document(text);
  std::optional<std::vector<std::string>> base;
  std::vector<LevelSpec> levels;
  std::optional<std::pair<std::vector<std::string>, std::vector<std::string>>> subgroup;

  for (const auto& e : doc.root().entries) {
    if (e.key != "base") throw InvalidArgument(fmt::format("line {}: unknown key '{}'", e.line, e.key));
    base = string_list(e);
  }
  for (std::size_t i = 1; i < doc.tables.size(); ++i) {
    const auto& t = doc.tables[i];
    if (t.name == "level" && t.array_item) {
      LevelSpec spec;
      bool has_u = false;
      bool has_t = false;
      for (const auto& e : t.entries) {
        if (e.key == "u") {
          spec.u = string_field(e);
          has_u = true;
        } else if (e.key == "t") {
          spec.t = string_field(e);
          has_t = true;
        } else if (e.key == "a") {
          spec.a = string_field(e);
        } else {
          throw InvalidArgument(fmt::format("line {}: unknown key '{}' in [[level]]", e.line, e.key));
        }
      }
      if (!has_u || !has_t) throw InvalidArgument(fmt::format("line {}: [[level]] needs u and t", t.line));
      levels.push_back(std::move(spec));
    } else if (t.name == "subgroup" && !t.array_item) {
      if (subgroup) throw InvalidArgument(fmt::format("line {}: duplicate [subgroup]", t.line));
      std::vector<std::string> names;
      std::vector<std::string> gens;
      bool has_gens = false;
      for (const auto& e : t.entries) {
        if (e.key == "gens") {
          gens = string_list(e);
          has_gens = true;
        } else if (e.key == "names") {
          names = string_list(e);
        } else {
          throw InvalidArgument(fmt::format("line {}: unknown key '{}' in [subgroup]", e.line, e.key));
        }
      }
      if (!has_gens) throw InvalidArgument(fmt::format("line {}: [subgroup] needs gens", t.line));
      subgroup.emplace(std::move(names), std::move(gens));
    } else {
      throw InvalidArgument(fmt::format("line {}: unknown table '{}'", t.line, t.name));
    }
  }
  if (!base) throw InvalidArgument("tower file needs 'base'");
  TowerFile out{Tower(Basis(*base), std::move(levels)), std::nullopt};
  if (subgroup) out.subgroup = make_subgroup(out.tower, std::move(subgroup->first), subgroup->second);
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument(fmt::format("cannot open '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TowerFile load_tower_file(const std::string& path) { return parse_tower_file(read_text_file(path)); }

std::string format_tower_file(const Tower& tower, const Subgroup* subgroup) {
  Document doc;
  std::vector<DocValue> base;
  for (const auto& n : tower.base().names()) base.push_back(DocValue::string(n));
  doc.root().add("base", DocValue::array(std::move(base)));
  for (std::size_t i = 1; i <= tower.height(); ++i) {
    const Basis below = tower.basis_at(i - 1);
    const Level& lv = tower.level(i);
    auto& t = doc.add_table("level", true);
    t.add("u", DocValue::string(format_word(below, lv.u)));
    t.add("t", DocValue::string(lv.t));
    if (!(lv.a == lv.u)) t.add("a", DocValue::string(format_word(below, lv.a)));
  }
  if (subgroup) {
    auto& t = doc.add_table("subgroup");
    std::vector<DocValue> gens;
    std::vector<DocValue> names;
    for (std::size_t i = 0; i < subgroup->gens.size(); ++i) {
      gens.push_back(DocValue::string(format_word(tower.full_basis(), subgroup->gens[i])));
      names.push_back(DocValue::string(subgroup->names.name(i)));
    }
    t.add("names", DocValue::array(std::move(names)));
    t.add("gens", DocValue::array(std::move(gens)));
  }
  return format_document(doc);
}

}  // namespace residua
