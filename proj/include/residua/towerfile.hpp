#pragma once

// A small TOML subset shared by tower descriptors and certificates:
//
//   # comment
//   key = "string" | 42 | 1.5e-3 | true | ["a", "b"]
//   [table]
//   [[array_of_tables]]
//
// Arrays may span lines. Inline tables, dotted keys and dates are not supported.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "residua/tower.hpp"

namespace residua {

struct DocValue {
  enum class Kind { String, Integer, Real, Boolean, Array };
  Kind kind = Kind::String;
  std::string text;
  std::int64_t integer = 0;
  double real = 0.0;
  bool boolean = false;
  std::vector<DocValue> items;

  static DocValue string(std::string s);
  static DocValue integer_value(std::int64_t v);
  static DocValue real_value(double v);
  static DocValue boolean_value(bool v);
  static DocValue array(std::vector<DocValue> items);
};

struct DocEntry {
  std::string key;
  DocValue value;
  std::size_t line = 0;
};

struct DocTable {
  /// Empty for the root table.
  std::string name;
  bool array_item = false;
  std::size_t line = 0;
  std::vector<DocEntry> entries;

  const DocEntry* find(std::string_view key) const;
  DocTable& add(std::string key, DocValue value);
};

struct Document {
  std::vector<DocTable> tables;  // tables[0] is the root

  Document();
  DocTable& root() { return tables.front(); }
  const DocTable& root() const { return tables.front(); }
  DocTable& add_table(std::string name, bool array_item = false);
};

Document parse_document(std::string_view text);
std::string format_document(const Document& doc);

/// Tower file schema:
///   base = ["a", "b"]
///   [[level]]        one per level, bottom first
///   u = "a b a^-1 b^-1"
///   t = "t"
///   a = "..."        optional, a power of u
///   [subgroup]       optional
///   gens = ["a", "t a t^-1"]
///   names = ["x", "y"]   optional, defaults to y1, y2, ...
/// Unknown tables or keys are rejected.
struct TowerFile {
  Tower tower;
  std::optional<Subgroup> subgroup;
};

TowerFile parse_tower_file(std::string_view text);
TowerFile load_tower_file(const std::string& path);
std::string format_tower_file(const Tower& tower, const Subgroup* subgroup = nullptr);

std::string read_text_file(const std::string& path);

}  // namespace residua
