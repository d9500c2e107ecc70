#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "wavelab/types.hpp"

namespace wavelab::toml {

/// Minimal TOML reader covering what experiment configs need: [tables],
/// key = value with strings, integers, floats, booleans, and (nested) arrays
/// of those. Dotted keys, inline tables, and dates are not supported.
struct Value;
using Array = std::vector<Value>;

struct Value {
    std::variant<std::string, std::int64_t, double, bool, Array> v;

    bool is_string() const { return std::holds_alternative<std::string>(v); }
    bool is_array() const { return std::holds_alternative<Array>(v); }

    const std::string& as_string() const;
    std::int64_t as_int() const;
    double as_double() const;  // accepts integers
    bool as_bool() const;
    const Array& as_array() const;
};

class Table {
public:
    /// Keys are "section.key" ("key" for the root table).
    std::map<std::string, Value> entries;

    bool has(const std::string& key) const { return entries.count(key) != 0; }
    const Value* find(const std::string& key) const;
    const Value& at(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    double get_double(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_double_array(const std::string& key) const;
    std::vector<std::string> get_string_array(const std::string& key) const;
};

/// Parses a file; throws ConfigError with a line number on syntax errors.
Table parse_file(const std::string& path);
Table parse_string(const std::string& text, const std::string& origin = "<string>");

}  // namespace wavelab::toml
