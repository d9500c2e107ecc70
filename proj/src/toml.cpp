#include "wavelab/toml.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace wavelab::toml {

namespace {

[[noreturn]] void fail(const std::string& origin, std::size_t line, const std::string& msg) {
    throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
}

struct Cursor {
    const std::string& s;
    std::size_t pos = 0;
    void skip_ws() {
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    }
    bool done() const { return pos >= s.size(); }
    char peek() const { return s[pos]; }
};

Value parse_value(Cursor& c, const std::string& origin, std::size_t line);

Value parse_array(Cursor& c, const std::string& origin, std::size_t line) {
    Array arr;
    ++c.pos;  // '['
    for (;;) {
        c.skip_ws();
        if (c.done()) fail(origin, line, "unterminated array");
        if (c.peek() == ']') {
            ++c.pos;
            return Value{std::move(arr)};
        }
        arr.push_back(parse_value(c, origin, line));
        c.skip_ws();
        if (!c.done() && c.peek() == ',') {
            ++c.pos;
            continue;
        }
        if (!c.done() && c.peek() == ']') {
            ++c.pos;
            return Value{std::move(arr)};
        }
        fail(origin, line, "expected ',' or ']' in array");
    }
}

Value parse_value(Cursor& c, const std::string& origin, std::size_t line) {
    c.skip_ws();
    if (c.done()) fail(origin, line, "missing value");
    const char ch = c.peek();
    if (ch == '[') return parse_array(c, origin, line);
    if (ch == '"') {
        ++c.pos;
        std::string out;
        while (!c.done() && c.peek() != '"') {
            if (c.peek() == '\\' && c.pos + 1 < c.s.size()) {
                ++c.pos;
                const char e = c.peek();
                out += e == 'n' ? '\n' : e == 't' ? '\t' : e;
            } else {
                out += c.peek();
            }
            ++c.pos;
        }
        if (c.done()) fail(origin, line, "unterminated string");
        ++c.pos;
        return Value{std::move(out)};
    }
    // bare token: bool, int, or float
    std::size_t start = c.pos;
    while (!c.done() && c.peek() != ',' && c.peek() != ']' && c.peek() != '#' &&
           c.peek() != ' ' && c.peek() != '\t')
        ++c.pos;
    std::string tok = c.s.substr(start, c.pos - start);
    if (tok == "true") return Value{true};
    if (tok == "false") return Value{false};
    const bool looks_float = tok.find_first_of(".eE") != std::string::npos ||
                             tok == "inf" || tok == "-inf" || tok == "nan";
    try {
        if (!looks_float) {
            std::size_t used = 0;
            const std::int64_t i = std::stoll(tok, &used);
            if (used == tok.size()) return Value{i};
        }
        std::size_t used = 0;
        const double d = std::stod(tok, &used);
        if (used == tok.size()) return Value{d};
    } catch (const std::exception&) {
    }
    fail(origin, line, "cannot parse value '" + tok + "'");
}

std::string strip_comment(const std::string& line) {
    bool in_str = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_str = !in_str;
        if (line[i] == '#' && !in_str) return line.substr(0, i);
    }
    return line;
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

}  // namespace

const std::string& Value::as_string() const {
    if (!is_string()) throw ConfigError("config value is not a string");
    return std::get<std::string>(v);
}

std::int64_t Value::as_int() const {
    if (std::holds_alternative<std::int64_t>(v)) return std::get<std::int64_t>(v);
    throw ConfigError("config value is not an integer");
}

double Value::as_double() const {
    if (std::holds_alternative<double>(v)) return std::get<double>(v);
    if (std::holds_alternative<std::int64_t>(v))
        return static_cast<double>(std::get<std::int64_t>(v));
    throw ConfigError("config value is not a number");
}

bool Value::as_bool() const {
    if (std::holds_alternative<bool>(v)) return std::get<bool>(v);
    throw ConfigError("config value is not a boolean");
}

const Array& Value::as_array() const {
    if (!is_array()) throw ConfigError("config value is not an array");
    return std::get<Array>(v);
}

const Value* Table::find(const std::string& key) const {
    auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
}

const Value& Table::at(const std::string& key) const {
    const Value* v = find(key);
    if (v == nullptr) throw ConfigError("missing config key: " + key);
    return *v;
}

std::string Table::get_string(const std::string& key, const std::string& fallback) const {
    const Value* v = find(key);
    return v != nullptr ? v->as_string() : fallback;
}

std::int64_t Table::get_int(const std::string& key, std::int64_t fallback) const {
    const Value* v = find(key);
    return v != nullptr ? v->as_int() : fallback;
}

double Table::get_double(const std::string& key, double fallback) const {
    const Value* v = find(key);
    return v != nullptr ? v->as_double() : fallback;
}

bool Table::get_bool(const std::string& key, bool fallback) const {
    const Value* v = find(key);
    return v != nullptr ? v->as_bool() : fallback;
}

std::vector<double> Table::get_double_array(const std::string& key) const {
    const Value* v = find(key);
    if (v == nullptr) return {};
    std::vector<double> out;
    for (const auto& e : v->as_array()) out.push_back(e.as_double());
    return out;
}

std::vector<std::string> Table::get_string_array(const std::string& key) const {
    const Value* v = find(key);
    if (v == nullptr) return {};
    std::vector<std::string> out;
    for (const auto& e : v->as_array()) out.push_back(e.as_string());
    return out;
}

Table parse_string(const std::string& text, const std::string& origin) {
    Table table;
    std::istringstream is(text);
    std::string raw;
    std::string section;
    std::size_t lineno = 0;
    std::string pending;  // continuation for multi-line arrays
    std::string pending_key;
    std::size_t pending_line = 0;

    auto commit = [&](const std::string& key, const std::string& value_text, std::size_t line) {
        Cursor c{value_text, 0};
        Value v = parse_value(c, origin, line);
        c.skip_ws();
        if (!c.done()) fail(origin, line, "trailing characters after value");
        const std::string full = section.empty() ? key : section + "." + key;
        table.entries[full] = std::move(v);
    };

    while (std::getline(is, raw)) {
        ++lineno;
        std::string line = trim(strip_comment(raw));
        if (!pending.empty()) {
            pending += " " + line;
            int depth = 0;
            for (char ch : pending)
                depth += ch == '[' ? 1 : ch == ']' ? -1 : 0;
            if (depth <= 0) {
                commit(pending_key, pending, pending_line);
                pending.clear();
            }
            continue;
        }
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(origin, lineno, "malformed table header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) fail(origin, lineno, "empty table name");
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) fail(origin, lineno, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value_text = trim(line.substr(eq + 1));
        if (key.empty()) fail(origin, lineno, "empty key");
        int depth = 0;
        for (char ch : value_text)
            depth += ch == '[' ? 1 : ch == ']' ? -1 : 0;
        if (depth > 0) {
            pending = value_text;
            pending_key = key;
            pending_line = lineno;
            continue;
        }
        commit(key, value_text, lineno);
    }
    if (!pending.empty()) fail(origin, pending_line, "unterminated array");
    return table;
}

Table parse_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read config file: " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_string(buf.str(), path);
}

}  // namespace wavelab::toml
