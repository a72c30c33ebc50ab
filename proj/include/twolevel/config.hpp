// config.hpp: a small TOML subset for scenario files.
//
// Supported: [table] headers (one level), key = value pairs, # comments,
// double-quoted strings, numbers, true/false, and arrays of those (arrays may
// span lines). Every value remembers where it was written so later schema
// errors can point at it.

#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace twolevel::config {

struct Location {
    std::size_t line = 0;
    std::size_t column = 0;
};

/// Parse or schema error, reported as "<source>:<line>:<column>: <message>".
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& source, Location loc, const std::string& message);

    Location location() const { return loc_; }
    const std::string& detail() const { return detail_; }

private:
    Location loc_;
    std::string detail_;
};

struct Value;
using Array = std::vector<Value>;

struct Value {
    std::variant<double, bool, std::string, Array> data;
    Location loc;
    bool integer = false;  // numeric literal without '.', 'e' or 'E'

    bool is_number() const { return std::holds_alternative<double>(data); }
    bool is_bool() const { return std::holds_alternative<bool>(data); }
    bool is_string() const { return std::holds_alternative<std::string>(data); }
    bool is_array() const { return std::holds_alternative<Array>(data); }
    const char* type_name() const;
};

struct Table {
    Location loc;
    std::map<std::string, Value> entries;
};

class Document {
public:
    /// Root keys live in the table named "".
    std::map<std::string, Table> tables;
    std::string source;  // file name used in error messages

    const Table* find_table(const std::string& name) const;
    const Value* find(const std::string& table, const std::string& key) const;

    /// Overwrite (or create) table.key with a number; the value takes `loc`.
    void set_number(const std::string& table, const std::string& key, double value, Location loc);

    [[noreturn]] void fail(Location loc, const std::string& message) const;
};

Document parse(const std::string& text, const std::string& source = "<config>");
Document parse_file(const std::string& path);

}  // namespace twolevel::config
