#include "twolevel/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace twolevel::config {

namespace {

std::string format_error(const std::string& source, Location loc, const std::string& message) {
    std::ostringstream os;
    os << source << ":" << loc.line << ":" << loc.column << ": " << message;
    return os.str();
}

bool is_key_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'; }

class Parser {
public:
    Parser(const std::string& text, const std::string& source) : text_(text) { doc_.source = source; }

    Document run() {
        doc_.tables[""].loc = {1, 1};
        std::string current;
        while (true) {
            skip_blank_and_comments();
            if (eof()) break;
            if (peek() == '[') {
                current = table_header();
            } else {
                key_value(current);
            }
        }
        return std::move(doc_);
    }

private:
    const std::string& text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
    Document doc_;

    bool eof() const { return pos_ >= text_.size(); }
    char peek() const { return eof() ? '\0' : text_[pos_]; }
    Location here() const { return {line_, col_}; }

    char advance() {
        const char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    [[noreturn]] void fail(const std::string& message) const { doc_.fail(here(), message); }

    void skip_spaces() {
        while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) advance();
    }

    void skip_comment() {
        if (peek() == '#')
            while (!eof() && peek() != '\n') advance();
    }

    void skip_blank_and_comments() {
        while (!eof()) {
            skip_spaces();
            skip_comment();
            if (peek() == '\n')
                advance();
            else
                break;
        }
    }

    void expect_line_end() {
        skip_spaces();
        skip_comment();
        if (eof()) return;
        if (peek() != '\n') fail(std::string("unexpected character '") + peek() + "'");
        advance();
    }

    std::string bare_key() {
        std::string key;
        while (!eof() && is_key_char(peek())) key += advance();
        if (key.empty()) fail("expected a key");
        return key;
    }

    std::string table_header() {
        const Location loc = here();
        advance();  // '['
        skip_spaces();
        const std::string name = bare_key();
        skip_spaces();
        if (peek() == '.') fail("nested tables are not supported");
        if (peek() != ']') fail("expected ']' after table name");
        advance();
        expect_line_end();
        if (doc_.tables.count(name)) doc_.fail(loc, "duplicate table [" + name + "]");
        doc_.tables[name].loc = loc;
        return name;
    }

    void key_value(const std::string& table) {
        const Location loc = here();
        const std::string key = bare_key();
        skip_spaces();
        if (peek() != '=') fail("expected '=' after key '" + key + "'");
        advance();
        skip_spaces();
        Value v = value();
        expect_line_end();
        auto& entries = doc_.tables[table].entries;
        if (entries.count(key)) doc_.fail(loc, "duplicate key '" + key + "'");
        entries.emplace(key, std::move(v));
    }

    Value value() {
        const Location loc = here();
        if (eof() || peek() == '\n') fail("missing value");
        const char c = peek();
        if (c == '"') return {string_literal(), loc, false};
        if (c == '[') return {array(), loc, false};
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::string word;
            while (!eof() && std::isalpha(static_cast<unsigned char>(peek()))) word += advance();
            if (word == "true") return {true, loc, false};
            if (word == "false") return {false, loc, false};
            doc_.fail(loc, "unknown literal '" + word + "'");
        }
        return number();
    }

    std::string string_literal() {
        advance();  // opening quote
        std::string out;
        while (true) {
            if (eof() || peek() == '\n') fail("unterminated string");
            const char c = advance();
            if (c == '"') break;
            if (c != '\\') {
                out += c;
                continue;
            }
            if (eof()) fail("unterminated string");
            const char e = advance();
            switch (e) {
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                default: fail(std::string("unsupported escape '\\") + e + "'");
            }
        }
        return out;
    }

    Value number() {
        const Location loc = here();
        const std::size_t start = pos_;
        bool integer = true;
        if (peek() == '+' || peek() == '-') advance();
        while (!eof()) {
            const char c = peek();
            if (std::isdigit(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '.' || c == 'e' || c == 'E') {
                integer = false;
                advance();
                if ((c == 'e' || c == 'E') && (peek() == '+' || peek() == '-')) advance();
            } else {
                break;
            }
        }
        std::string token = text_.substr(start, pos_ - start);
        if (!token.empty() && token.front() == '+') token.erase(0, 1);
        double v = 0.0;
        const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
        if (token.empty() || ec != std::errc() || end != token.data() + token.size())
            doc_.fail(loc, "invalid number '" + text_.substr(start, pos_ - start) + "'");
        return {v, loc, integer};
    }

    Array array() {
        advance();  // '['
        Array out;
        while (true) {
            skip_blank_and_comments();
            if (eof()) fail("unterminated array");
            if (peek() == ']') {
                advance();
                return out;
            }
            out.push_back(value());
            skip_blank_and_comments();
            if (eof()) fail("unterminated array");
            if (peek() == ',') {
                advance();
            } else if (peek() != ']') {
                fail("expected ',' or ']' in array");
            }
        }
    }
};

}  // namespace

ConfigError::ConfigError(const std::string& source, Location loc, const std::string& message)
    : std::runtime_error(format_error(source, loc, message)), loc_(loc), detail_(message) {}

const char* Value::type_name() const {
    switch (data.index()) {
        case 0: return "number";
        case 1: return "boolean";
        case 2: return "string";
        default: return "array";
    }
}

const Table* Document::find_table(const std::string& name) const {
    const auto it = tables.find(name);
    return it == tables.end() ? nullptr : &it->second;
}

const Value* Document::find(const std::string& table, const std::string& key) const {
    const Table* t = find_table(table);
    if (!t) return nullptr;
    const auto it = t->entries.find(key);
    return it == t->entries.end() ? nullptr : &it->second;
}

void Document::set_number(const std::string& table, const std::string& key, double value, Location loc) {
    Table& t = tables[table];
    if (t.loc.line == 0) t.loc = loc;
    t.entries[key] = Value{value, loc, false};
}

void Document::fail(Location loc, const std::string& message) const { throw ConfigError(source, loc, message); }

Document parse(const std::string& text, const std::string& source) { return Parser(text, source).run(); }

Document parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path, {0, 0}, "cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path);
}

}  // namespace twolevel::config
