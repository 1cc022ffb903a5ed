#include "rso2stat/tomlmini.hpp"

#include <cctype>
#include <charconv>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "rso2stat/series.hpp"

namespace rso2stat {

namespace {

using nlohmann::json;

struct Cursor {
    std::string_view text;
    std::size_t pos = 0;
    int line = 1;

    [[nodiscard]] bool done() const { return pos >= text.size(); }
    [[nodiscard]] char peek() const { return text[pos]; }
    char take() {
        char c = text[pos++];
        if (c == '\n') ++line;
        return c;
    }
    void skip_ws_inline() {
        while (!done() && (peek() == ' ' || peek() == '\t')) ++pos;
    }
};

[[noreturn]] void fail(const Cursor& c, const std::string& msg) {
    throw std::invalid_argument("toml parse error at line " + std::to_string(c.line) + ": " + msg);
}

void skip_to_eol(Cursor& c) {
    while (!c.done() && c.peek() != '\n') ++c.pos;
}

// comment or blank remainder of a line
void expect_line_end(Cursor& c) {
    c.skip_ws_inline();
    if (c.done()) return;
    if (c.peek() == '#') {
        skip_to_eol(c);
        return;
    }
    if (c.peek() == '\n' || c.peek() == '\r') return;
    fail(c, std::string("unexpected trailing content '") + c.peek() + "'");
}

std::string parse_key(Cursor& c) {
    c.skip_ws_inline();
    std::string key;
    if (!c.done() && c.peek() == '"') {
        c.take();
        while (!c.done() && c.peek() != '"') key += c.take();
        if (c.done()) fail(c, "unterminated quoted key");
        c.take();
    } else {
        while (!c.done()) {
            char ch = c.peek();
            if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-') {
                key += c.take();
            } else {
                break;
            }
        }
    }
    if (key.empty()) fail(c, "expected a key");
    return key;
}

json parse_value(Cursor& c);

json parse_array(Cursor& c) {
    json arr = json::array();
    c.take();  // '['
    for (;;) {
        // arrays may span lines
        while (!c.done()) {
            c.skip_ws_inline();
            if (c.done()) break;
            char ch = c.peek();
            if (ch == '\n' || ch == '\r') {
                c.take();
            } else if (ch == '#') {
                skip_to_eol(c);
            } else {
                break;
            }
        }
        if (c.done()) fail(c, "unterminated array");
        if (c.peek() == ']') {
            c.take();
            return arr;
        }
        arr.push_back(parse_value(c));
        while (!c.done()) {
            c.skip_ws_inline();
            if (!c.done() && (c.peek() == '\n' || c.peek() == '\r')) {
                c.take();
            } else if (!c.done() && c.peek() == '#') {
                skip_to_eol(c);
            } else {
                break;
            }
        }
        if (c.done()) fail(c, "unterminated array");
        if (c.peek() == ',') {
            c.take();
        } else if (c.peek() != ']') {
            fail(c, "expected ',' or ']' in array");
        }
    }
}

json parse_scalar(Cursor& c) {
    c.skip_ws_inline();
    if (c.done()) fail(c, "expected a value");
    if (c.peek() == '"') {
        c.take();
        std::string s;
        while (!c.done() && c.peek() != '"') {
            char ch = c.take();
            if (ch == '\\' && !c.done()) {
                char esc = c.take();
                switch (esc) {
                    case 'n': s += '\n'; break;
                    case 't': s += '\t'; break;
                    case '"': s += '"'; break;
                    case '\\': s += '\\'; break;
                    default: fail(c, std::string("unsupported escape \\") + esc);
                }
            } else {
                s += ch;
            }
        }
        if (c.done()) fail(c, "unterminated string");
        c.take();
        return json(s);
    }
    std::string token;
    while (!c.done()) {
        char ch = c.peek();
        if (ch == ',' || ch == ']' || ch == '#' || ch == '\n' || ch == '\r' || ch == ' ' || ch == '\t')
            break;
        token += c.take();
    }
    if (token == "true") return json(true);
    if (token == "false") return json(false);
    // integer first so whole numbers stay integral
    {
        long long iv = 0;
        auto [p, ec] = std::from_chars(token.data(), token.data() + token.size(), iv);
        if (ec == std::errc{} && p == token.data() + token.size()) return json(iv);
    }
    {
        double dv = 0.0;
        auto [p, ec] = std::from_chars(token.data(), token.data() + token.size(), dv);
        if (ec == std::errc{} && p == token.data() + token.size()) return json(dv);
    }
    fail(c, "cannot parse value '" + token + "'");
}

json parse_value(Cursor& c) {
    c.skip_ws_inline();
    if (c.done()) fail(c, "expected a value");
    if (c.peek() == '[') return parse_array(c);
    return parse_scalar(c);
}

std::vector<std::string> parse_dotted_path(Cursor& c) {
    std::vector<std::string> path;
    path.push_back(parse_key(c));
    c.skip_ws_inline();
    while (!c.done() && c.peek() == '.') {
        c.take();
        path.push_back(parse_key(c));
        c.skip_ws_inline();
    }
    return path;
}

json* descend(json& root, const std::vector<std::string>& path, const Cursor& c) {
    json* node = &root;
    for (const auto& part : path) {
        if (node->is_array()) node = &node->back();
        if (!node->is_object()) fail(c, "key '" + part + "' addresses a non-table");
        node = &(*node)[part];
        if (node->is_null()) *node = json::object();
    }
    if (node->is_array()) node = &node->back();
    return node;
}

}  // namespace

json parse_toml(const std::string& text) {
    Cursor c{text};
    json root = json::object();
    json* table = &root;

    while (!c.done()) {
        c.skip_ws_inline();
        if (c.done()) break;
        char ch = c.peek();
        if (ch == '\n' || ch == '\r') {
            c.take();
            continue;
        }
        if (ch == '#') {
            skip_to_eol(c);
            continue;
        }
        if (ch == '[') {
            c.take();
            bool array_of_tables = false;
            if (!c.done() && c.peek() == '[') {
                c.take();
                array_of_tables = true;
            }
            auto path = parse_dotted_path(c);
            c.skip_ws_inline();
            if (c.done() || c.peek() != ']') fail(c, "expected ']' closing table header");
            c.take();
            if (array_of_tables) {
                if (c.done() || c.peek() != ']') fail(c, "expected ']]' closing table-array header");
                c.take();
            }
            expect_line_end(c);

            if (array_of_tables) {
                json* parent = &root;
                for (std::size_t i = 0; i + 1 < path.size(); ++i) {
                    if (parent->is_array()) parent = &parent->back();
                    parent = &(*parent)[path[i]];
                    if (parent->is_null()) *parent = json::object();
                }
                if (parent->is_array()) parent = &parent->back();
                json& slot = (*parent)[path.back()];
                if (slot.is_null()) slot = json::array();
                if (!slot.is_array()) fail(c, "'" + path.back() + "' is not an array of tables");
                slot.push_back(json::object());
                table = &slot.back();
            } else {
                table = descend(root, path, c);
            }
            continue;
        }

        auto path = parse_dotted_path(c);
        c.skip_ws_inline();
        if (c.done() || c.peek() != '=') fail(c, "expected '=' after key '" + path.back() + "'");
        c.take();
        json value = parse_value(c);
        expect_line_end(c);

        json* target = table;
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
            target = &(*target)[path[i]];
            if (target->is_null()) *target = json::object();
            if (!target->is_object()) fail(c, "key '" + path[i] + "' addresses a non-table");
        }
        if (target->contains(path.back()))
            fail(c, "duplicate key '" + path.back() + "'");
        (*target)[path.back()] = std::move(value);
    }
    return root;
}

json load_config_file(const std::string& path) {
    const std::string text = read_text_file(path);
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".toml") return parse_toml(text);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
}

}  // namespace rso2stat
