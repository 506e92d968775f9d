#include "lpma/tomlite.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

#include "lpma/errors.hpp"

namespace lpma::toml {

namespace {

[[noreturn]] void fail(int line, const std::string& what) {
    throw Error(ErrorCode::InvalidSpec, "line " + std::to_string(line) + ": " + what);
}

const char* type_name(const Value& v) {
    if (v.is_integer()) return "integer";
    if (v.is_float()) return "float";
    if (v.is_bool()) return "boolean";
    if (v.is_string()) return "string";
    if (v.is_array()) return "array";
    if (v.is_table()) return "table";
    return "array of tables";
}

[[noreturn]] void type_error(const Value& v, const char* wanted) {
    throw Error(ErrorCode::InvalidSpec,
                std::string("expected ") + wanted + ", found " + type_name(v));
}

std::string strip(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

/// Remove a trailing comment, honoring double-quoted strings.
std::string strip_comment(const std::string& s) {
    bool in_string = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (in_string) {
            if (c == '\\') {
                ++i;
            } else if (c == '"') {
                in_string = false;
            }
        } else if (c == '"') {
            in_string = true;
        } else if (c == '#') {
            return s.substr(0, i);
        }
    }
    return s;
}

bool is_bare_key_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '-';
}

std::vector<std::string> split_dotted(const std::string& path, int line) {
    std::vector<std::string> parts;
    std::string part;
    std::stringstream ss(path);
    while (std::getline(ss, part, '.')) {
        part = strip(part);
        if (part.empty() || !std::all_of(part.begin(), part.end(), is_bare_key_char)) {
            fail(line, "malformed key path '" + path + "'");
        }
        parts.push_back(part);
    }
    if (parts.empty()) fail(line, "empty key path");
    return parts;
}

std::string parse_string_literal(const std::string& s, int line) {
    if (s.size() < 2 || s.front() != '"' || s.back() != '"') {
        fail(line, "malformed string literal " + s);
    }
    std::string out;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        const char c = s[i];
        if (c == '"') fail(line, "unescaped quote inside string literal");
        if (c != '\\') {
            out.push_back(c);
            continue;
        }
        if (i + 2 >= s.size()) fail(line, "dangling escape in string literal");
        const char esc = s[++i];
        switch (esc) {
            case '"': out.push_back('"'); break;
            case '\\': out.push_back('\\'); break;
            case 'n': out.push_back('\n'); break;
            case 't': out.push_back('\t'); break;
            default: fail(line, std::string("unsupported escape \\") + esc);
        }
    }
    return out;
}

Value parse_scalar(const std::string& raw, int line) {
    const std::string s = strip(raw);
    if (s.empty()) fail(line, "missing value");
    if (s.front() == '"') return Value{Value::Data{parse_string_literal(s, line)}};
    if (s == "true") return Value{Value::Data{true}};
    if (s == "false") return Value{Value::Data{false}};

    const bool looks_float = s.find_first_of(".eE") != std::string::npos &&
                             s.find_first_not_of("+-0123456789.eE") == std::string::npos;
    if (!looks_float) {
        std::int64_t iv = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), iv);
        if (ec == std::errc{} && ptr == s.data() + s.size()) {
            return Value{Value::Data{iv}};
        }
    }
    try {
        std::size_t pos = 0;
        const double dv = std::stod(s, &pos);
        if (pos == s.size()) return Value{Value::Data{dv}};
    } catch (const std::exception&) {
    }
    fail(line, "unparseable value '" + s + "'");
}

Value parse_array(const std::string& raw, int line) {
    const std::string s = strip(raw);
    if (s.size() < 2 || s.front() != '[' || s.back() != ']') {
        fail(line, "malformed array " + s);
    }
    Value::Array items;
    std::string body = s.substr(1, s.size() - 2);
    std::string item;
    bool in_string = false;
    for (std::size_t i = 0; i <= body.size(); ++i) {
        const bool at_end = i == body.size();
        const char c = at_end ? ',' : body[i];
        if (!at_end && in_string) {
            item.push_back(c);
            if (c == '\\' && i + 1 < body.size()) item.push_back(body[++i]);
            else if (c == '"') in_string = false;
            continue;
        }
        if (c == '"') {
            in_string = true;
            item.push_back(c);
        } else if (c == ',') {
            const std::string trimmed = strip(item);
            if (!trimmed.empty()) items.push_back(parse_scalar(trimmed, line));
            else if (!at_end) fail(line, "empty array element");
            item.clear();
        } else {
            item.push_back(c);
        }
    }
    if (in_string) fail(line, "unterminated string in array");
    if (!items.empty()) {
        const std::size_t first = items.front().data().index();
        const bool numeric_mix =
            std::all_of(items.begin(), items.end(),
                        [](const Value& v) { return v.is_integer() || v.is_float(); });
        const bool homogeneous = std::all_of(
            items.begin(), items.end(),
            [first](const Value& v) { return v.data().index() == first; });
        if (!homogeneous && !numeric_mix) fail(line, "mixed-type array");
    }
    return Value{Value::Data{std::move(items)}};
}

Table* descend(Table& root, const std::vector<std::string>& path, int line,
               bool allow_last_table_array) {
    Table* cur = &root;
    for (std::size_t i = 0; i < path.size(); ++i) {
        const std::string& key = path[i];
        auto it = cur->find(key);
        if (it == cur->end()) {
            it = cur->emplace(key, Value{Value::Data{Table{}}}).first;
        }
        Value& v = it->second;
        if (v.is_table()) {
            cur = &std::get<Table>(v.data());
        } else if (v.is_table_array() && (allow_last_table_array || i + 1 < path.size())) {
            auto& arr = std::get<Value::TableArray>(v.data());
            if (arr.empty()) fail(line, "empty table array at '" + key + "'");
            cur = &arr.back();
        } else {
            fail(line, "key '" + key + "' is not a table");
        }
    }
    return cur;
}

}  // namespace

std::int64_t Value::as_integer() const {
    if (!is_integer()) type_error(*this, "integer");
    return std::get<std::int64_t>(data_);
}

double Value::as_float() const {
    if (is_integer()) return static_cast<double>(std::get<std::int64_t>(data_));
    if (!is_float()) type_error(*this, "float");
    return std::get<double>(data_);
}

bool Value::as_bool() const {
    if (!is_bool()) type_error(*this, "boolean");
    return std::get<bool>(data_);
}

const std::string& Value::as_string() const {
    if (!is_string()) type_error(*this, "string");
    return std::get<std::string>(data_);
}

const Value::Array& Value::as_array() const {
    if (!is_array()) type_error(*this, "array");
    return std::get<Array>(data_);
}

const Table& Value::as_table() const {
    if (!is_table()) type_error(*this, "table");
    return std::get<Table>(data_);
}

const Value::TableArray& Value::as_table_array() const {
    if (!is_table_array()) type_error(*this, "array of tables");
    return std::get<TableArray>(data_);
}

Table parse(const std::string& text) {
    Table root;
    Table* current = &root;

    std::istringstream is(text);
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string s = strip(strip_comment(line));
        if (s.empty()) continue;

        if (s.starts_with("[[")) {
            if (!s.ends_with("]]")) fail(line_no, "malformed table-array header");
            const auto path = split_dotted(s.substr(2, s.size() - 4), line_no);
            const std::vector<std::string> parent(path.begin(), path.end() - 1);
            Table* host = descend(root, parent, line_no, true);
            auto it = host->find(path.back());
            if (it == host->end()) {
                it = host->emplace(path.back(), Value{Value::Data{Value::TableArray{}}}).first;
            }
            if (!it->second.is_table_array()) {
                fail(line_no, "key '" + path.back() + "' is not an array of tables");
            }
            auto& arr = std::get<Value::TableArray>(it->second.data());
            arr.emplace_back();
            current = &arr.back();
            continue;
        }
        if (s.starts_with("[")) {
            if (!s.ends_with("]")) fail(line_no, "malformed table header");
            const auto path = split_dotted(s.substr(1, s.size() - 2), line_no);
            current = descend(root, path, line_no, false);
            continue;
        }

        const std::size_t eq = s.find('=');
        if (eq == std::string::npos) fail(line_no, "expected key = value");
        const std::string key = strip(s.substr(0, eq));
        if (key.empty() || !std::all_of(key.begin(), key.end(), is_bare_key_char)) {
            fail(line_no, "malformed key '" + key + "'");
        }
        std::string value_text = strip(s.substr(eq + 1));
        if (value_text.empty()) fail(line_no, "missing value for '" + key + "'");

        // Arrays may continue across lines until their brackets balance.
        if (value_text.front() == '[') {
            auto bracket_balance = [](const std::string& t) {
                int depth = 0;
                bool in_string = false;
                for (std::size_t i = 0; i < t.size(); ++i) {
                    const char c = t[i];
                    if (in_string) {
                        if (c == '\\') ++i;
                        else if (c == '"') in_string = false;
                    } else if (c == '"') {
                        in_string = true;
                    } else if (c == '[') {
                        ++depth;
                    } else if (c == ']') {
                        --depth;
                    }
                }
                return depth;
            };
            int depth = bracket_balance(value_text);
            while (depth > 0 && std::getline(is, line)) {
                ++line_no;
                if (!line.empty() && line.back() == '\r') line.pop_back();
                const std::string cont = strip(strip_comment(line));
                value_text += " " + cont;
                depth += bracket_balance(cont);
            }
            if (depth != 0) fail(line_no, "unbalanced array brackets");
        }

        if (current->contains(key)) fail(line_no, "duplicate key '" + key + "'");
        if (value_text.front() == '[') {
            current->emplace(key, parse_array(value_text, line_no));
        } else {
            current->emplace(key, parse_scalar(value_text, line_no));
        }
    }
    return root;
}

}  // namespace lpma::toml
