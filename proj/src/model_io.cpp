#include "sisstab/model_io.hpp"

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "sisstab/errors.hpp"

namespace sisstab {

namespace {

// Just enough TOML for model files: tables, arrays of tables, strings,
// numbers (kept as text), booleans and nested arrays.
struct Value {
    enum class Kind { String, Number, Bool, Array, Table };
    Kind kind = Kind::Table;
    std::string text;
    bool flag = false;
    std::vector<Value> items;
    std::map<std::string, Value> table;
};

class TomlReader {
public:
    explicit TomlReader(const std::string& text) : s_(text) {}

    Value parse() {
        Value root;
        Value* current = &root;
        while (true) {
            skip_blank_lines();
            if (at_end()) break;
            if (peek() == '[') {
                current = header(root);
            } else {
                std::string key = parse_key();
                skip_ws();
                expect('=');
                skip_ws();
                Value v = parse_value();
                if (current->table.count(key)) fail("duplicate key '" + key + "'");
                current->table.emplace(key, std::move(v));
                end_of_line();
            }
        }
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("line " + std::to_string(line_) + ": " + msg);
    }

    bool at_end() const { return pos_ >= s_.size(); }
    char peek() const { return at_end() ? '\0' : s_[pos_]; }
    char get() {
        if (at_end()) fail("unexpected end of input");
        char c = s_[pos_++];
        if (c == '\n') ++line_;
        return c;
    }
    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        get();
    }

    void skip_ws() {
        while (peek() == ' ' || peek() == '\t') get();
    }
    void skip_comment() {
        if (peek() == '#')
            while (!at_end() && peek() != '\n') get();
    }
    // whitespace, comments and newlines
    void skip_space() {
        while (true) {
            skip_ws();
            skip_comment();
            if (peek() == '\n' || peek() == '\r') get();
            else break;
        }
    }
    void skip_blank_lines() { skip_space(); }

    void end_of_line() {
        skip_ws();
        skip_comment();
        if (peek() == '\r') get();
        if (!at_end() && peek() != '\n') fail("unexpected text after value");
    }

    Value* header(Value& root) {
        get();
        const bool array = peek() == '[';
        if (array) get();
        skip_ws();
        std::string name = parse_key();
        skip_ws();
        expect(']');
        if (array) expect(']');
        end_of_line();
        if (array) {
            auto& slot = root.table[name];
            if (slot.kind != Value::Kind::Array) {
                if (!slot.table.empty()) fail("'" + name + "' is already a table");
                slot.kind = Value::Kind::Array;
            }
            slot.items.emplace_back();
            return &slot.items.back();
        }
        if (root.table.count(name)) fail("table [" + name + "] defined twice");
        return &root.table[name];
    }

    std::string parse_key() {
        if (peek() == '"') return parse_string();
        std::string key;
        while (!at_end()) {
            const char c = peek();
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') key += get();
            else break;
        }
        if (key.empty()) fail("expected a key");
        if (peek() == '.') fail("dotted keys are not supported");
        return key;
    }

    std::string parse_string() {
        expect('"');
        std::string out;
        while (true) {
            char c = get();
            if (c == '"') break;
            if (c == '\n') fail("unterminated string");
            if (c == '\\') {
                char e = get();
                switch (e) {
                    case 'n': out += '\n'; break;
                    case 't': out += '\t'; break;
                    case '"': out += '"'; break;
                    case '\\': out += '\\'; break;
                    default: fail(std::string("unsupported escape \\") + e);
                }
            } else {
                out += c;
            }
        }
        return out;
    }

    Value parse_value() {
        Value v;
        const char c = peek();
        if (c == '"') {
            v.kind = Value::Kind::String;
            v.text = parse_string();
        } else if (c == '[') {
            v.kind = Value::Kind::Array;
            get();
            skip_space();
            while (peek() != ']') {
                v.items.push_back(parse_value());
                skip_space();
                if (peek() == ',') {
                    get();
                    skip_space();
                } else if (peek() != ']') {
                    fail("expected ',' or ']' in array");
                }
            }
            get();
        } else {
            std::string tok;
            while (!at_end()) {
                const char d = peek();
                if (d == ',' || d == ']' || d == '#' || d == '\n' || d == '\r' || d == ' ' || d == '\t') break;
                tok += get();
            }
            if (tok.empty()) fail("expected a value");
            if (tok == "true" || tok == "false") {
                v.kind = Value::Kind::Bool;
                v.flag = tok == "true";
            } else {
                v.kind = Value::Kind::Number;
                v.text = tok;
            }
        }
        return v;
    }

    const std::string& s_;
    std::size_t pos_ = 0;
    int line_ = 1;
};

const Value* find(const Value& t, const std::string& key) {
    auto it = t.table.find(key);
    return it == t.table.end() ? nullptr : &it->second;
}

void reject_unknown(const Value& t, const std::string& where, std::initializer_list<const char*> known) {
    for (const auto& [k, v] : t.table) {
        bool ok = false;
        for (const char* name : known) ok = ok || k == name;
        if (!ok) throw ParseError("unknown key '" + k + "' in " + where);
    }
}

int get_int(const Value& t, const std::string& key, const std::string& where, std::optional<int> fallback = {}) {
    const Value* v = find(t, key);
    if (!v) {
        if (fallback) return *fallback;
        throw ParseError(where + ": missing '" + key + "'");
    }
    if (v->kind != Value::Kind::Number) throw ParseError(where + ": '" + key + "' must be an integer");
    try {
        std::size_t used = 0;
        const int out = std::stoi(v->text, &used);
        if (used != v->text.size()) throw std::invalid_argument(v->text);
        return out;
    } catch (const std::exception&) {
        throw ParseError(where + ": '" + key + "' must be an integer, got " + v->text);
    }
}

std::string get_string(const Value& t, const std::string& key, const std::string& where) {
    const Value* v = find(t, key);
    if (!v) throw ParseError(where + ": missing '" + key + "'");
    if (v->kind != Value::Kind::String) throw ParseError(where + ": '" + key + "' must be a string");
    return v->text;
}

RatMatrix get_matrix(const Value& t, const std::string& key, const std::string& where) {
    const Value* v = find(t, key);
    if (!v) throw ParseError(where + ": missing matrix " + key);
    if (v->kind != Value::Kind::Array) throw ParseError(key + " must be an array of rows");
    std::vector<std::vector<std::string>> rows;
    for (const auto& row : v->items) {
        if (row.kind != Value::Kind::Array) throw ParseError(key + " must be an array of rows");
        std::vector<std::string> r;
        for (const auto& e : row.items) {
            if (e.kind != Value::Kind::String && e.kind != Value::Kind::Number)
                throw ParseError(key + ": entries must be numbers or numeric strings");
            r.push_back(e.text);
        }
        rows.push_back(std::move(r));
    }
    try {
        return RatMatrix::from_strings(rows);
    } catch (const ShapeError& e) {
        throw ShapeError(key + ": " + e.what());
    } catch (const ParseError& e) {
        throw ParseError(key + ": " + e.what());
    } catch (const std::exception& e) {
        throw ParseError(key + ": non-numeric entry (" + e.what() + ")");
    }
}

void write_matrix(std::ostream& os, const char* name, const RatMatrix& M) {
    os << name << " = [";
    for (int r = 0; r < M.rows; ++r) {
        os << (r ? ", [" : "[");
        for (int c = 0; c < M.cols; ++c) {
            const Rational& q = M.at(r, c);
            os << (c ? ", \"" : "\"") << (q.get_den() == 1 ? q.get_num().get_str() : to_string(q)) << '"';
        }
        os << ']';
    }
    os << "]\n";
}

}  // namespace

SisModel parse_model_text(const std::string& text) {
    const Value root = TomlReader(text).parse();
    reject_unknown(root, "model file", {"system", "direction", "matrices", "boundary"});

    SisModel m;
    const Value* sys = find(root, "system");
    if (!sys || sys->kind != Value::Kind::Table) throw ParseError("missing [system] table");
    reject_unknown(*sys, "[system]", {"n0"});
    m.n0 = get_int(*sys, "n0", "[system]");

    const Value* dirs = find(root, "direction");
    if (!dirs || dirs->kind != Value::Kind::Array) throw ParseError("missing [[direction]] tables");
    for (std::size_t i = 0; i < dirs->items.size(); ++i) {
        const Value& d = dirs->items[i];
        const std::string where = "direction " + std::to_string(i + 1);
        reject_unknown(d, where, {"kind", "n_pos", "n_neg", "period"});
        DirectionSpec spec;
        const std::string kind = get_string(d, "kind", where);
        if (kind == "infinite") spec.kind = DirectionKind::Infinite;
        else if (kind == "periodic") spec.kind = DirectionKind::Periodic;
        else if (kind == "finite") spec.kind = DirectionKind::Finite;
        else throw ParseError(where + ": unknown direction kind '" + kind + "'");
        spec.n_pos = get_int(d, "n_pos", where);
        spec.n_neg = get_int(d, "n_neg", where);
        if (spec.kind == DirectionKind::Infinite) {
            if (find(d, "period")) throw ParseError(where + ": infinite directions take no period");
        } else {
            spec.period = get_int(d, "period", where);
        }
        m.directions.push_back(spec);
    }

    const Value* mats = find(root, "matrices");
    if (!mats || mats->kind != Value::Kind::Table) throw ParseError("missing [matrices] table");
    reject_unknown(*mats, "[matrices]", {"A_TT", "A_TS", "A_ST", "A_SS"});
    m.A_TT = get_matrix(*mats, "A_TT", "[matrices]");
    m.A_TS = get_matrix(*mats, "A_TS", "[matrices]");
    m.A_ST = get_matrix(*mats, "A_ST", "[matrices]");
    m.A_SS = get_matrix(*mats, "A_SS", "[matrices]");

    if (const Value* bs = find(root, "boundary")) {
        if (bs->kind != Value::Kind::Array) throw ParseError("boundary must be given as [[boundary]] tables");
        for (std::size_t i = 0; i < bs->items.size(); ++i) {
            const std::string where = "boundary " + std::to_string(i + 1);
            reject_unknown(bs->items[i], where, {"direction", "M"});
            BoundarySpec b;
            b.direction = get_int(bs->items[i], "direction", where) - 1;
            b.M = get_matrix(bs->items[i], "M", where);
            m.boundaries.push_back(std::move(b));
        }
    }
    m.validate();
    return m;
}

SisModel parse_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open model file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_model_text(ss.str());
}

std::string model_to_toml(const SisModel& m) {
    std::ostringstream os;
    os << "[system]\nn0 = " << m.n0 << "\n";
    for (const auto& d : m.directions) {
        os << "\n[[direction]]\nkind = \"" << to_string(d.kind) << "\"\n";
        if (d.kind != DirectionKind::Infinite) os << "period = " << d.period << "\n";
        os << "n_pos = " << d.n_pos << "\nn_neg = " << d.n_neg << "\n";
    }
    os << "\n[matrices]\n";
    write_matrix(os, "A_TT", m.A_TT);
    write_matrix(os, "A_TS", m.A_TS);
    write_matrix(os, "A_ST", m.A_ST);
    write_matrix(os, "A_SS", m.A_SS);
    for (const auto& b : m.boundaries) {
        os << "\n[[boundary]]\ndirection = " << b.direction + 1 << "\n";
        write_matrix(os, "M", b.M);
    }
    return os.str();
}

std::string model_hash(const SisModel& m) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : model_to_toml(m)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace sisstab
