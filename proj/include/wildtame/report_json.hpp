#pragma once

#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kernelctl.hpp"

namespace wildtame {

/* ---------- strict JSON value model ---------- */

/* Reports carry every numeric as a decimal string, so the grammar here has no
 * number production at all: objects, arrays, strings, null, true, false. */
struct JsonValue {
    enum class Kind { Null, Bool, String, Array, Object };
    Kind kind = Kind::Null;
    bool boolean = false;
    std::string str;
    std::vector<JsonValue> arr;
    std::vector<std::pair<std::string, JsonValue>> obj; /* insertion order kept */

    const JsonValue *get(const std::string &key) const {
        for (const auto &[k, v] : obj)
            if (k == key) return &v;
        return nullptr;
    }
};

inline void json_escape_into(std::string &out, const std::string &s) {
    for (unsigned char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\b': out += "\\b"; break;
            case '\f': out += "\\f"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (c < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += static_cast<char>(c);
                }
        }
    }
}

inline std::string json_escape(const std::string &s) {
    std::string out;
    json_escape_into(out, s);
    return out;
}

namespace detail {

struct JsonParser {
    const std::string &text;
    std::size_t pos = 0;

    explicit JsonParser(const std::string &t) : text(t) {}

    [[noreturn]] void fail(const std::string &msg) const {
        throw std::runtime_error("json: " + msg + " at offset " + std::to_string(pos));
    }
    void skip_ws() {
        while (pos < text.size() &&
               (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '\n' || text[pos] == '\r'))
            ++pos;
    }
    char peek() {
        if (pos >= text.size()) fail("unexpected end of input");
        return text[pos];
    }
    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos;
    }
    bool consume_literal(const char *lit) {
        std::size_t n = std::string(lit).size();
        if (text.compare(pos, n, lit) == 0) {
            pos += n;
            return true;
        }
        return false;
    }

    std::string parse_string() {
        expect('"');
        std::string out;
        for (;;) {
            if (pos >= text.size()) fail("unterminated string");
            char c = text[pos++];
            if (c == '"') return out;
            if (c == '\\') {
                if (pos >= text.size()) fail("unterminated escape");
                char e = text[pos++];
                switch (e) {
                    case '"': out += '"'; break;
                    case '\\': out += '\\'; break;
                    case '/': out += '/'; break;
                    case 'b': out += '\b'; break;
                    case 'f': out += '\f'; break;
                    case 'n': out += '\n'; break;
                    case 'r': out += '\r'; break;
                    case 't': out += '\t'; break;
                    case 'u': {
                        if (pos + 4 > text.size()) fail("truncated \\u escape");
                        unsigned v = 0;
                        for (int i = 0; i < 4; ++i) {
                            char h = text[pos++];
                            v <<= 4;
                            if (h >= '0' && h <= '9') v |= static_cast<unsigned>(h - '0');
                            else if (h >= 'a' && h <= 'f') v |= static_cast<unsigned>(h - 'a' + 10);
                            else if (h >= 'A' && h <= 'F') v |= static_cast<unsigned>(h - 'A' + 10);
                            else fail("bad hex digit in \\u escape");
                        }
                        if (v >= 0x80) fail("\\u escapes above 0x7f are not used by reports");
                        out += static_cast<char>(v);
                        break;
                    }
                    default: fail("unknown escape");
                }
            } else {
                if (static_cast<unsigned char>(c) < 0x20) fail("raw control character in string");
                out += c;
            }
        }
    }

    JsonValue parse_value() {
        skip_ws();
        char c = peek();
        JsonValue v;
        if (c == '"') {
            v.kind = JsonValue::Kind::String;
            v.str = parse_string();
            return v;
        }
        if (c == '{') {
            ++pos;
            v.kind = JsonValue::Kind::Object;
            skip_ws();
            if (peek() == '}') {
                ++pos;
                return v;
            }
            for (;;) {
                skip_ws();
                std::string key = parse_string();
                for (const auto &[k, unused] : v.obj)
                    if (k == key) fail("duplicate object key \"" + key + "\"");
                skip_ws();
                expect(':');
                v.obj.emplace_back(key, parse_value());
                skip_ws();
                if (peek() == ',') {
                    ++pos;
                    continue;
                }
                expect('}');
                return v;
            }
        }
        if (c == '[') {
            ++pos;
            v.kind = JsonValue::Kind::Array;
            skip_ws();
            if (peek() == ']') {
                ++pos;
                return v;
            }
            for (;;) {
                v.arr.push_back(parse_value());
                skip_ws();
                if (peek() == ',') {
                    ++pos;
                    continue;
                }
                expect(']');
                return v;
            }
        }
        if (consume_literal("null")) return v;
        if (consume_literal("true")) {
            v.kind = JsonValue::Kind::Bool;
            v.boolean = true;
            return v;
        }
        if (consume_literal("false")) {
            v.kind = JsonValue::Kind::Bool;
            return v;
        }
        if (c == '-' || (c >= '0' && c <= '9'))
            fail("numbers are not allowed; numerics travel as decimal strings");
        fail("unexpected character");
    }
};

}  // namespace detail

inline JsonValue parse_json(const std::string &text) {
    detail::JsonParser p(text);
    JsonValue v = p.parse_value();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("trailing content");
    return v;
}

/* ---------- report serialization ---------- */

namespace detail {

inline void append_quoted(std::string &out, const std::string &s) {
    out += '"';
    json_escape_into(out, s);
    out += '"';
}

inline void append_field_object(std::string &out, const std::string &label, const Int &disc) {
    if (label.empty()) {
        out += "null";
        return;
    }
    out += "{\"label\":";
    append_quoted(out, label);
    out += ",\"discriminant\":";
    append_quoted(out, disc.str());
    out += "}";
}

inline void append_group(std::string &out, const std::optional<FiniteAbelianGroup> &g) {
    if (!g) {
        out += "null";
        return;
    }
    out += '[';
    for (std::size_t i = 0; i < g->rank(); ++i) {
        if (i) out += ',';
        append_quoted(out, g->invariants()[i].str());
    }
    out += ']';
}

inline void append_opt_long(std::string &out, const std::optional<long> &n) {
    if (!n) {
        out += "null";
        return;
    }
    append_quoted(out, std::to_string(*n));
}

}  // namespace detail

/* Canonical single-line form; field order is fixed and all numerics are
 * decimal strings, so equal reports serialize byte-identically. */
inline std::string report_to_json(const KernelReport &rep) {
    std::string out = "{\"delta\":";
    detail::append_quoted(out, rep.delta.str());
    out += ",\"k\":";
    detail::append_field_object(out, rep.k_label, rep.k_disc);
    out += ",\"k_prime\":";
    detail::append_field_object(out, rep.kprime_label, rep.kprime_disc);
    out += ",\"local_index\":";
    detail::append_quoted(out, std::to_string(rep.local_index));
    out += ",\"v3_order\":";
    detail::append_opt_long(out, rep.v3_order);
    out += ",\"v3_source\":";
    detail::append_quoted(out, rep.v3_source);
    out += ",\"rank3\":";
    detail::append_opt_long(out, rep.rank3);
    out += ",\"k2_structure\":";
    detail::append_group(out, rep.k2_structure);
    out += ",\"wk_structure\":";
    detail::append_group(out, rep.wk_structure);
    out += ",\"verdict\":";
    detail::append_quoted(out, verdict_name(rep.verdict));
    out += ",\"assurance\":";
    detail::append_quoted(out, rep.assurance);
    out += ",\"banner\":";
    detail::append_quoted(out, rep.banner);
    out += ",\"evidence\":[";
    for (std::size_t i = 0; i < rep.evidence.size(); ++i) {
        const EvidenceItem &e = rep.evidence[i];
        if (i) out += ',';
        out += "{\"rule\":";
        detail::append_quoted(out, e.rule);
        out += ",\"statement\":";
        detail::append_quoted(out, e.statement);
        out += ",\"inputs\":[";
        for (std::size_t j = 0; j < e.inputs.size(); ++j) {
            if (j) out += ',';
            out += '[';
            detail::append_quoted(out, e.inputs[j].first);
            out += ',';
            detail::append_quoted(out, e.inputs[j].second);
            out += ']';
        }
        out += "]}";
    }
    out += "]}";
    return out;
}

namespace detail {

inline const JsonValue &require_kind(const JsonValue &v, JsonValue::Kind k, const char *what) {
    if (v.kind != k) throw std::runtime_error(std::string("json report: ") + what);
    return v;
}

inline std::string require_string(const JsonValue &v, const char *what) {
    return require_kind(v, JsonValue::Kind::String, what).str;
}

inline std::optional<long> read_opt_long(const JsonValue &v, const char *what) {
    if (v.kind == JsonValue::Kind::Null) return std::nullopt;
    std::string s = require_string(v, what);
    std::size_t used = 0;
    long n = std::stol(s, &used);
    if (used != s.size()) throw std::runtime_error(std::string("json report: ") + what);
    return n;
}

inline std::optional<FiniteAbelianGroup> read_group(const JsonValue &v, const char *what) {
    if (v.kind == JsonValue::Kind::Null) return std::nullopt;
    require_kind(v, JsonValue::Kind::Array, what);
    std::vector<Int> inv;
    inv.reserve(v.arr.size());
    for (const JsonValue &e : v.arr) inv.push_back(Int(require_string(e, what)));
    if (inv.empty()) return FiniteAbelianGroup();
    FiniteAbelianGroup g = FiniteAbelianGroup::from_factors(inv);
    if (g.invariants() != inv)
        throw std::runtime_error(std::string("json report: non-canonical invariants in ") + what);
    return g;
}

}  // namespace detail

inline KernelReport report_from_json(const std::string &text) {
    JsonValue root = parse_json(text);
    detail::require_kind(root, JsonValue::Kind::Object, "top level must be an object");
    static const char *expected[] = {"delta",        "k",         "k_prime",  "local_index",
                                     "v3_order",     "v3_source", "rank3",    "k2_structure",
                                     "wk_structure", "verdict",   "assurance", "banner",
                                     "evidence"};
    constexpr std::size_t nkeys = sizeof expected / sizeof expected[0];
    if (root.obj.size() != nkeys)
        throw std::runtime_error("json report: wrong number of fields");
    for (std::size_t i = 0; i < nkeys; ++i)
        if (root.obj[i].first != expected[i])
            throw std::runtime_error("json report: unexpected field order at \"" +
                                     root.obj[i].first + "\"");

    KernelReport rep;
    rep.delta = Int(detail::require_string(root.obj[0].second, "delta must be a string"));
    auto read_field = [](const JsonValue &v, std::string &label, Int &disc, const char *what) {
        if (v.kind == JsonValue::Kind::Null) {
            label.clear();
            disc = 0;
            return;
        }
        detail::require_kind(v, JsonValue::Kind::Object, what);
        const JsonValue *l = v.get("label");
        const JsonValue *d = v.get("discriminant");
        if (!l || !d || v.obj.size() != 2) throw std::runtime_error(std::string("json report: ") + what);
        label = detail::require_string(*l, what);
        disc = Int(detail::require_string(*d, what));
    };
    read_field(root.obj[1].second, rep.k_label, rep.k_disc, "malformed k");
    read_field(root.obj[2].second, rep.kprime_label, rep.kprime_disc, "malformed k_prime");
    std::string li = detail::require_string(root.obj[3].second, "local_index must be a string");
    if (li != "1" && li != "3") throw std::runtime_error("json report: local_index must be 1 or 3");
    rep.local_index = li == "3" ? 3 : 1;
    rep.v3_order = detail::read_opt_long(root.obj[4].second, "malformed v3_order");
    rep.v3_source = detail::require_string(root.obj[5].second, "v3_source must be a string");
    rep.rank3 = detail::read_opt_long(root.obj[6].second, "malformed rank3");
    rep.k2_structure = detail::read_group(root.obj[7].second, "k2_structure");
    rep.wk_structure = detail::read_group(root.obj[8].second, "wk_structure");
    rep.verdict =
        verdict_from_name(detail::require_string(root.obj[9].second, "verdict must be a string"));
    rep.assurance = detail::require_string(root.obj[10].second, "assurance must be a string");
    rep.banner = detail::require_string(root.obj[11].second, "banner must be a string");
    const JsonValue &ev = root.obj[12].second;
    detail::require_kind(ev, JsonValue::Kind::Array, "evidence must be an array");
    for (const JsonValue &item : ev.arr) {
        detail::require_kind(item, JsonValue::Kind::Object, "evidence item must be an object");
        if (item.obj.size() != 3 || item.obj[0].first != "rule" ||
            item.obj[1].first != "statement" || item.obj[2].first != "inputs")
            throw std::runtime_error("json report: malformed evidence item");
        EvidenceItem e;
        e.rule = detail::require_string(item.obj[0].second, "evidence rule");
        e.statement = detail::require_string(item.obj[1].second, "evidence statement");
        const JsonValue &inputs = item.obj[2].second;
        detail::require_kind(inputs, JsonValue::Kind::Array, "evidence inputs must be an array");
        for (const JsonValue &pair : inputs.arr) {
            detail::require_kind(pair, JsonValue::Kind::Array, "evidence input must be a pair");
            if (pair.arr.size() != 2)
                throw std::runtime_error("json report: evidence input must be a pair");
            e.inputs.emplace_back(detail::require_string(pair.arr[0], "evidence input key"),
                                  detail::require_string(pair.arr[1], "evidence input value"));
        }
        rep.evidence.push_back(std::move(e));
    }
    return rep;
}

/* ---------- table rendering ---------- */

inline std::string structure_cell(const std::optional<FiniteAbelianGroup> &g) {
    if (!g) return "?";
    if (g->is_trivial()) return "1";
    std::string s;
    for (std::size_t i = g->rank(); i-- > 0;) {
        s += g->invariants()[i].str();
        if (i) s += "x";
    }
    return s;
}

inline std::string render_table(const std::vector<KernelReport> &reps) {
    static const char *headers[] = {"delta", "v3", "rank", "K2", "WK", "verdict", "assurance"};
    constexpr std::size_t ncols = sizeof headers / sizeof headers[0];
    std::vector<std::vector<std::string>> rows;
    rows.reserve(reps.size());
    for (const KernelReport &r : reps) {
        rows.push_back({r.delta.str(), r.v3_order ? std::to_string(*r.v3_order) : "?",
                        r.rank3 ? std::to_string(*r.rank3) : "?", structure_cell(r.k2_structure),
                        structure_cell(r.wk_structure), verdict_name(r.verdict), r.assurance});
    }
    std::vector<std::size_t> width(ncols);
    for (std::size_t c = 0; c < ncols; ++c) width[c] = std::string(headers[c]).size();
    for (const auto &row : rows)
        for (std::size_t c = 0; c < ncols; ++c) width[c] = std::max(width[c], row[c].size());
    auto emit_row = [&](const std::vector<std::string> &cells, std::string &out) {
        for (std::size_t c = 0; c < ncols; ++c) {
            out += cells[c];
            if (c + 1 < ncols) out += std::string(width[c] - cells[c].size() + 2, ' ');
        }
        out += '\n';
    };
    std::string out;
    std::vector<std::string> head(headers, headers + ncols);
    emit_row(head, out);
    for (const auto &row : rows) emit_row(row, out);
    return out;
}

inline std::string scan_footer(const std::vector<KernelReport> &reps, const std::string &format) {
    static const Verdict order[] = {Verdict::Split, Verdict::NonSplit, Verdict::TriviallySplit,
                                    Verdict::NeedsLevelOneData, Verdict::Unknown};
    std::size_t counts[5] = {0, 0, 0, 0, 0};
    for (const KernelReport &r : reps)
        for (std::size_t i = 0; i < 5; ++i)
            if (r.verdict == order[i]) ++counts[i];
    if (format == "json") {
        std::string out = "{\"scanned\":";
        detail::append_quoted(out, std::to_string(reps.size()));
        for (std::size_t i = 0; i < 5; ++i) {
            out += ",";
            detail::append_quoted(out, verdict_name(order[i]));
            out += ":";
            detail::append_quoted(out, std::to_string(counts[i]));
        }
        out += "}";
        return out;
    }
    std::string out = "scanned " + std::to_string(reps.size()) + ":";
    for (std::size_t i = 0; i < 5; ++i)
        out += " " + verdict_name(order[i]) + " " + std::to_string(counts[i]) +
               (i + 1 < 5 ? "," : "");
    return out;
}

}  // namespace wildtame
