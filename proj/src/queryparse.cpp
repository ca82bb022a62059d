#include "smartint/queryparse.hpp"

#include <cctype>

namespace smartint {

namespace {

struct Cursor {
    const std::string& text;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace((unsigned char)text[pos])) ++pos;
    }
    bool done() {
        skip_ws();
        return pos >= text.size();
    }
    [[noreturn]] void fail(const std::string& msg) const {
        std::string full = msg + "\n" + text + "\n" + std::string(pos, ' ') + "^";
        throw QueryParseError(full, pos);
    }
    bool keyword(const char* kw) {
        skip_ws();
        std::size_t i = pos, k = 0;
        while (kw[k] && i < text.size() &&
               std::tolower((unsigned char)text[i]) == std::tolower((unsigned char)kw[k]))
            ++i, ++k;
        if (kw[k]) return false;
        // a keyword must not run into an identifier character
        if (i < text.size() && (std::isalnum((unsigned char)text[i]) || text[i] == '_'))
            return false;
        pos = i;
        return true;
    }
    std::string identifier() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum((unsigned char)text[pos]) || text[pos] == '_' || text[pos] == '-'))
            ++pos;
        if (pos == start) fail("expected attribute name");
        return normalize_value(text.substr(start, pos - start));
    }
    Constraint::Op op() {
        skip_ws();
        if (pos >= text.size()) fail("expected comparison operator");
        char c = text[pos];
        if (c == '=') {
            ++pos;
            return Constraint::Op::Eq;
        }
        if (c == '<' || c == '>') {
            bool less = c == '<';
            ++pos;
            if (pos < text.size() && text[pos] == '=') {
                ++pos;
                return less ? Constraint::Op::Le : Constraint::Op::Ge;
            }
            return less ? Constraint::Op::Lt : Constraint::Op::Gt;
        }
        fail("expected comparison operator");
    }
    std::string value() {
        skip_ws();
        if (pos >= text.size()) fail("expected value");
        char q = text[pos];
        if (q == '\'' || q == '"') {
            std::size_t end = text.find(q, pos + 1);
            if (end == std::string::npos) fail("unterminated quoted value");
            std::string v = text.substr(pos + 1, end - pos - 1);
            pos = end + 1;
            return v;
        }
        std::size_t start = pos;
        while (pos < text.size() && !std::isspace((unsigned char)text[pos])) ++pos;
        std::string v = text.substr(start, pos - start);
        if (v.empty()) fail("expected value");
        if (v.size() > 1 && v[0] == '$' && parse_number(v.substr(1))) v = v.substr(1);
        return v;
    }
};

} // namespace

Query parse_query(const std::string& text) {
    Cursor cur{text};
    if (!cur.keyword("select")) cur.fail("expected SELECT");
    Query q;
    cur.skip_ws();
    if (cur.pos < text.size() && text[cur.pos] == '*') {
        ++cur.pos;
        q.wildcard = true;
    } else {
        q.projected.push_back(cur.identifier());
        while (true) {
            cur.skip_ws();
            if (cur.pos < text.size() && text[cur.pos] == ',') {
                ++cur.pos;
                q.projected.push_back(cur.identifier());
            } else {
                break;
            }
        }
    }
    if (cur.done()) return q;
    if (!cur.keyword("where")) cur.fail("expected WHERE or end of query");
    while (true) {
        Constraint c;
        c.attribute = cur.identifier();
        c.op = cur.op();
        c.value = cur.value();
        q.constraints.push_back(c);
        if (cur.done()) return q;
        if (!cur.keyword("and")) cur.fail("expected AND or end of query");
    }
}

std::string query_to_string(const Query& q) {
    std::string out = "SELECT ";
    if (q.wildcard) {
        out += "*";
    } else {
        for (std::size_t i = 0; i < q.projected.size(); ++i) {
            if (i) out += ", ";
            out += q.projected[i];
        }
    }
    for (std::size_t i = 0; i < q.constraints.size(); ++i) {
        out += i ? " AND " : " WHERE ";
        const auto& c = q.constraints[i];
        out += c.attribute;
        out += " ";
        out += op_symbol(c.op);
        out += " ";
        out += c.value;
    }
    return out;
}

} // namespace smartint
