#include "smartint/table.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace fs = std::filesystem;

namespace smartint {

static std::string_view trim(std::string_view v) {
    while (!v.empty() && std::isspace(static_cast<unsigned char>(v.front()))) v.remove_prefix(1);
    while (!v.empty() && std::isspace(static_cast<unsigned char>(v.back()))) v.remove_suffix(1);
    return v;
}

bool is_missing(std::string_view cell) { return trim(cell).empty(); }

std::string normalize_value(std::string_view v) {
    std::string out(trim(v));
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::optional<double> parse_number(std::string_view v) {
    v = trim(v);
    if (v.empty()) return std::nullopt;
    std::string s(v);
    const char* p = s.c_str();
    char* end = nullptr;
    double d = std::strtod(p, &end);
    if (end != p + s.size()) return std::nullopt;
    return d;
}

std::string value_key(std::string_view v) {
    if (auto d = parse_number(v)) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", *d);
        return buf;
    }
    return normalize_value(v);
}

const char* op_symbol(Constraint::Op op) {
    switch (op) {
        case Constraint::Op::Eq: return "=";
        case Constraint::Op::Lt: return "<";
        case Constraint::Op::Gt: return ">";
        case Constraint::Op::Le: return "<=";
        case Constraint::Op::Ge: return ">=";
    }
    return "?";
}

Constraint::Op parse_op(std::string_view s) {
    if (s == "=") return Constraint::Op::Eq;
    if (s == "<") return Constraint::Op::Lt;
    if (s == ">") return Constraint::Op::Gt;
    if (s == "<=" || s == "≤") return Constraint::Op::Le;
    if (s == ">=" || s == "≥") return Constraint::Op::Ge;
    throw SchemaError("unknown comparison operator: " + std::string(s));
}

int Table::column(std::string_view attr) const {
    std::string key = normalize_value(attr);
    for (std::size_t i = 0; i < attributes.size(); ++i)
        if (normalize_value(attributes[i]) == key) return static_cast<int>(i);
    return -1;
}

int Table::column_or_throw(std::string_view attr) const {
    int c = column(attr);
    if (c < 0)
        throw SchemaError("table '" + name + "' has no attribute '" + std::string(attr) + "'");
    return c;
}

std::string Table::cell_key(int, const std::string& cell) const { return value_key(cell); }

// --- CSV -------------------------------------------------------------------

namespace {

// Parses one RFC 4180 record starting at `pos`; returns false at end of input.
bool parse_record(const std::string& text, std::size_t& pos, std::vector<std::string>& out,
                  std::size_t& line_no, const std::string& file) {
    out.clear();
    if (pos >= text.size()) return false;
    std::string field;
    bool in_quotes = false;
    bool any = false;
    while (pos < text.size()) {
        char c = text[pos];
        if (in_quotes) {
            if (c == '"') {
                if (pos + 1 < text.size() && text[pos + 1] == '"') {
                    field += '"';
                    pos += 2;
                } else {
                    in_quotes = false;
                    ++pos;
                }
            } else {
                if (c == '\n') ++line_no;
                field += c;
                ++pos;
            }
            continue;
        }
        switch (c) {
            case '"':
                if (!field.empty())
                    throw IngestError(file + ":" + std::to_string(line_no) +
                                      ": quote inside unquoted field");
                in_quotes = true;
                any = true;
                ++pos;
                break;
            case ',':
                out.push_back(std::move(field));
                field.clear();
                any = true;
                ++pos;
                break;
            case '\r':
                ++pos;
                break;
            case '\n':
                ++pos;
                ++line_no;
                out.push_back(std::move(field));
                return true;
            default:
                field += c;
                any = true;
                ++pos;
        }
    }
    if (in_quotes)
        throw IngestError(file + ":" + std::to_string(line_no) + ": unterminated quoted field");
    if (!any && out.empty()) return false;
    out.push_back(std::move(field));
    return true;
}

void detect_numeric(Table& t) {
    t.numeric.assign(t.attributes.size(), true);
    for (std::size_t c = 0; c < t.attributes.size(); ++c) {
        bool saw_value = false;
        for (const auto& row : t.rows) {
            if (is_missing(row[c])) continue;
            saw_value = true;
            if (!parse_number(row[c])) {
                t.numeric[c] = false;
                break;
            }
        }
        if (!saw_value) t.numeric[c] = false;
    }
}

} // namespace

Table load_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();

    Table t;
    t.name = fs::path(path).stem().string();

    std::size_t pos = 0, line_no = 1;
    std::vector<std::string> rec;
    if (!parse_record(text, pos, rec, line_no, path))
        throw IngestError(path + ": empty file, expected a header row");
    std::set<std::string> seen;
    for (auto& a : rec) {
        std::string key = normalize_value(a);
        if (!seen.insert(key).second)
            throw SchemaError(path + ": duplicate attribute '" + a + "' in header");
        t.attributes.push_back(std::string(trim(a)));
    }

    std::size_t row_line = line_no;
    while (parse_record(text, pos, rec, line_no, path)) {
        if (rec.size() != t.attributes.size())
            throw IngestError(path + ":" + std::to_string(row_line) + ": row has " +
                              std::to_string(rec.size()) + " cells, header has " +
                              std::to_string(t.attributes.size()));
        t.rows.push_back(rec);
        row_line = line_no;
    }
    detect_numeric(t);
    return t;
}

std::vector<Table> load_tables(const std::string& directory) {
    std::vector<std::string> files;
    for (const auto& e : fs::directory_iterator(directory))
        if (e.is_regular_file() && e.path().extension() == ".csv")
            files.push_back(e.path().string());
    std::sort(files.begin(), files.end());
    std::vector<Table> tables;
    for (const auto& f : files) tables.push_back(load_csv(f));
    return tables;
}

static void write_field(std::ostream& os, const std::string& f) {
    if (f.find_first_of(",\"\n\r") == std::string::npos) {
        os << f;
        return;
    }
    os << '"';
    for (char c : f) {
        if (c == '"') os << '"';
        os << c;
    }
    os << '"';
}

void save_csv(const Table& table, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IngestError("cannot write " + path);
    for (std::size_t i = 0; i < table.attributes.size(); ++i) {
        if (i) os << ',';
        write_field(os, table.attributes[i]);
    }
    os << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ',';
            write_field(os, row[i]);
        }
        os << '\n';
    }
}

bool evaluate_constraint_cell(const Table& table, int col, const std::string& cell,
                              const Constraint& c) {
    if (is_missing(cell)) return false;
    if (c.op == Constraint::Op::Eq) return normalize_value(cell) == normalize_value(c.value);
    if (!table.numeric[col])
        throw TypeError("ordering operator '" + std::string(op_symbol(c.op)) +
                        "' on non-numeric column '" + table.attributes[col] + "' of table '" +
                        table.name + "'");
    auto lhs = parse_number(cell);
    auto rhs = parse_number(c.value);
    if (!lhs || !rhs) return false;
    switch (c.op) {
        case Constraint::Op::Lt: return *lhs < *rhs;
        case Constraint::Op::Gt: return *lhs > *rhs;
        case Constraint::Op::Le: return *lhs <= *rhs;
        case Constraint::Op::Ge: return *lhs >= *rhs;
        default: return false;
    }
}

bool evaluate_constraint(const Table& table, const std::vector<std::string>& row,
                         const Constraint& c) {
    int col = table.column_or_throw(c.attribute);
    return evaluate_constraint_cell(table, col, row[col], c);
}

} // namespace smartint
