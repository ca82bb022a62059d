#ifndef SMARTINT_TABLE_HPP
#define SMARTINT_TABLE_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace smartint {

struct IngestError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TypeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A cell is missing when it is empty after trimming.
bool is_missing(std::string_view cell);

// Trim + lowercase; the normal form used for all equality comparisons.
std::string normalize_value(std::string_view v);

std::optional<double> parse_number(std::string_view v);

// Matching key independent of any table: numerals are canonicalized so that
// "014" and "14" compare equal, everything else is normalized text.
std::string value_key(std::string_view v);

struct Constraint {
    enum class Op { Eq, Lt, Gt, Le, Ge };
    std::string attribute;
    Op op = Op::Eq;
    std::string value;
};

const char* op_symbol(Constraint::Op op);

struct Query {
    bool wildcard = false;              // SELECT *
    std::vector<std::string> projected; // empty iff wildcard
    std::vector<Constraint> constraints;
};

struct AttributeRef {
    std::string table;
    std::string attribute;

    bool operator==(const AttributeRef&) const = default;
    bool operator<(const AttributeRef& o) const {
        return table != o.table ? table < o.table : attribute < o.attribute;
    }
};

struct Table {
    std::string name;
    std::vector<std::string> attributes;
    std::vector<std::vector<std::string>> rows;
    std::vector<bool> numeric; // column parses as decimal on every non-missing cell

    std::size_t tuple_count() const { return rows.size(); }

    // Index of an attribute by normalized name, -1 when absent.
    int column(std::string_view attr) const;
    int column_or_throw(std::string_view attr) const;

    // Matching key for a cell: normalized, with numeric columns canonicalized
    // so "014" and "14" count as the same value.
    std::string cell_key(int col, const std::string& cell) const;
};

// One table per CSV file in the directory (RFC 4180, first row header).
std::vector<Table> load_tables(const std::string& directory);
Table load_csv(const std::string& path);
void save_csv(const Table& table, const std::string& path);

// Equality is a normalized string match; ordering operators require a numeric
// column. Missing never satisfies anything.
bool evaluate_constraint(const Table& table, const std::vector<std::string>& row,
                         const Constraint& c);
bool evaluate_constraint_cell(const Table& table, int col, const std::string& cell,
                              const Constraint& c);

Constraint::Op parse_op(std::string_view s);

} // namespace smartint

#endif
