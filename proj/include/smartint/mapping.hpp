#ifndef SMARTINT_MAPPING_HPP
#define SMARTINT_MAPPING_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

#include "smartint/table.hpp"

namespace smartint {

struct ResolutionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AttributeMapping {
    std::vector<std::pair<AttributeRef, AttributeRef>> pairs;
    // fk -> pk; the arrow points towards the table holding the primary key.
    std::vector<std::pair<AttributeRef, AttributeRef>> pk_fk_edges;
};

// Two sections: "matches:" with "table.attr = table.attr" lines and "pkfk:"
// with "table.attr -> table.attr" lines. '#' starts a comment.
AttributeMapping parse_mapping_file(const std::string& path);

struct TableGraph {
    struct Edge {
        std::string a, b; // a < b
        std::vector<std::pair<std::string, std::string>> attr_pairs; // (attr in a, attr in b)
    };

    std::vector<std::string> nodes;
    std::vector<Edge> undirected;
    std::vector<std::pair<AttributeRef, AttributeRef>> directed; // fk -> pk

    // Equivalence classes over (table, attribute) induced by the transitive
    // closure of the match pairs. Attributes not mentioned in any mapping form
    // singleton classes keyed by their normalized name.
    std::map<AttributeRef, int> class_of;              // normalized refs
    std::vector<std::set<std::string>> class_names;    // normalized attr names per class
    std::vector<std::vector<AttributeRef>> class_members;

    bool has_node(const std::string& t) const;
    const Edge* edge_between(const std::string& a, const std::string& b) const;
    std::vector<std::string> neighbors(const std::string& t) const;

    // Class id of a column, or -1 for a column outside every class (never
    // happens for columns of graph tables; they get singleton classes).
    int attr_class(const std::string& table, const std::string& attr) const;

    // Does query attribute `name` refer to column `attr` of `table`?
    bool attr_matches(const std::string& name, const std::string& table,
                      const std::string& attr) const;

    // Attributes of `table` that participate in a mapping with another table.
    std::vector<std::string> shared_attributes(const std::string& table) const;

    bool pk_declared(const std::string& table, const std::string& attr) const;
};

TableGraph build_graph(const std::vector<Table>& tables, const AttributeMapping& mapping);

const Table& find_table(const std::vector<Table>& tables, const std::string& name);

} // namespace smartint

#endif
