#ifndef SMARTINT_EXPANSION_HPP
#define SMARTINT_EXPANSION_HPP

#include "smartint/selection.hpp"

namespace smartint {

// Hierarchical result schema: base-table attributes at level 0, attributes
// from other tables hanging under the anchor that predicts them.
struct AttrNode {
    std::string table;     // provenance table
    std::string attribute; // column in the provenance table
    std::string display;   // representative query-level name
    // (attr in parent table, attr in this table) pairs usable as determining
    // evidence; empty for base attributes
    std::vector<std::pair<std::string, std::string>> anchors;
    bool via_key = false; // anchor is a key in the provenance table
    std::vector<AttrNode> children;
};

struct AttributeTree {
    std::string base_table;
    std::vector<AttrNode> roots; // base attributes in column order

    std::size_t attribute_count() const;
};

struct ExpandedValue {
    std::string display; // query-level attribute name
    std::string value;
    double confidence = 1.0;
    std::string table; // provenance
    bool predicted = false;
};

struct ExpandedTuple {
    std::vector<ExpandedValue> values; // attribute-tree preorder
    double tuple_confidence = 1.0;     // product over predicted values
    double base_probability = 1.0;     // conformance of the seed row

    const ExpandedValue* find(const TableGraph& graph, const std::string& name) const;
};

struct ExpansionConfig {
    double theta = 0.5;          // base-set conformance cutoff
    double delta = 0.1;          // "significantly higher" margin for larger det sets
    std::optional<std::size_t> width; // max predicted attributes per tuple
};

AttributeTree build_attribute_tree(const SourceStats& stats, const TableGraph& graph,
                                   const std::vector<Table>& tables, const TableTree& tree);

// Conformance probability per base row: native constraints evaluate to 0/1,
// remote ones through sum-product chains of stored conditionals; constraints
// outside the tree contribute epsilon with a warning on stderr.
std::vector<double> translate_constraints(const SourceStats& stats, const TableGraph& graph,
                                          const std::vector<Table>& tables, const TableTree& tree,
                                          const std::vector<Constraint>& constraints,
                                          double epsilon);

// Row indices with probability >= theta, most probable first, source order on
// ties.
std::vector<std::pair<int, double>> base_tuple_set(const std::vector<double>& row_probs,
                                                   double theta);

ExpandedTuple expand_tuple(const SourceStats& stats, const TableGraph& graph,
                           const std::vector<Table>& tables, const TableTree& tree,
                           const AttributeTree& attr_tree, int base_row,
                           const ExpansionConfig& config);

std::vector<ExpandedTuple> answer_query(const std::vector<Table>& tables, const SourceStats& stats,
                                        const TableGraph& graph, const Query& query,
                                        const SelectionConfig& sel_config,
                                        const ExpansionConfig& exp_config,
                                        SelectionExplain* explain = nullptr,
                                        TableTree* tree_out = nullptr);

} // namespace smartint

#endif
