#ifndef SMARTINT_CHAINING_HPP
#define SMARTINT_CHAINING_HPP

#include <optional>

#include "smartint/stats.hpp"

namespace smartint {

struct CompositionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ChainLink {
    Afd afd;                                    // confidence 1 links carry a synthetic Afd
    std::pair<AttributeRef, AttributeRef> anchor; // mapped pair used to enter the next table
};

struct AfdChain {
    std::vector<ChainLink> links;
    double cumulative_confidence = 1.0;
    std::vector<std::string> tables; // visited table sequence
};

// Joins two AFDs whose tables are bridged by a mapped attribute pair; the
// resulting confidence is the product of the two confidences.
AfdChain compose(const Afd& first, const Afd& second, const AttributeMapping& mapping);

// Highest cumulative-confidence chain of AFD links over simple table paths of
// at most max_hops edges. Ties break on the lexicographically smallest table
// sequence. nullopt when the endpoints are not linked.
std::optional<AfdChain> best_chain(const SourceStats& stats, const TableGraph& graph,
                                   const AttributeRef& from, const AttributeRef& to,
                                   std::size_t max_hops);

struct TableTree; // selection.hpp

// Accuracy with which `attribute` (a query-level name) can be predicted from
// the tree's base table: 1 in the base, AFD confidence one hop out, chained
// products beyond, 0 when unreachable.
double pred_accuracy(const SourceStats& stats, const TableGraph& graph, const TableTree& tree,
                     const std::string& attribute);

// Confidence of the in-table link from a known attribute to another attribute:
// 1 when they coincide or the known attribute is a key, otherwise the best
// single-attribute AFD; nullopt when no link exists.
std::optional<double> link_confidence(const SourceStats& stats, const TableGraph& graph,
                                      const std::string& table, const std::string& known_attr,
                                      const std::string& target_attr);

} // namespace smartint

#endif
