#ifndef SMARTINT_SELECTION_HPP
#define SMARTINT_SELECTION_HPP

#include "smartint/stats.hpp"

namespace smartint {

struct SelectionError : std::runtime_error {
    std::vector<std::pair<std::string, double>> table_scores;
    explicit SelectionError(const std::string& msg,
                            std::vector<std::pair<std::string, double>> scores = {})
        : std::runtime_error(msg), table_scores(std::move(scores)) {}
};

struct SelectionConfig {
    double tau = 0.0;     // relevance threshold
    std::size_t k = 5;    // max tree size
    double epsilon = 1e-6; // conformance fallback for unreachable constraints
};

struct TableTree {
    struct Child; // completed right below; vector supports the incomplete type
    std::string root;
    std::vector<Child> children;
    double relevance = 0.0;

    std::vector<std::string> all_tables() const;
    std::size_t size() const;
};

struct TableTree::Child {
    // (attr in parent, attr in child) pairs the edge is anchored on
    std::vector<std::pair<std::string, std::string>> anchors;
    TableTree subtree;
};

// Probability that a random tuple of `table` satisfies every constraint:
// native constraints from priors, one-hop constraints through a neighbor's
// conditionals, epsilon otherwise.
double conformance_probability(const SourceStats& stats, const TableGraph& graph,
                               const Table& table, const std::vector<Constraint>& constraints,
                               double epsilon);

// Probability that a random tuple of `table` satisfies one constraint.
double constraint_probability(const SourceStats& stats, const TableGraph& graph,
                              const Table& table, const Constraint& c, double epsilon);

double table_relevance(const SourceStats& stats, const TableGraph& graph, const Table& table,
                       const std::vector<Table>& tables, const Query& query, double epsilon);

double tree_relevance(const SourceStats& stats, const TableGraph& graph, const TableTree& tree,
                      const std::vector<Table>& tables, const Query& query, double epsilon);

// Query attribute names after wildcard expansion: one representative per
// attribute class, in deterministic order.
std::vector<std::string> effective_projection(const TableGraph& graph,
                                              const std::vector<Table>& tables,
                                              const Query& query);

struct SelectionExplain {
    std::vector<std::pair<std::string, double>> table_scores;
    std::vector<std::pair<std::string, double>> tree_scores; // table-set key -> relevance
    bool exhaustive = true;
};

// Candidate tables above tau, then the maximal-relevance tree of size <= k:
// exhaustive enumeration for up to 8 candidates, greedy growth beyond.
TableTree select_tree(const SourceStats& stats, const TableGraph& graph,
                      const std::vector<Table>& tables, const Query& query,
                      const SelectionConfig& config, SelectionExplain* explain = nullptr);

} // namespace smartint

#endif
