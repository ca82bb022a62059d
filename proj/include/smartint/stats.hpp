#ifndef SMARTINT_STATS_HPP
#define SMARTINT_STATS_HPP

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "smartint/mapping.hpp"
#include "smartint/miner.hpp"

namespace smartint {

struct LookupError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct StatsFormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TableStats {
    std::string table;
    long long tuple_count = 0;
    std::vector<Afd> afds;              // canonical order
    std::vector<AssociationRule> rules; // canonical order
    // (attribute, raw value, count), canonical order
    std::vector<std::tuple<std::string, std::string, long long>> priors;
    std::vector<std::string> key_attrs; // columns that are keys (or PK-declared)
    std::vector<std::string> shared_attrs;

    bool is_key(const std::string& attr) const;

    // Lookup acceleration; optional (lookups fall back to linear scans).
    void rebuild_index();
    bool indexed = false;
    std::unordered_map<std::string, std::vector<int>> rule_index;
    std::unordered_map<std::string, long long> prior_index;
};

struct SourceStats {
    static constexpr int kFormatVersion = 1;
    std::map<std::string, TableStats> per_table;

    const TableStats& at(const std::string& table) const;
    bool has(const std::string& table) const { return per_table.count(normalize_value(table)) > 0; }
};

// Mines every table and assembles the query-time statistics. Rules are kept
// when their body lies inside the table's shared attributes or when they back
// a retained AFD; everything else is dropped to bound the store.
SourceStats build_stats(const std::vector<Table>& tables, const TableGraph& graph,
                        const MinerConfig& config);

double prior(const SourceStats& stats, const std::string& table, const std::string& attr,
             const std::string& value);

// Confidence of the stored rule given -> target; 0 when no rule exists.
double conditional(const SourceStats& stats, const std::string& table,
                   const std::pair<std::string, std::string>& target,
                   const std::pair<std::string, std::string>& given);

// All stored rules for a body assignment and head attribute, best first
// (confidence desc, then head value asc). Values are matched by key.
std::vector<const AssociationRule*> rules_for(const SourceStats& stats, const std::string& table,
                                              const std::vector<std::string>& body_attrs,
                                              const std::vector<std::string>& body_values,
                                              const std::string& head_attr);

const Afd* best_afd(const SourceStats& stats, const std::string& table,
                    const std::vector<std::string>& det_subset_of, std::size_t det_size,
                    const std::string& determined);

void save_stats(const SourceStats& stats, const std::string& path);
SourceStats load_stats(const std::string& path);

} // namespace smartint

#endif
