#ifndef SMARTINT_MINER_HPP
#define SMARTINT_MINER_HPP

#include <optional>
#include <string>
#include <vector>

#include "smartint/table.hpp"

namespace smartint {

// Value-level rule X=alpha -> A=beta. Values are stored as the first raw
// spelling seen for the matching key; counts keep the fractions exact.
struct AssociationRule {
    std::string table;
    std::vector<std::string> body_attrs; // sorted by column order
    std::vector<std::string> body_values;
    std::string head_attr;
    std::string head_value;
    long long body_count = 0;
    long long joint_count = 0;
    long long total = 0; // N

    double support() const { return total ? double(joint_count) / double(total) : 0.0; }
    double confidence() const { return body_count ? double(joint_count) / double(body_count) : 0.0; }
};

struct Afd {
    std::string table;
    std::vector<std::string> determining; // sorted by column order
    std::string determined;
    double confidence = 0.0;
    double specificity = 0.0;
};

struct MinerConfig {
    double min_conf = 0.3;
    double max_specificity = 0.8;
    std::size_t max_det_set_size = 3;
    std::optional<std::vector<std::string>> shared_attrs_only;
    // false mines AFDs only; rule materialization dominates memory on wide
    // unpruned lattices and is not needed for throughput measurements
    bool keep_rules = true;
};

struct MiningResult {
    std::vector<Afd> afds;
    std::vector<AssociationRule> rules;
};

// count(values on attrs) / N. Rows with a missing cell in attrs never match.
double support(const Table& table, const std::vector<std::string>& attrs,
               const std::vector<std::string>& values);

// Sum over distinct X-values of the support of the best head value.
double afd_confidence(const Table& table, const std::vector<std::string>& det_set,
                      const std::string& determined);

// Entropy of the X-value distribution normalized by log2(N); 0 for a constant
// column, 1 for a key. Degenerate N <= 1 is defined as 0.
double specificity(const Table& table, const std::vector<std::string>& attrs);

// Apriori candidate generation: sets of size l+1 whose l-subsets all appear.
std::vector<std::vector<int>> generate_next_level(const std::vector<std::vector<int>>& level);

// Drops attribute sets with specificity above the threshold.
std::vector<std::vector<std::string>> prune_level(const std::vector<std::vector<std::string>>& level,
                                                  const Table& table, double max_specificity);

// Level-wise miner; candidate sets within a level are evaluated in parallel.
MiningResult mine_afds(const Table& table, const MinerConfig& config);

// Serial reference implementation, identical output.
MiningResult mine_afds_serial(const Table& table, const MinerConfig& config);

bool rule_less(const AssociationRule& a, const AssociationRule& b);
bool afd_less(const Afd& a, const Afd& b);

} // namespace smartint

#endif
