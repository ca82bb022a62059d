#include "smartint/miner.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace smartint {

bool rule_less(const AssociationRule& a, const AssociationRule& b) {
    if (a.table != b.table) return a.table < b.table;
    if (a.body_attrs != b.body_attrs) return a.body_attrs < b.body_attrs;
    if (a.body_values != b.body_values) return a.body_values < b.body_values;
    if (a.head_attr != b.head_attr) return a.head_attr < b.head_attr;
    return a.head_value < b.head_value;
}

bool afd_less(const Afd& a, const Afd& b) {
    if (a.table != b.table) return a.table < b.table;
    if (a.determining != b.determining) return a.determining < b.determining;
    return a.determined < b.determined;
}

namespace {

// Dictionary-encoded column: codes assigned in first-occurrence order, with
// the first raw spelling kept as the representative for output.
struct EncodedColumn {
    std::vector<int> codes; // -1 = missing
    std::vector<std::string> reps;
};

struct EncodedTable {
    const Table* table = nullptr;
    std::vector<EncodedColumn> cols;
    std::size_t n = 0;
};

EncodedTable encode(const Table& t) {
    EncodedTable e;
    e.table = &t;
    e.n = t.tuple_count();
    e.cols.resize(t.attributes.size());
    for (std::size_t c = 0; c < t.attributes.size(); ++c) {
        auto& col = e.cols[c];
        col.codes.resize(e.n);
        std::unordered_map<std::string, int> dict;
        for (std::size_t r = 0; r < e.n; ++r) {
            const std::string& cell = t.rows[r][c];
            if (is_missing(cell)) {
                col.codes[r] = -1;
                continue;
            }
            std::string key = t.cell_key(static_cast<int>(c), cell);
            auto [it, fresh] = dict.emplace(key, static_cast<int>(col.reps.size()));
            if (fresh) col.reps.push_back(cell);
            col.codes[r] = it->second;
        }
    }
    return e;
}

// Group assignment for a body: gid per row, -1 when any body cell is missing.
struct Grouping {
    std::vector<int> gid;
    std::vector<long long> counts;
    std::vector<std::vector<int>> key_codes; // body value codes per group
};

Grouping group_by(const EncodedTable& e, const std::vector<int>& body) {
    Grouping g;
    g.gid.assign(e.n, -1);
    bool packable = true;
    int bits = 0;
    for (int c : body) {
        int width = 1;
        while ((1u << width) < e.cols[c].reps.size() + 1) ++width;
        bits += width;
    }
    packable = body.size() <= 3 && bits <= 62;

    auto add_group = [&](const std::vector<int>& key) {
        g.counts.push_back(0);
        g.key_codes.push_back(key);
        return static_cast<int>(g.counts.size()) - 1;
    };

    std::vector<int> key(body.size());
    if (packable) {
        std::unordered_map<std::uint64_t, int> groups;
        groups.reserve(e.n);
        for (std::size_t r = 0; r < e.n; ++r) {
            std::uint64_t packed = 0;
            bool missing = false;
            for (std::size_t i = 0; i < body.size(); ++i) {
                int code = e.cols[body[i]].codes[r];
                if (code < 0) {
                    missing = true;
                    break;
                }
                key[i] = code;
                packed = packed * (e.cols[body[i]].reps.size() + 1) + std::uint64_t(code) + 1;
            }
            if (missing) continue;
            auto [it, fresh] = groups.emplace(packed, 0);
            if (fresh) it->second = add_group(key);
            g.gid[r] = it->second;
            ++g.counts[it->second];
        }
    } else {
        std::map<std::vector<int>, int> groups;
        for (std::size_t r = 0; r < e.n; ++r) {
            bool missing = false;
            for (std::size_t i = 0; i < body.size(); ++i) {
                int code = e.cols[body[i]].codes[r];
                if (code < 0) {
                    missing = true;
                    break;
                }
                key[i] = code;
            }
            if (missing) continue;
            auto [it, fresh] = groups.emplace(key, 0);
            if (fresh) it->second = add_group(key);
            g.gid[r] = it->second;
            ++g.counts[it->second];
        }
    }
    return g;
}

double specificity_of_counts(const std::vector<long long>& counts, std::size_t n) {
    if (n <= 1) return 0.0;
    double h = 0.0;
    for (long long c : counts) {
        double p = double(c) / double(n);
        h -= p * std::log2(p);
    }
    return h / std::log2(double(n));
}

std::vector<int> resolve_columns(const Table& t, const std::vector<std::string>& attrs) {
    std::vector<int> cols;
    for (const auto& a : attrs) cols.push_back(t.column_or_throw(a));
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
    return cols;
}

// Per-candidate output; evaluated independently, merged deterministically.
struct CandidateOutput {
    std::vector<Afd> afds;
    std::vector<AssociationRule> rules;
};

CandidateOutput evaluate_candidate(const EncodedTable& e, const std::vector<int>& body,
                                   double body_spec, const MinerConfig& cfg) {
    CandidateOutput out;
    const Table& t = *e.table;
    Grouping g = group_by(e, body);

    std::vector<std::string> body_attrs;
    for (int c : body) body_attrs.push_back(t.attributes[c]);

    for (int head = 0; head < static_cast<int>(t.attributes.size()); ++head) {
        if (std::binary_search(body.begin(), body.end(), head)) continue;
        const auto& hcol = e.cols[head];

        std::unordered_map<std::uint64_t, long long> joint;
        joint.reserve(g.counts.size() * 2);
        for (std::size_t r = 0; r < e.n; ++r) {
            int gid = g.gid[r];
            int code = hcol.codes[r];
            if (gid < 0 || code < 0) continue;
            ++joint[(std::uint64_t(gid) << 32) | std::uint64_t(code)];
        }

        std::vector<long long> best(g.counts.size(), 0);
        for (const auto& [key, cnt] : joint) {
            int gid = static_cast<int>(key >> 32);
            best[gid] = std::max(best[gid], cnt);
        }
        long long conf_num = 0;
        for (long long b : best) conf_num += b;
        double conf = e.n ? double(conf_num) / double(e.n) : 0.0;

        if (conf >= cfg.min_conf) {
            Afd afd;
            afd.table = normalize_value(t.name);
            afd.determining = body_attrs;
            afd.determined = t.attributes[head];
            afd.confidence = conf;
            afd.specificity = body_spec;
            out.afds.push_back(std::move(afd));
        }

        if (!cfg.keep_rules) continue;
        for (const auto& [key, cnt] : joint) {
            int gid = static_cast<int>(key >> 32);
            int code = static_cast<int>(key & 0xffffffffu);
            AssociationRule rule;
            rule.table = normalize_value(t.name);
            rule.body_attrs = body_attrs;
            for (std::size_t i = 0; i < body.size(); ++i)
                rule.body_values.push_back(e.cols[body[i]].reps[g.key_codes[gid][i]]);
            rule.head_attr = t.attributes[head];
            rule.head_value = hcol.reps[code];
            rule.body_count = g.counts[gid];
            rule.joint_count = cnt;
            rule.total = static_cast<long long>(e.n);
            out.rules.push_back(std::move(rule));
        }
    }
    return out;
}

MiningResult mine_impl(const Table& table, const MinerConfig& cfg, bool parallel) {
    MiningResult result;
    if (table.tuple_count() == 0) return result;
    EncodedTable enc = encode(table);

    std::vector<int> universe;
    if (cfg.shared_attrs_only) {
        universe = resolve_columns(table, *cfg.shared_attrs_only);
    } else {
        universe.resize(table.attributes.size());
        for (std::size_t i = 0; i < universe.size(); ++i) universe[i] = static_cast<int>(i);
    }

    std::vector<std::vector<int>> level;
    for (int c : universe) level.push_back({c});

    std::size_t ell = 1;
    while (!level.empty() && ell <= cfg.max_det_set_size) {
        std::vector<double> specs(level.size());
        std::vector<CandidateOutput> outputs(level.size());

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
        for (long long i = 0; i < static_cast<long long>(level.size()); ++i) {
            Grouping g = group_by(enc, level[i]);
            specs[i] = specificity_of_counts(g.counts, enc.n);
            if (specs[i] <= cfg.max_specificity)
                outputs[i] = evaluate_candidate(enc, level[i], specs[i], cfg);
        }

        std::vector<std::vector<int>> survivors;
        for (std::size_t i = 0; i < level.size(); ++i) {
            for (auto& a : outputs[i].afds) result.afds.push_back(std::move(a));
            for (auto& r : outputs[i].rules) result.rules.push_back(std::move(r));
            if (specs[i] <= cfg.max_specificity) survivors.push_back(level[i]);
        }
        level = generate_next_level(survivors);
        ++ell;
    }

    std::sort(result.afds.begin(), result.afds.end(), afd_less);
    std::sort(result.rules.begin(), result.rules.end(), rule_less);
    return result;
}

} // namespace

double support(const Table& table, const std::vector<std::string>& attrs,
               const std::vector<std::string>& values) {
    if (attrs.empty()) throw SchemaError("support: empty attribute set");
    if (attrs.size() != values.size()) throw SchemaError("support: attrs/values size mismatch");
    if (table.tuple_count() == 0) return 0.0;
    std::vector<int> cols;
    std::vector<std::string> keys;
    for (std::size_t i = 0; i < attrs.size(); ++i) {
        int c = table.column_or_throw(attrs[i]);
        cols.push_back(c);
        keys.push_back(table.cell_key(c, values[i]));
    }
    long long count = 0;
    for (const auto& row : table.rows) {
        bool match = true;
        for (std::size_t i = 0; i < cols.size(); ++i) {
            const std::string& cell = row[cols[i]];
            if (is_missing(cell) || table.cell_key(cols[i], cell) != keys[i]) {
                match = false;
                break;
            }
        }
        if (match) ++count;
    }
    return double(count) / double(table.tuple_count());
}

double afd_confidence(const Table& table, const std::vector<std::string>& det_set,
                      const std::string& determined) {
    if (det_set.empty()) throw SchemaError("afd_confidence: empty determining set");
    EncodedTable enc = encode(table);
    std::vector<int> body = resolve_columns(table, det_set);
    int head = table.column_or_throw(determined);
    if (std::binary_search(body.begin(), body.end(), head))
        throw SchemaError("afd_confidence: determined attribute inside determining set");
    if (enc.n == 0) return 0.0;

    Grouping g = group_by(enc, body);
    std::unordered_map<std::uint64_t, long long> joint;
    for (std::size_t r = 0; r < enc.n; ++r) {
        int gid = g.gid[r];
        int code = enc.cols[head].codes[r];
        if (gid < 0 || code < 0) continue;
        ++joint[(std::uint64_t(gid) << 32) | std::uint64_t(code)];
    }
    std::vector<long long> best(g.counts.size(), 0);
    for (const auto& [key, cnt] : joint)
        best[key >> 32] = std::max(best[key >> 32], cnt);
    long long num = 0;
    for (long long b : best) num += b;
    return double(num) / double(enc.n);
}

double specificity(const Table& table, const std::vector<std::string>& attrs) {
    if (attrs.empty()) throw SchemaError("specificity: empty attribute set");
    if (table.tuple_count() <= 1) return 0.0;
    EncodedTable enc = encode(table);
    Grouping g = group_by(enc, resolve_columns(table, attrs));
    return specificity_of_counts(g.counts, enc.n);
}

std::vector<std::vector<int>> generate_next_level(const std::vector<std::vector<int>>& level) {
    std::vector<std::vector<int>> sorted = level;
    for (auto& s : sorted) std::sort(s.begin(), s.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    std::vector<std::vector<int>> next;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        for (std::size_t j = i + 1; j < sorted.size(); ++j) {
            const auto& a = sorted[i];
            const auto& b = sorted[j];
            // prefix join: identical except for the last element
            if (!std::equal(a.begin(), a.end() - 1, b.begin(), b.end() - 1)) break;
            std::vector<int> cand = a;
            cand.push_back(b.back());
            bool ok = true;
            for (std::size_t drop = 0; drop + 2 < cand.size() && ok; ++drop) {
                std::vector<int> sub = cand;
                sub.erase(sub.begin() + static_cast<long>(drop));
                ok = std::binary_search(sorted.begin(), sorted.end(), sub);
            }
            if (ok) next.push_back(std::move(cand));
        }
    }
    return next;
}

std::vector<std::vector<std::string>> prune_level(const std::vector<std::vector<std::string>>& level,
                                                  const Table& table, double max_specificity) {
    std::vector<std::vector<std::string>> out;
    for (const auto& attrs : level)
        if (specificity(table, attrs) <= max_specificity) out.push_back(attrs);
    return out;
}

MiningResult mine_afds(const Table& table, const MinerConfig& config) {
    return mine_impl(table, config, true);
}

MiningResult mine_afds_serial(const Table& table, const MinerConfig& config) {
    return mine_impl(table, config, false);
}

} // namespace smartint
