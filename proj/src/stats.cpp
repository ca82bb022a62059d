#include "smartint/stats.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

namespace smartint {

namespace {

std::string esc(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '%': out += "%25"; break;
            case '\t': out += "%09"; break;
            case '\n': out += "%0A"; break;
            case '\r': out += "%0D"; break;
            case ',': out += "%2C"; break;
            default: out += c;
        }
    }
    return out;
}

std::string unesc(const std::string& s, const std::string& where) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '%') {
            out += s[i];
            continue;
        }
        if (i + 2 >= s.size()) throw StatsFormatError(where + ": truncated escape");
        out += static_cast<char>(std::stoi(s.substr(i + 1, 2), nullptr, 16));
        i += 2;
    }
    return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::string join_keys(const std::vector<std::string>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += '\x1f';
        out += value_key(values[i]);
    }
    return out;
}

std::string rule_index_key(const std::vector<std::string>& body_attrs,
                           const std::vector<std::string>& body_values,
                           const std::string& head_attr) {
    std::string out;
    for (const auto& a : body_attrs) {
        out += normalize_value(a);
        out += '\x1f';
    }
    out += join_keys(body_values);
    out += '\x1e';
    out += normalize_value(head_attr);
    return out;
}

bool rule_better(const AssociationRule& ra, const AssociationRule& rb) {
    if (ra.confidence() != rb.confidence()) return ra.confidence() > rb.confidence();
    return value_key(ra.head_value) < value_key(rb.head_value);
}

} // namespace

void TableStats::rebuild_index() {
    rule_index.clear();
    prior_index.clear();
    for (int i = 0; i < static_cast<int>(rules.size()); ++i) {
        const auto& r = rules[i];
        rule_index[rule_index_key(r.body_attrs, r.body_values, r.head_attr)].push_back(i);
    }
    for (auto& [key, ids] : rule_index)
        std::sort(ids.begin(), ids.end(),
                  [&](int a, int b) { return rule_better(rules[a], rules[b]); });
    for (const auto& [attr, value, count] : priors)
        prior_index[normalize_value(attr) + '\x1f' + value_key(value)] = count;
    indexed = true;
}

bool TableStats::is_key(const std::string& attr) const {
    std::string key = normalize_value(attr);
    for (const auto& a : key_attrs)
        if (a == key) return true;
    return false;
}

const TableStats& SourceStats::at(const std::string& table) const {
    auto it = per_table.find(normalize_value(table));
    if (it == per_table.end()) throw LookupError("no statistics for table '" + table + "'");
    return it->second;
}

SourceStats build_stats(const std::vector<Table>& tables, const TableGraph& graph,
                        const MinerConfig& config) {
    SourceStats stats;
    for (const auto& t : tables) {
        TableStats ts;
        ts.table = normalize_value(t.name);
        ts.tuple_count = static_cast<long long>(t.tuple_count());
        ts.shared_attrs = graph.shared_attributes(t.name);

        MiningResult mined = mine_afds(t, config);
        ts.afds = std::move(mined.afds);

        std::set<std::string> shared(ts.shared_attrs.begin(), ts.shared_attrs.end());
        std::set<std::pair<std::vector<std::string>, std::string>> afd_pairs;
        for (const auto& a : ts.afds) afd_pairs.insert({a.determining, a.determined});
        for (auto& r : mined.rules) {
            bool shared_body = true;
            for (const auto& a : r.body_attrs)
                if (!shared.count(normalize_value(a))) {
                    shared_body = false;
                    break;
                }
            if (shared_body || afd_pairs.count({r.body_attrs, r.head_attr}))
                ts.rules.push_back(std::move(r));
        }
        std::sort(ts.rules.begin(), ts.rules.end(), rule_less);

        // Priors per column; representative raw value = first occurrence.
        for (std::size_t c = 0; c < t.attributes.size(); ++c) {
            std::unordered_map<std::string, std::size_t> seen;
            std::vector<std::pair<std::string, long long>> vals;
            for (const auto& row : t.rows) {
                const auto& cell = row[c];
                if (is_missing(cell)) continue;
                auto [it, fresh] = seen.emplace(value_key(cell), vals.size());
                if (fresh)
                    vals.emplace_back(cell, 1);
                else
                    ++vals[it->second].second;
            }
            for (auto& [raw, count] : vals)
                ts.priors.emplace_back(t.attributes[c], raw, count);
        }
        std::sort(ts.priors.begin(), ts.priors.end());

        // Keys: no missing values and all rows distinct, or declared via pkfk.
        for (std::size_t c = 0; c < t.attributes.size(); ++c) {
            bool declared = graph.pk_declared(t.name, t.attributes[c]);
            bool distinct = t.tuple_count() > 0;
            std::set<std::string> values;
            for (const auto& row : t.rows) {
                if (is_missing(row[c]) || !values.insert(value_key(row[c])).second) {
                    distinct = false;
                    break;
                }
            }
            if (declared || distinct) ts.key_attrs.push_back(normalize_value(t.attributes[c]));
        }

        ts.rebuild_index();
        stats.per_table.emplace(ts.table, std::move(ts));
    }
    return stats;
}

double prior(const SourceStats& stats, const std::string& table, const std::string& attr,
             const std::string& value) {
    const TableStats& ts = stats.at(table);
    if (ts.tuple_count == 0) return 0.0;
    if (ts.indexed) {
        auto it = ts.prior_index.find(normalize_value(attr) + '\x1f' + value_key(value));
        if (it == ts.prior_index.end()) return 0.0;
        return double(it->second) / double(ts.tuple_count);
    }
    std::string akey = normalize_value(attr), vkey = value_key(value);
    for (const auto& [a, v, count] : ts.priors)
        if (normalize_value(a) == akey && value_key(v) == vkey)
            return double(count) / double(ts.tuple_count);
    return 0.0;
}

std::vector<const AssociationRule*> rules_for(const SourceStats& stats, const std::string& table,
                                              const std::vector<std::string>& body_attrs,
                                              const std::vector<std::string>& body_values,
                                              const std::string& head_attr) {
    const TableStats& ts = stats.at(table);
    std::vector<const AssociationRule*> out;
    std::string key = rule_index_key(body_attrs, body_values, head_attr);
    if (ts.indexed) {
        auto it = ts.rule_index.find(key);
        if (it == ts.rule_index.end()) return out;
        for (int i : it->second) out.push_back(&ts.rules[i]);
        return out;
    }
    for (const auto& r : ts.rules)
        if (rule_index_key(r.body_attrs, r.body_values, r.head_attr) == key) out.push_back(&r);
    std::sort(out.begin(), out.end(),
              [](const AssociationRule* a, const AssociationRule* b) { return rule_better(*a, *b); });
    return out;
}

double conditional(const SourceStats& stats, const std::string& table,
                   const std::pair<std::string, std::string>& target,
                   const std::pair<std::string, std::string>& given) {
    for (const auto* r : rules_for(stats, table, {given.first}, {given.second}, target.first))
        if (value_key(r->head_value) == value_key(target.second)) return r->confidence();
    return 0.0;
}

const Afd* best_afd(const SourceStats& stats, const std::string& table,
                    const std::vector<std::string>& det_subset_of, std::size_t det_size,
                    const std::string& determined) {
    const TableStats& ts = stats.at(table);
    std::set<std::string> allowed;
    for (const auto& a : det_subset_of) allowed.insert(normalize_value(a));
    std::string head = normalize_value(determined);
    const Afd* best = nullptr;
    for (const auto& afd : ts.afds) {
        if (normalize_value(afd.determined) != head) continue;
        if (afd.determining.size() != det_size) continue;
        bool inside = true;
        for (const auto& d : afd.determining)
            if (!allowed.count(normalize_value(d))) {
                inside = false;
                break;
            }
        if (!inside) continue;
        if (!best || afd.confidence > best->confidence) best = &afd;
    }
    return best;
}

// --- serialization ---------------------------------------------------------

void save_stats(const SourceStats& stats, const std::string& path) {
    std::ostringstream os;
    os << "smartint-stats " << SourceStats::kFormatVersion << "\n";
    for (const auto& [name, ts] : stats.per_table) {
        os << "T\t" << esc(name) << "\t" << ts.tuple_count << "\n";
        for (const auto& a : ts.shared_attrs) os << "S\t" << esc(a) << "\n";
        for (const auto& a : ts.key_attrs) os << "K\t" << esc(a) << "\n";
        for (const auto& [attr, value, count] : ts.priors)
            os << "P\t" << esc(attr) << "\t" << esc(value) << "\t" << count << "\n";
        for (const auto& a : ts.afds) {
            os << "A\t";
            for (std::size_t i = 0; i < a.determining.size(); ++i)
                os << (i ? "," : "") << esc(a.determining[i]);
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g\t%.17g", a.confidence, a.specificity);
            os << "\t" << esc(a.determined) << "\t" << buf << "\n";
        }
        for (const auto& r : ts.rules) {
            os << "R\t";
            for (std::size_t i = 0; i < r.body_attrs.size(); ++i)
                os << (i ? "," : "") << esc(r.body_attrs[i]);
            os << "\t";
            for (std::size_t i = 0; i < r.body_values.size(); ++i)
                os << (i ? "," : "") << esc(r.body_values[i]);
            os << "\t" << esc(r.head_attr) << "\t" << esc(r.head_value) << "\t" << r.body_count
               << "\t" << r.joint_count << "\n";
        }
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IngestError("cannot write stats file " + path);
    f << os.str();
}

SourceStats load_stats(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError("cannot open stats file " + path);
    SourceStats stats;
    std::string line;
    int line_no = 0;
    auto where = [&] { return path + ":" + std::to_string(line_no); };

    if (!std::getline(in, line)) throw StatsFormatError(path + ": empty stats file");
    ++line_no;
    {
        std::istringstream hs(line);
        std::string magic;
        int version = -1;
        hs >> magic >> version;
        if (magic != "smartint-stats") throw StatsFormatError(where() + ": not a stats file");
        if (version != SourceStats::kFormatVersion)
            throw StatsFormatError(where() + ": incompatible stats format version " +
                                   std::to_string(version) + ", expected " +
                                   std::to_string(SourceStats::kFormatVersion));
    }

    TableStats* cur = nullptr;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = split(line, '\t');
        const std::string& tag = fields[0];
        auto need = [&](std::size_t n) {
            if (fields.size() != n)
                throw StatsFormatError(where() + ": expected " + std::to_string(n) +
                                       " fields, got " + std::to_string(fields.size()));
        };
        auto to_ll = [&](const std::string& s) {
            try {
                std::size_t used = 0;
                long long v = std::stoll(s, &used);
                if (used != s.size()) throw std::invalid_argument(s);
                return v;
            } catch (const std::exception&) {
                throw StatsFormatError(where() + ": bad integer '" + s + "'");
            }
        };
        if (tag == "T") {
            need(3);
            TableStats ts;
            ts.table = unesc(fields[1], where());
            ts.tuple_count = to_ll(fields[2]);
            cur = &stats.per_table.emplace(ts.table, std::move(ts)).first->second;
            continue;
        }
        if (!cur) throw StatsFormatError(where() + ": record before any table header");
        if (tag == "S") {
            need(2);
            cur->shared_attrs.push_back(unesc(fields[1], where()));
        } else if (tag == "K") {
            need(2);
            cur->key_attrs.push_back(unesc(fields[1], where()));
        } else if (tag == "P") {
            need(4);
            cur->priors.emplace_back(unesc(fields[1], where()), unesc(fields[2], where()),
                                     to_ll(fields[3]));
        } else if (tag == "A") {
            need(5);
            Afd a;
            a.table = cur->table;
            for (const auto& d : split(fields[1], ',')) a.determining.push_back(unesc(d, where()));
            a.determined = unesc(fields[2], where());
            a.confidence = std::stod(fields[3]);
            a.specificity = std::stod(fields[4]);
            cur->afds.push_back(std::move(a));
        } else if (tag == "R") {
            need(7);
            AssociationRule r;
            r.table = cur->table;
            for (const auto& d : split(fields[1], ',')) r.body_attrs.push_back(unesc(d, where()));
            for (const auto& d : split(fields[2], ',')) r.body_values.push_back(unesc(d, where()));
            r.head_attr = unesc(fields[3], where());
            r.head_value = unesc(fields[4], where());
            r.body_count = to_ll(fields[5]);
            r.joint_count = to_ll(fields[6]);
            r.total = cur->tuple_count;
            cur->rules.push_back(std::move(r));
        } else {
            throw StatsFormatError(where() + ": unknown record tag '" + tag + "'");
        }
    }
    for (auto& [name, ts] : stats.per_table) ts.rebuild_index();
    return stats;
}

} // namespace smartint
