#include "smartint/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "smartint/queryparse.hpp"

namespace smartint {

// --- fragmenting ------------------------------------------------------------

std::vector<FragmentSpec> parse_fragment_specs(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw EvalError("cannot open fragment spec " + path);
    std::vector<FragmentSpec> specs;
    std::string line;
    int line_no = 0;
    auto fail = [&](const std::string& msg) {
        throw EvalError(path + ":" + std::to_string(line_no) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream is(line);
        std::string word;
        if (!(is >> word)) continue;
        if (word == "fragment") {
            std::string name;
            if (!(is >> name)) fail("fragment needs a name");
            specs.push_back({normalize_value(name), {}, {}});
        } else if (word == "attrs") {
            if (specs.empty()) fail("attrs before any fragment");
            std::string rest;
            std::getline(is, rest);
            std::istringstream as(rest);
            std::string attr;
            while (std::getline(as, attr, ','))
                if (!normalize_value(attr).empty())
                    specs.back().attributes.push_back(normalize_value(attr));
            if (specs.back().attributes.empty()) fail("attrs needs at least one attribute");
        } else if (word == "where") {
            if (specs.empty()) fail("where before any fragment");
            std::string attr, op, value;
            if (!(is >> attr >> op >> value)) fail("expected 'where attr op value'");
            specs.back().predicate.push_back({normalize_value(attr), parse_op(op), value});
        } else {
            fail("unknown directive '" + word + "'");
        }
    }
    for (const auto& s : specs)
        if (s.attributes.empty())
            throw EvalError("fragment '" + s.name + "' has no attributes");
    return specs;
}

std::vector<Table> split_master(const Table& master, const std::vector<FragmentSpec>& specs) {
    std::vector<Table> out;
    for (const auto& spec : specs) {
        std::vector<int> cols;
        for (const auto& a : spec.attributes) {
            int c = master.column(a);
            if (c < 0) throw EvalError("fragment '" + spec.name + "' selects unknown attribute '" +
                                       a + "'");
            cols.push_back(c);
        }
        Table t;
        t.name = spec.name;
        for (int c : cols) t.attributes.push_back(normalize_value(master.attributes[c]));
        for (const auto& row : master.rows) {
            bool keep = true;
            for (const auto& c : spec.predicate)
                if (!evaluate_constraint(master, row, c)) {
                    keep = false;
                    break;
                }
            if (!keep) continue;
            std::vector<std::string> cells;
            for (int c : cols) cells.push_back(row[c]);
            t.rows.push_back(std::move(cells));
        }
        t.numeric.assign(t.attributes.size(), false);
        for (std::size_t i = 0; i < cols.size(); ++i) t.numeric[i] = master.numeric[cols[i]];
        out.push_back(std::move(t));
    }
    return out;
}

AttributeMapping mapping_by_name(const std::vector<Table>& tables) {
    AttributeMapping m;
    for (std::size_t i = 0; i < tables.size(); ++i)
        for (std::size_t j = i + 1; j < tables.size(); ++j)
            for (const auto& a : tables[i].attributes)
                if (tables[j].column(a) >= 0)
                    m.pairs.push_back({{normalize_value(tables[i].name), normalize_value(a)},
                                       {normalize_value(tables[j].name), normalize_value(a)}});
    return m;
}

AttributeMapping fragment_mapping(const std::vector<Table>& tables) {
    AttributeMapping m;
    for (std::size_t i = 0; i < tables.size(); ++i)
        for (std::size_t j = i + 1; j < tables.size(); ++j)
            if (tables[i].column("model") >= 0 && tables[j].column("model") >= 0)
                m.pairs.push_back({{normalize_value(tables[i].name), "model"},
                                   {normalize_value(tables[j].name), "model"}});
    // layouts without a model column fall back to matching every shared name
    return m.pairs.empty() ? mapping_by_name(tables) : m;
}

// --- metrics ----------------------------------------------------------------

double tuple_correctness(const ExpandedTuple& answer, const Table& master, int truth_row) {
    const auto& truth = master.rows.at(truth_row);
    std::size_t total = 0, correct = 0;
    for (const auto& v : answer.values) {
        if (is_missing(v.value)) continue;
        int col = master.column(v.display);
        if (col < 0) continue;
        ++total;
        if (value_key(v.value) == master.cell_key(col, truth[col])) ++correct;
    }
    return total ? double(correct) / double(total) : 0.0;
}

double tuple_completeness(const ExpandedTuple& answer, const Table& master) {
    std::set<int> covered;
    for (const auto& v : answer.values) {
        if (is_missing(v.value)) continue;
        int col = master.column(v.display);
        if (col >= 0) covered.insert(col);
    }
    return master.attributes.empty() ? 0.0
                                     : double(covered.size()) / double(master.attributes.size());
}

// --- baselines --------------------------------------------------------------

std::vector<ExpandedTuple> single_table_answer(const std::vector<Table>& tables,
                                               const TableGraph& graph, const Query& query) {
    auto native = [&](const Table& t, const std::string& name) {
        for (std::size_t i = 0; i < t.attributes.size(); ++i)
            if (graph.attr_matches(name, t.name, t.attributes[i])) return int(i);
        return -1;
    };

    const Table* best = nullptr;
    std::pair<int, int> best_score{-1, -1}; // (constraints satisfied, projection covered)
    for (const auto& t : tables) {
        int cons = 0, proj = 0;
        for (const auto& c : query.constraints)
            if (native(t, c.attribute) >= 0) ++cons;
        if (query.wildcard)
            proj = int(t.attributes.size());
        else
            for (const auto& a : query.projected)
                if (native(t, a) >= 0) ++proj;
        std::pair<int, int> score{cons, proj};
        if (!best || score > best_score ||
            (score == best_score && normalize_value(t.name) < normalize_value(best->name))) {
            best = &t;
            best_score = score;
        }
    }
    if (!best) return {};

    std::vector<ExpandedTuple> out;
    for (const auto& row : best->rows) {
        bool keep = true;
        for (const auto& c : query.constraints) {
            int col = native(*best, c.attribute);
            if (col < 0) continue; // unmappable constraints are dropped
            Constraint cc = c;
            cc.attribute = best->attributes[col];
            if (!evaluate_constraint_cell(*best, col, row[col], cc)) {
                keep = false;
                break;
            }
        }
        if (!keep) continue;
        ExpandedTuple t;
        for (std::size_t i = 0; i < best->attributes.size(); ++i)
            t.values.push_back(
                {normalize_value(best->attributes[i]), row[i], 1.0, normalize_value(best->name),
                 false});
        out.push_back(std::move(t));
    }
    return out;
}

namespace {

bool numbers_compare(const std::string& a, Constraint::Op op, const std::string& b) {
    auto lhs = parse_number(a);
    auto rhs = parse_number(b);
    if (!lhs || !rhs) return false;
    switch (op) {
        case Constraint::Op::Lt: return *lhs < *rhs;
        case Constraint::Op::Gt: return *lhs > *rhs;
        case Constraint::Op::Le: return *lhs <= *rhs;
        case Constraint::Op::Ge: return *lhs >= *rhs;
        default: return false;
    }
}

} // namespace

std::vector<ExpandedTuple> direct_join_answer(const std::vector<Table>& tables,
                                              const TableGraph& graph, const Query& query) {
    std::vector<std::string> needed;
    if (!query.wildcard)
        for (const auto& a : query.projected) needed.push_back(a);
    for (const auto& c : query.constraints) needed.push_back(c.attribute);

    auto houses = [&](const Table& t, const std::string& name) {
        for (const auto& a : t.attributes)
            if (graph.attr_matches(name, t.name, a)) return true;
        return false;
    };

    std::vector<std::string> names;
    for (const auto& t : tables) names.push_back(normalize_value(t.name));
    std::sort(names.begin(), names.end());
    int n = int(names.size());
    if (n > 16) throw EvalError("direct join limited to 16 tables");

    // minimal connected covering subset; ties by sorted-name sequence
    std::optional<std::vector<std::string>> chosen;
    for (int size = 1; size <= n && !chosen; ++size) {
        std::vector<std::vector<std::string>> hits;
        for (unsigned mask = 1; mask < (1u << n); ++mask) {
            if (__builtin_popcount(mask) != size) continue;
            std::vector<std::string> members;
            for (int i = 0; i < n; ++i)
                if (mask & (1u << i)) members.push_back(names[i]);
            bool cover = true;
            for (const auto& a : needed) {
                bool found = false;
                for (const auto& m : members)
                    if (houses(find_table(tables, m), a)) {
                        found = true;
                        break;
                    }
                if (!found) {
                    cover = false;
                    break;
                }
            }
            if (!cover) continue;
            // connectivity
            std::set<std::string> seen{members[0]};
            std::vector<std::string> stack{members[0]};
            while (!stack.empty()) {
                std::string x = stack.back();
                stack.pop_back();
                for (const auto& y : members)
                    if (!seen.count(y) && graph.edge_between(x, y)) {
                        seen.insert(y);
                        stack.push_back(y);
                    }
            }
            if (seen.size() != members.size()) continue;
            hits.push_back(members);
        }
        if (!hits.empty()) chosen = *std::min_element(hits.begin(), hits.end());
    }
    if (!chosen) throw EvalError("no connected table set covers the query attributes");

    // join in an order that keeps the intermediate connected
    std::vector<std::string> order;
    std::set<std::string> left(chosen->begin(), chosen->end());
    order.push_back(*chosen->begin());
    left.erase(order.front());
    while (!left.empty()) {
        bool advanced = false;
        for (const auto& cand : *chosen) {
            if (!left.count(cand)) continue;
            bool connected = false;
            for (const auto& have : order)
                if (graph.edge_between(have, cand)) {
                    connected = true;
                    break;
                }
            if (connected) {
                order.push_back(cand);
                left.erase(cand);
                advanced = true;
                break;
            }
        }
        if (!advanced) throw EvalError("covering set unexpectedly disconnected");
    }

    struct Col {
        std::string table, attr;
        int cls;
    };
    std::vector<Col> schema;
    std::vector<std::vector<std::string>> rows;

    auto resolve = [&](const std::string& name) {
        for (std::size_t i = 0; i < schema.size(); ++i)
            if (graph.attr_matches(name, schema[i].table, schema[i].attr)) return int(i);
        return -1;
    };
    // apply each constraint as soon as its attribute joins the schema, to keep
    // the intermediate small
    std::vector<bool> applied(query.constraints.size(), false);
    auto filter = [&] {
        for (std::size_t ci = 0; ci < query.constraints.size(); ++ci) {
            if (applied[ci]) continue;
            const Constraint& c = query.constraints[ci];
            int col = resolve(c.attribute);
            if (col < 0) continue;
            applied[ci] = true;
            std::vector<std::vector<std::string>> kept;
            for (auto& row : rows) {
                const std::string& cell = row[col];
                if (is_missing(cell)) continue;
                bool ok = c.op == Constraint::Op::Eq ? value_key(cell) == value_key(c.value)
                                                     : numbers_compare(cell, c.op, c.value);
                if (ok) kept.push_back(std::move(row));
            }
            rows = std::move(kept);
        }
    };

    const Table& first = find_table(tables, order[0]);
    for (const auto& a : first.attributes)
        schema.push_back({normalize_value(first.name), normalize_value(a),
                          graph.attr_class(first.name, a)});
    for (const auto& r : first.rows) rows.push_back(r);
    filter();

    for (std::size_t step = 1; step < order.size(); ++step) {
        const Table& t = find_table(tables, order[step]);
        // join columns: table columns whose class already appears in the schema
        std::vector<std::pair<int, int>> on; // (schema col, table col)
        for (std::size_t ci = 0; ci < t.attributes.size(); ++ci) {
            int cls = graph.attr_class(t.name, t.attributes[ci]);
            if (cls < 0) continue;
            for (std::size_t sj = 0; sj < schema.size(); ++sj)
                if (schema[sj].cls == cls) {
                    on.emplace_back(int(sj), int(ci));
                    break;
                }
        }
        std::map<std::string, std::vector<int>> index;
        for (std::size_t ri = 0; ri < t.rows.size(); ++ri) {
            std::string key;
            bool ok = true;
            for (const auto& [sj, ci] : on) {
                const std::string& cell = t.rows[ri][ci];
                if (is_missing(cell)) {
                    ok = false; // missing never joins
                    break;
                }
                key += t.cell_key(int(ci), cell);
                key += '\x1f';
            }
            if (ok) index[key].push_back(int(ri));
        }

        std::vector<int> extra_cols;
        for (std::size_t ci = 0; ci < t.attributes.size(); ++ci) {
            int cls = graph.attr_class(t.name, t.attributes[ci]);
            bool dup = false;
            for (const auto& c : schema)
                if (cls >= 0 && c.cls == cls) {
                    dup = true;
                    break;
                }
            if (!dup) extra_cols.push_back(int(ci));
        }

        std::vector<std::vector<std::string>> joined;
        for (const auto& row : rows) {
            std::string key;
            bool ok = true;
            for (const auto& [sj, ci] : on) {
                if (is_missing(row[sj])) {
                    ok = false;
                    break;
                }
                key += value_key(row[sj]);
                key += '\x1f';
            }
            if (!ok) continue;
            auto it = index.find(key);
            if (it == index.end()) continue;
            for (int ri : it->second) {
                auto merged = row;
                for (int ci : extra_cols) merged.push_back(t.rows[ri][ci]);
                joined.push_back(std::move(merged));
            }
        }
        for (int ci : extra_cols)
            schema.push_back({normalize_value(t.name), normalize_value(t.attributes[ci]),
                              graph.attr_class(t.name, t.attributes[ci])});
        rows = std::move(joined);
        filter();
    }

    // a constraint the covering set cannot evaluate yields no answers
    for (bool a : applied)
        if (!a) return {};

    std::vector<ExpandedTuple> out;
    for (const auto& row : rows) {
        ExpandedTuple t;
        for (std::size_t i = 0; i < schema.size(); ++i)
            t.values.push_back({schema[i].attr, row[i], 1.0, schema[i].table, false});
        out.push_back(std::move(t));
    }
    return out;
}

// --- evaluation -------------------------------------------------------------

namespace {

double score_query(const std::vector<ExpandedTuple>& answers, const Query& query,
                   const Table& master, QueryScore& score) {
    if (answers.empty()) {
        score.precision = score.recall = score.f = 0;
        return 0;
    }

    // matching keys of every master cell, computed once per column
    std::map<int, std::vector<std::string>> colkeys;
    auto keys_of = [&](int col) -> const std::vector<std::string>& {
        auto it = colkeys.find(col);
        if (it != colkeys.end()) return it->second;
        auto& keys = colkeys[col];
        keys.reserve(master.rows.size());
        for (const auto& row : master.rows) keys.push_back(master.cell_key(col, row[col]));
        return keys;
    };

    // truth index on the projected attributes the answer carries unpredicted
    std::map<std::vector<int>, std::map<std::string, std::vector<int>>> indices;
    auto index_for = [&](const std::vector<int>& cols) -> const std::map<std::string, std::vector<int>>& {
        auto it = indices.find(cols);
        if (it != indices.end()) return it->second;
        auto& idx = indices[cols];
        std::vector<const std::vector<std::string>*> per_col;
        for (int c : cols) per_col.push_back(&keys_of(c));
        for (std::size_t r = 0; r < master.rows.size(); ++r) {
            std::string key;
            for (const auto* keys : per_col) {
                key += (*keys)[r];
                key += '\x1f';
            }
            idx[key].push_back(int(r));
        }
        return idx;
    };

    std::map<std::string, int> master_col; // answer display name -> master column
    auto col_of = [&](const std::string& display) {
        auto it = master_col.find(display);
        if (it != master_col.end()) return it->second;
        return master_col.emplace(display, master.column(display)).first->second;
    };

    double sum_cr = 0, sum_cp = 0;
    for (const auto& ans : answers) {
        // (master column, matching key) of every non-missing answer value
        std::vector<std::pair<int, std::string>> cells;
        for (const auto& v : ans.values) {
            if (is_missing(v.value)) continue;
            int c = col_of(v.display);
            if (c >= 0) cells.emplace_back(c, value_key(v.value));
        }
        auto correctness = [&](int row) {
            if (cells.empty()) return 0.0;
            std::size_t correct = 0;
            for (const auto& [c, key] : cells)
                if (key == keys_of(c)[row]) ++correct;
            return double(correct) / double(cells.size());
        };

        std::vector<int> cols;
        std::vector<std::string> parts;
        for (const auto& name : query.projected) {
            for (const auto& v : ans.values) {
                if (v.predicted || is_missing(v.value)) continue;
                if (normalize_value(name) != v.display) continue;
                int c = col_of(v.display);
                if (c < 0) continue;
                cols.push_back(c);
                parts.push_back(value_key(v.value) + '\x1f');
                break;
            }
        }
        // match on the projected unpredicted attributes; if no master row
        // carries that exact combination, drop trailing attributes until one
        // does (spurious joins mix rows, so the full key may not exist)
        double cr = 0;
        bool matched = false;
        for (std::size_t len = cols.size(); len > 0 && !matched; --len) {
            std::vector<int> sub(cols.begin(), cols.begin() + len);
            std::string key;
            for (std::size_t i = 0; i < len; ++i) key += parts[i];
            const auto& idx = index_for(sub);
            auto it = idx.find(key);
            if (it == idx.end()) continue;
            matched = true;
            for (int r : it->second) cr = std::max(cr, correctness(r));
        }
        if (!matched)
            for (std::size_t r = 0; r < master.rows.size(); ++r)
                cr = std::max(cr, correctness(int(r)));
        sum_cr += cr;
        sum_cp += tuple_completeness(ans, master);
    }
    score.precision = sum_cr / double(answers.size());
    score.recall = sum_cp / double(answers.size());
    score.f = (score.precision + score.recall) > 0
                  ? 2 * score.precision * score.recall / (score.precision + score.recall)
                  : 0;
    return score.f;
}

void finalize(EvalReport& report) {
    double p = 0, r = 0, f = 0;
    std::map<std::size_t, std::vector<const QueryScore*>> by_attr, by_cons;
    for (const auto& q : report.per_query) {
        p += q.precision;
        r += q.recall;
        f += q.f;
        by_attr[q.n_attrs].push_back(&q);
        by_cons[q.n_constraints].push_back(&q);
    }
    std::size_t n = report.per_query.size();
    if (n) {
        report.precision = p / double(n);
        report.recall = r / double(n);
        report.f = f / double(n);
    }
    auto bucket = [](const std::vector<const QueryScore*>& qs) {
        std::array<double, 3> out{0, 0, 0};
        for (const auto* q : qs) {
            out[0] += q->precision;
            out[1] += q->recall;
            out[2] += q->f;
        }
        for (auto& v : out) v /= double(qs.size());
        return out;
    };
    for (const auto& [k, qs] : by_attr) report.by_attr_count[k] = bucket(qs);
    for (const auto& [k, qs] : by_cons) report.by_constraint_count[k] = bucket(qs);
}

} // namespace

EvalReport evaluate(System system, const std::vector<Table>& fragments, const TableGraph& graph,
                    const SourceStats& stats, const Table& master,
                    const std::vector<Query>& queries, const SystemConfigs& configs) {
    EvalReport report;
    report.per_query.resize(queries.size());

#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < (long long)queries.size(); ++i) {
        const Query& q = queries[i];
        QueryScore& score = report.per_query[i];
        score.query = query_to_string(q);
        score.n_attrs = q.wildcard ? master.attributes.size() : q.projected.size();
        score.n_constraints = q.constraints.size();

        auto t0 = std::chrono::steady_clock::now();
        std::vector<ExpandedTuple> answers;
        try {
            switch (system) {
                case System::Smart:
                    answers = answer_query(fragments, stats, graph, q, configs.selection,
                                           configs.expansion);
                    break;
                case System::SingleTable:
                    answers = single_table_answer(fragments, graph, q);
                    break;
                case System::DirectJoin:
                    answers = direct_join_answer(fragments, graph, q);
                    break;
            }
        } catch (const SelectionError&) {
            // no relevant source: empty answer set, scored as zero
        }
        score.answers = answers.size();
        score_query(answers, q, master, score);
        score.runtime_ms = std::chrono::duration<double, std::milli>(
                               std::chrono::steady_clock::now() - t0)
                               .count();
    }
    finalize(report);
    return report;
}

std::vector<WidthPoint> width_sweep(const std::vector<Table>& fragments, const TableGraph& graph,
                                    const SourceStats& stats, const Table& master,
                                    const std::vector<Query>& queries,
                                    const SystemConfigs& configs, std::size_t w_min,
                                    std::size_t w_max) {
    std::vector<WidthPoint> curve;
    for (std::size_t w = w_min; w <= w_max; ++w) {
        SystemConfigs cfg = configs;
        cfg.expansion.width = w;
        EvalReport r = evaluate(System::Smart, fragments, graph, stats, master, queries, cfg);
        curve.push_back({w, r.precision, r.recall, r.f});
    }
    return curve;
}

// --- synthetic master -------------------------------------------------------

Table generate_master(unsigned seed, std::size_t n_rows, const MasterSpec& spec) {
    std::mt19937 rng(seed);
    auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
    auto chance = [&](double p) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; };

    const std::vector<std::string> makes = {"honda", "toyota", "nissan", "chevrolet",
                                            "ford",  "dodge",  "bmw",    "audi"};
    const std::vector<std::string> vehicle_types = {"suv", "sedan", "coupe", "truck", "van",
                                                    "wagon"};
    const std::vector<std::string> body_styles = {"hatchback", "sedan",   "coupe",   "convertible",
                                                  "wagon",     "pickup",  "minivan", "roadster"};
    const std::vector<std::string> colors = {"black", "white", "silver", "red",    "blue",
                                             "green", "gray",  "brown",  "orange", "yellow",
                                             "gold",  "maroon"};
    const std::vector<std::string> conditions = {"new", "used", "certified"};
    const std::vector<std::string> payments = {"cash", "finance", "lease"};
    const std::vector<std::string> price_types = {"asking", "negotiable", "fixed"};
    const std::vector<std::string> transmissions = {"manual", "automatic", "cvt"};
    const std::vector<std::string> reviews = {"excellent", "good", "average", "poor"};
    const std::vector<std::string> cylinder_counts = {"4", "6", "8"};

    std::size_t n_makes = std::min(spec.n_makes, makes.size());

    // per-model profile: the values the dependencies pull towards
    struct Profile {
        std::size_t make, engine, vtype, style, color, cyl, trans, doors;
        long long base_price;
    };
    std::vector<Profile> profile(spec.n_models);
    for (auto& p : profile) {
        p.make = pick(n_makes);
        p.engine = pick(spec.n_engines);
        p.vtype = pick(vehicle_types.size());
        p.style = pick(body_styles.size());
        p.color = pick(colors.size());
        p.cyl = pick(cylinder_counts.size());
        p.trans = pick(transmissions.size());
        p.doors = 2 + pick(4);
        p.base_price = 5000 + (long long)pick(41) * 1000;
    }

    Table t;
    t.name = "master";
    t.attributes = {"vin",          "model",     "make",        "year",     "condition",
                    "price",        "price_type", "payment",    "mileage",  "color",
                    "engine",       "cylinders", "transmission", "vehicle_type", "type",
                    "body_style",   "door_count", "review"};

    char buf[32];
    for (std::size_t r = 0; r < n_rows; ++r) {
        std::size_t m = pick(spec.n_models);
        const Profile& p = profile[m];

        std::snprintf(buf, sizeof buf, "m%03zu", m);
        std::string model = buf;
        std::string make = makes[chance(spec.p_make) ? p.make : pick(n_makes)];
        std::snprintf(buf, sizeof buf, "eng%02zu",
                      chance(spec.p_engine) ? p.engine : pick(spec.n_engines));
        std::string engine = buf;
        std::string vtype =
            vehicle_types[chance(spec.p_vehicle_type) ? p.vtype : pick(vehicle_types.size())];
        std::string style =
            body_styles[chance(spec.p_body_style) ? p.style : pick(body_styles.size())];
        std::string doors =
            std::to_string(chance(spec.p_door_count) ? p.doors : 2 + pick(4));
        std::string color = colors[chance(spec.p_color) ? p.color : pick(colors.size())];
        std::string cyl =
            cylinder_counts[chance(spec.p_cylinders) ? p.cyl : pick(cylinder_counts.size())];
        std::string trans =
            transmissions[chance(spec.p_transmission) ? p.trans : pick(transmissions.size())];

        std::snprintf(buf, sizeof buf, "vin%06zu", r);
        std::vector<std::string> row(t.attributes.size());
        row[0] = buf;
        row[1] = model;
        row[2] = make;
        row[3] = std::to_string(1998 + (int)pick(13));
        row[4] = conditions[pick(conditions.size())];
        row[5] = std::to_string(p.base_price - 2000 + (long long)pick(4001));
        row[6] = price_types[pick(price_types.size())];
        row[7] = payments[pick(payments.size())];
        row[8] = std::to_string(pick(150001));
        row[9] = color;
        row[10] = engine;
        row[11] = cyl;
        row[12] = trans;
        row[13] = vtype;
        row[14] = vtype; // `type` duplicates vehicle_type, per the fragment layout
        row[15] = style;
        row[16] = doors;
        row[17] = reviews[pick(reviews.size())];
        t.rows.push_back(std::move(row));
    }

    t.numeric.assign(t.attributes.size(), false);
    for (std::size_t c = 0; c < t.attributes.size(); ++c) {
        bool numeric = !t.rows.empty();
        for (const auto& row : t.rows)
            if (!is_missing(row[c]) && !parse_number(row[c])) {
                numeric = false;
                break;
            }
        t.numeric[c] = numeric;
    }
    return t;
}

std::vector<FragmentSpec> builtin_fragment_layout() {
    std::vector<FragmentSpec> specs;
    specs.push_back({"vehicles_japanese",
                     {"condition", "price_type", "engine", "model", "vin", "vehicle_type",
                      "payment", "door_count", "mileage", "price", "color", "body_style", "make"},
                     {}});
    specs.push_back({"vehicles_chevrolet",
                     {"condition", "year", "price", "model", "vin", "payment", "mileage", "color",
                      "make"},
                     {{"mileage", Constraint::Op::Lt, "80000"}}});
    specs.push_back({"vehicles_chevrolet_extra",
                     {"model", "door_count", "type", "engine"},
                     {{"mileage", Constraint::Op::Lt, "80000"}}});
    specs.push_back({"vehicles_rest",
                     {"condition", "year", "price", "model", "vin", "payment", "mileage", "color",
                      "make"},
                     {{"mileage", Constraint::Op::Ge, "80000"}}});
    specs.push_back({"vehicles_rest_extra",
                     {"engine", "model", "vehicle_type", "door_count", "body_style"},
                     {{"mileage", Constraint::Op::Ge, "80000"}}});
    return specs;
}

std::vector<Query> default_workload() {
    // every query reaches for year (chevrolet/rest), type (chevrolet_extra)
    // and a japanese-anchored attribute, so no single source can answer it
    const char* texts[] = {
        "SELECT model, make, year, type, vehicle_type WHERE price < 20000 AND type = suv",
        "SELECT model, engine, year, type, body_style WHERE mileage < 60000 AND type = sedan",
        "SELECT model, make, price, year, type, vehicle_type WHERE condition = used AND type = truck",
        "SELECT model, year, type, door_count, price_type WHERE payment = lease AND type = van",
        "SELECT model, make, engine, year, type, body_style WHERE color = red AND type = coupe",
        "SELECT model, price, year, type, vehicle_type WHERE price_type = asking AND type = wagon",
        "SELECT model, make, year, type, body_style WHERE price > 25000 AND type = sedan",
        "SELECT model, mileage, year, type, vehicle_type WHERE condition = new AND type = suv",
        "SELECT model, engine, price, year, type, body_style WHERE payment = finance AND type = sedan",
        "SELECT model, make, year, type, price_type WHERE mileage < 90000 AND type = truck",
        "SELECT model, color, year, type, vehicle_type WHERE price < 15000 AND type = van",
        "SELECT model, make, year, type, body_style WHERE price_type = negotiable AND type = wagon",
        "SELECT model, make, year, type, vehicle_type WHERE year > 2003 AND vehicle_type = suv",
        "SELECT model, price, year, type, body_style WHERE year < 2006 AND body_style = sedan",
        "SELECT model, engine, year, type, vehicle_type WHERE year > 2001 AND engine = eng07",
        "SELECT model, make, year, type, door_count, price_type WHERE year < 2005 AND door_count = 2",
        "SELECT model, year, type, body_style WHERE year > 2004 AND body_style = coupe",
        "SELECT model, make, year, type, vehicle_type WHERE year < 2004 AND vehicle_type = van",
        "SELECT model, engine, year, type, price_type WHERE year > 2002 AND engine = eng11",
        "SELECT model, make, year, type, body_style, price WHERE year < 2007 AND body_style = hatchback",
    };
    std::vector<Query> out;
    for (const char* s : texts) out.push_back(parse_query(s));
    return out;
}

void write_report_csv(const EvalReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw EvalError("cannot write report " + path);
    out << "query,n_attrs,n_constraints,precision,recall,f_measure,answers,runtime_ms\n";
    char buf[128];
    for (const auto& q : report.per_query) {
        std::string quoted = "\"";
        for (char c : q.query) {
            if (c == '"') quoted += '"';
            quoted += c;
        }
        quoted += '"';
        std::snprintf(buf, sizeof buf, ",%zu,%zu,%.6f,%.6f,%.6f,%zu,%.3f\n", q.n_attrs,
                      q.n_constraints, q.precision, q.recall, q.f, q.answers, q.runtime_ms);
        out << quoted << buf;
    }
    std::snprintf(buf, sizeof buf, "TOTAL,,,%.6f,%.6f,%.6f,,\n", report.precision, report.recall,
                  report.f);
    out << buf;
    for (const auto& [k, v] : report.by_attr_count) {
        std::snprintf(buf, sizeof buf, "BY_ATTRS,%zu,,%.6f,%.6f,%.6f,,\n", k, v[0], v[1], v[2]);
        out << buf;
    }
    for (const auto& [k, v] : report.by_constraint_count) {
        std::snprintf(buf, sizeof buf, "BY_CONSTRAINTS,,%zu,%.6f,%.6f,%.6f,,\n", k, v[0], v[1],
                      v[2]);
        out << buf;
    }
}

} // namespace smartint
