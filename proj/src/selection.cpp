#include "smartint/selection.hpp"

#include <algorithm>
#include <queue>
#include <set>

#include "smartint/chaining.hpp"

namespace smartint {

std::vector<std::string> TableTree::all_tables() const {
    std::vector<std::string> out{root};
    for (const auto& c : children) {
        auto sub = c.subtree.all_tables();
        out.insert(out.end(), sub.begin(), sub.end());
    }
    return out;
}

std::size_t TableTree::size() const { return all_tables().size(); }

namespace {

// Column of `table` the query-level name refers to, or -1.
int resolve_column(const TableGraph& graph, const Table& table, const std::string& name) {
    for (std::size_t i = 0; i < table.attributes.size(); ++i)
        if (graph.attr_matches(name, table.name, table.attributes[i])) return int(i);
    return -1;
}

// Distribution of a column as (raw representative, count) pairs keyed by value.
std::vector<std::pair<std::string, long long>> column_distribution(const Table& table, int col) {
    std::map<std::string, std::pair<std::string, long long>> by_key;
    for (const auto& row : table.rows) {
        const std::string& cell = row[col];
        if (is_missing(cell)) continue;
        auto [it, fresh] = by_key.emplace(table.cell_key(col, cell), std::make_pair(cell, 0LL));
        (void)fresh;
        ++it->second.second;
    }
    std::vector<std::pair<std::string, long long>> out;
    out.reserve(by_key.size());
    for (auto& [key, rep] : by_key) out.push_back(rep);
    return out;
}

// Does a rule head value satisfy the constraint? Equality compares matching
// keys; ordering needs both sides numeric.
bool head_satisfies(const std::string& head_value, const Constraint& c) {
    if (c.op == Constraint::Op::Eq) return value_key(head_value) == value_key(c.value);
    auto lhs = parse_number(head_value);
    auto rhs = parse_number(c.value);
    if (!lhs || !rhs) return false;
    switch (c.op) {
        case Constraint::Op::Lt: return *lhs < *rhs;
        case Constraint::Op::Gt: return *lhs > *rhs;
        case Constraint::Op::Le: return *lhs <= *rhs;
        case Constraint::Op::Ge: return *lhs >= *rhs;
        default: return false;
    }
}

bool has_single_body_rules(const SourceStats& stats, const std::string& table,
                           const std::string& body_attr, const std::string& head_attr) {
    if (!stats.has(table)) return false;
    std::string b = normalize_value(body_attr), h = normalize_value(head_attr);
    for (const auto& r : stats.at(table).rules)
        if (r.body_attrs.size() == 1 && r.body_attrs[0] == b && r.head_attr == h) return true;
    return false;
}

} // namespace

double constraint_probability(const SourceStats& stats, const TableGraph& graph,
                              const Table& table, const Constraint& c, double epsilon) {
    long long n = (long long)table.tuple_count();
    if (n == 0) return epsilon;

    int col = resolve_column(graph, table, c.attribute);
    if (col >= 0) {
        Constraint native = c;
        native.attribute = table.attributes[col];
        long long hits = 0;
        for (const auto& row : table.rows)
            if (evaluate_constraint_cell(table, col, row[col], native)) ++hits;
        return double(hits) / double(n);
    }

    // One hop: route through a shared attribute into a neighbor that stores
    // the constrained attribute, using its conditionals.
    double best = 0.0;
    bool routed = false;
    for (const auto& next : graph.neighbors(table.name)) {
        const auto* edge = graph.edge_between(table.name, next);
        if (!edge || !stats.has(next)) continue;
        for (const auto& [ea, eb] : edge->attr_pairs) {
            const std::string& here_attr = (edge->a == normalize_value(table.name)) ? ea : eb;
            const std::string& there_attr = (edge->a == normalize_value(table.name)) ? eb : ea;
            int here_col = table.column(here_attr);
            if (here_col < 0) continue;

            // the neighbor must house the constrained attribute natively
            std::string target;
            bool found = false;
            for (const auto& [ref, cls] : graph.class_of) {
                (void)cls;
                if (ref.table != next) continue;
                if (graph.attr_matches(c.attribute, next, ref.attribute)) {
                    target = ref.attribute;
                    found = true;
                    break;
                }
            }
            if (!found) continue;
            if (!has_single_body_rules(stats, next, there_attr, target)) continue;

            double p = 0.0;
            for (const auto& [value, count] : column_distribution(table, here_col)) {
                double cond_sat = 0.0;
                for (const AssociationRule* r :
                     rules_for(stats, next, {there_attr}, {value}, target))
                    if (head_satisfies(r->head_value, c)) cond_sat += r->confidence();
                p += (double(count) / double(n)) * cond_sat;
            }
            routed = true;
            best = std::max(best, p);
        }
    }
    if (routed) return best;
    return epsilon;
}

double conformance_probability(const SourceStats& stats, const TableGraph& graph,
                               const Table& table, const std::vector<Constraint>& constraints,
                               double epsilon) {
    double p = 1.0;
    for (const auto& c : constraints) p *= constraint_probability(stats, graph, table, c, epsilon);
    return p;
}

std::vector<std::string> effective_projection(const TableGraph& graph,
                                              const std::vector<Table>& tables, const Query& query) {
    if (!query.wildcard) {
        std::vector<std::string> out;
        for (const auto& a : query.projected) out.push_back(normalize_value(a));
        return out;
    }
    // one representative per attribute class that appears in some table:
    // the lexicographically smallest of the class's names
    std::set<std::string> reps;
    for (const auto& t : tables) {
        for (const auto& attr : t.attributes) {
            int cls = graph.attr_class(t.name, attr);
            if (cls >= 0)
                reps.insert(*graph.class_names[cls].begin());
            else
                reps.insert(normalize_value(attr));
        }
    }
    return {reps.begin(), reps.end()};
}

double table_relevance(const SourceStats& stats, const TableGraph& graph, const Table& table,
                       const std::vector<Table>& tables, const Query& query, double epsilon) {
    (void)tables;
    auto projection = effective_projection(graph, tables, query);
    if (projection.empty()) return 0.0;
    std::size_t native = 0;
    for (const auto& a : projection)
        if (resolve_column(graph, table, a) >= 0) ++native;
    double coverage = double(native) / double(projection.size());
    double conform = conformance_probability(stats, graph, table, query.constraints, epsilon);
    return coverage * conform * double(table.tuple_count());
}

double tree_relevance(const SourceStats& stats, const TableGraph& graph, const TableTree& tree,
                      const std::vector<Table>& tables, const Query& query, double epsilon) {
    const Table& base = find_table(tables, tree.root);
    double score = table_relevance(stats, graph, base, tables, query, epsilon);
    for (const auto& a : effective_projection(graph, tables, query)) {
        if (resolve_column(graph, base, a) >= 0) continue;
        score += pred_accuracy(stats, graph, tree, a);
    }
    return score;
}

namespace {

TableTree bfs_tree(const TableGraph& graph, const std::string& root,
                   const std::vector<std::string>& subset) {
    std::map<std::string, TableTree> nodes;
    for (const auto& t : subset) nodes[t] = TableTree{t, {}, 0.0};

    std::set<std::string> seen{root};
    std::queue<std::string> frontier;
    frontier.push(root);
    std::map<std::string, std::vector<std::string>> child_names;
    std::map<std::string, std::string> parent_of;
    std::vector<std::string> order{root};
    while (!frontier.empty()) {
        std::string here = frontier.front();
        frontier.pop();
        std::vector<std::string> nbrs = graph.neighbors(here);
        std::sort(nbrs.begin(), nbrs.end());
        for (const auto& next : nbrs) {
            if (!nodes.count(next) || seen.count(next)) continue;
            seen.insert(next);
            child_names[here].push_back(next);
            parent_of[next] = here;
            order.push_back(next);
            frontier.push(next);
        }
    }

    // assemble bottom-up so children are complete before being attached
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const std::string& name = *it;
        if (name == root) break;
        const std::string& parent = parent_of[name];
        const auto* edge = graph.edge_between(parent, name);
        TableTree::Child child;
        for (const auto& [ea, eb] : edge->attr_pairs) {
            if (edge->a == parent)
                child.anchors.emplace_back(ea, eb);
            else
                child.anchors.emplace_back(eb, ea);
        }
        child.subtree = std::move(nodes[name]);
        nodes[parent].children.push_back(std::move(child));
    }
    // keep children in the deterministic BFS (sorted) order
    return std::move(nodes[root]);
}

bool subset_connected(const std::vector<int>& members,
                      const std::vector<std::vector<bool>>& adj) {
    if (members.empty()) return false;
    std::set<int> in(members.begin(), members.end());
    std::set<int> seen{members[0]};
    std::queue<int> q;
    q.push(members[0]);
    while (!q.empty()) {
        int x = q.front();
        q.pop();
        for (int y : members)
            if (!seen.count(y) && adj[x][y]) {
                seen.insert(y);
                q.push(y);
            }
    }
    return seen.size() == in.size();
}

std::string subset_key(const std::string& root, std::vector<std::string> names) {
    std::sort(names.begin(), names.end());
    std::string key = root + ">";
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) key += "+";
        key += names[i];
    }
    return key;
}

} // namespace

TableTree select_tree(const SourceStats& stats, const TableGraph& graph,
                      const std::vector<Table>& tables, const Query& query,
                      const SelectionConfig& config, SelectionExplain* explain) {
    std::vector<std::pair<std::string, double>> scores;
    std::vector<std::string> candidates;
    for (const auto& t : tables) {
        double r = table_relevance(stats, graph, t, tables, query, config.epsilon);
        scores.emplace_back(normalize_value(t.name), r);
        if (r >= config.tau) candidates.push_back(normalize_value(t.name));
    }
    std::sort(scores.begin(), scores.end());
    std::sort(candidates.begin(), candidates.end());
    if (explain) explain->table_scores = scores;
    if (candidates.empty())
        throw SelectionError("no table passes the relevance threshold", scores);

    // Ties favour the larger tree (more attributes reachable for expansion),
    // then the lexicographically smallest table-name sequence.
    auto better = [](double r, const std::vector<std::string>& names, double best_r,
                     const std::vector<std::string>& best_names) {
        if (r != best_r) return r > best_r;
        if (names.size() != best_names.size()) return names.size() > best_names.size();
        return names < best_names;
    };

    std::optional<TableTree> best;
    double best_r = 0.0;
    std::vector<std::string> best_names;

    auto consider = [&](TableTree tree) {
        double r = tree_relevance(stats, graph, tree, tables, query, config.epsilon);
        tree.relevance = r;
        std::vector<std::string> names = tree.all_tables();
        std::sort(names.begin(), names.end());
        if (explain) explain->tree_scores.emplace_back(subset_key(tree.root, names), r);
        if (!best || better(r, names, best_r, best_names)) {
            best_r = r;
            best_names = names;
            best = std::move(tree);
        }
    };

    if (candidates.size() <= 8) {
        if (explain) explain->exhaustive = true;
        int n = int(candidates.size());
        std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (graph.edge_between(candidates[i], candidates[j]))
                    adj[i][j] = adj[j][i] = true;
        for (unsigned mask = 1; mask < (1u << n); ++mask) {
            std::vector<int> members;
            for (int i = 0; i < n; ++i)
                if (mask & (1u << i)) members.push_back(i);
            if (members.size() > config.k) continue;
            if (!subset_connected(members, adj)) continue;
            std::vector<std::string> names;
            for (int i : members) names.push_back(candidates[i]);
            for (int i : members) {
                TableTree tree = bfs_tree(graph, candidates[i], names);
                if (tree.size() != names.size()) continue;
                consider(std::move(tree));
            }
        }
    } else {
        if (explain) explain->exhaustive = false;
        std::set<std::string> in_cand(candidates.begin(), candidates.end());
        for (const auto& root : candidates) {
            std::vector<std::string> names{root};
            TableTree tree = bfs_tree(graph, root, names);
            double cur = tree_relevance(stats, graph, tree, tables, query, config.epsilon);
            tree.relevance = cur;
            consider(tree);
            while (names.size() < config.k) {
                std::optional<std::string> pick;
                double pick_r = cur;
                TableTree pick_tree;
                std::set<std::string> have(names.begin(), names.end());
                std::set<std::string> frontier;
                for (const auto& t : names)
                    for (const auto& nb : graph.neighbors(t))
                        if (in_cand.count(nb) && !have.count(nb)) frontier.insert(nb);
                for (const auto& nb : frontier) {
                    std::vector<std::string> grown = names;
                    grown.push_back(nb);
                    std::sort(grown.begin(), grown.end());
                    TableTree cand = bfs_tree(graph, root, grown);
                    if (cand.size() != grown.size()) continue;
                    double r = tree_relevance(stats, graph, cand, tables, query, config.epsilon);
                    cand.relevance = r;
                    if (r > pick_r || (!pick && r == pick_r) ||
                        (pick && r == pick_r && nb < *pick)) {
                        pick = nb;
                        pick_r = r;
                        pick_tree = std::move(cand);
                    }
                }
                if (!pick) break;
                names.push_back(*pick);
                std::sort(names.begin(), names.end());
                cur = pick_r;
                consider(pick_tree);
            }
        }
    }

    if (!best) throw SelectionError("no connected tree could be formed", scores);
    if (explain) std::sort(explain->tree_scores.begin(), explain->tree_scores.end());
    return *best;
}

} // namespace smartint
