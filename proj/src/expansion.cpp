#include "smartint/expansion.hpp"

#include <algorithm>
#include <iostream>
#include <map>
#include <set>

#include "smartint/chaining.hpp"

namespace smartint {

namespace {

std::size_t count_nodes(const std::vector<AttrNode>& nodes) {
    std::size_t n = nodes.size();
    for (const auto& node : nodes) n += count_nodes(node.children);
    return n;
}

// Does a rule head value satisfy the constraint? Same convention as source
// selection: equality on matching keys, ordering only when both sides parse.
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

} // namespace

std::size_t AttributeTree::attribute_count() const { return count_nodes(roots); }

const ExpandedValue* ExpandedTuple::find(const TableGraph& graph, const std::string& name) const {
    for (const auto& v : values)
        if (graph.attr_matches(name, v.table, v.display) ||
            normalize_value(name) == v.display)
            return &v;
    // fall back to resolving against the provenance column
    for (const auto& v : values) {
        int cls = graph.attr_class(v.table, v.display);
        if (cls >= 0 && graph.class_names[cls].count(normalize_value(name))) return &v;
    }
    return nullptr;
}

namespace {

struct FlatNode {
    AttrNode node;
    int parent = -1; // arena index; -1 = level 0
};

void assemble(std::vector<FlatNode>& arena, int parent, std::vector<AttrNode>& out) {
    for (std::size_t i = 0; i < arena.size(); ++i) {
        if (arena[i].parent != parent) continue;
        out.push_back(arena[i].node);
        assemble(arena, int(i), out.back().children);
    }
}

void place_table(const SourceStats& stats, const TableGraph& graph,
                 const std::vector<Table>& tables, const TableTree& parent,
                 const TableTree::Child& child, std::vector<FlatNode>& arena,
                 std::map<int, int>& node_of_class, std::set<int>& used,
                 std::set<std::string>& used_names) {
    const std::string& child_name = child.subtree.root;
    const Table& child_table = find_table(tables, child_name);

    std::vector<std::pair<std::string, std::string>> anchors = child.anchors;
    std::sort(anchors.begin(), anchors.end());

    // prefer a key anchor: it pins a unique child row and carries every column
    std::optional<std::pair<std::string, std::string>> key_anchor;
    if (stats.has(child_name))
        for (const auto& [pa, ca] : anchors)
            if (stats.at(child_name).is_key(ca)) {
                key_anchor = {pa, ca};
                break;
            }

    std::vector<std::string> shared_child_attrs;
    for (const auto& [pa, ca] : anchors) shared_child_attrs.push_back(ca);

    for (const auto& col : child_table.attributes) {
        std::string attr = normalize_value(col);
        int cls = graph.attr_class(child_name, attr);
        // no attribute twice: neither the same class nor the same name
        if (cls >= 0 && used.count(cls)) continue;
        if (used_names.count(attr)) continue;

        const Afd* afd = nullptr;
        if (!key_anchor && stats.has(child_name)) {
            for (std::size_t m = shared_child_attrs.size(); m >= 1 && !afd; --m)
                afd = best_afd(stats, child_name, shared_child_attrs, m, attr);
        }
        if (!key_anchor && !afd) continue;

        // hang under the node carrying the (class of the) anchor attribute
        std::string anchor_parent = key_anchor ? key_anchor->first : anchors.front().first;
        int anchor_cls = graph.attr_class(parent.root, anchor_parent);
        auto it = anchor_cls >= 0 ? node_of_class.find(anchor_cls) : node_of_class.end();
        int parent_idx = it == node_of_class.end() ? -1 : it->second;

        FlatNode fn;
        fn.parent = parent_idx;
        fn.node.table = child_name;
        fn.node.attribute = attr;
        fn.node.display = attr;
        fn.node.anchors = key_anchor ? std::vector<std::pair<std::string, std::string>>{*key_anchor}
                                     : anchors;
        fn.node.via_key = key_anchor.has_value();
        arena.push_back(fn);
        used_names.insert(attr);
        if (cls >= 0) {
            used.insert(cls);
            node_of_class[cls] = int(arena.size()) - 1;
        }
    }

    for (const auto& grand : child.subtree.children)
        place_table(stats, graph, tables, child.subtree, grand, arena, node_of_class, used,
                    used_names);
}

} // namespace

AttributeTree build_attribute_tree(const SourceStats& stats, const TableGraph& graph,
                                   const std::vector<Table>& tables, const TableTree& tree) {
    AttributeTree out;
    out.base_table = normalize_value(tree.root);
    const Table& base = find_table(tables, tree.root);

    std::vector<FlatNode> arena;
    std::map<int, int> node_of_class;
    std::set<int> used;
    std::set<std::string> used_names;
    for (const auto& col : base.attributes) {
        FlatNode fn;
        fn.parent = -1;
        fn.node.table = out.base_table;
        fn.node.attribute = normalize_value(col);
        fn.node.display = normalize_value(col);
        arena.push_back(fn);
        used_names.insert(normalize_value(col));
        int cls = graph.attr_class(out.base_table, col);
        if (cls >= 0) {
            used.insert(cls);
            node_of_class[cls] = int(arena.size()) - 1;
        }
    }
    for (const auto& child : tree.children)
        place_table(stats, graph, tables, tree, child, arena, node_of_class, used, used_names);

    assemble(arena, -1, out.roots);
    return out;
}

// --- constraint translation -------------------------------------------------

namespace {

struct Hop {
    std::string parent, child;
    std::pair<std::string, std::string> anchor; // (attr in parent, attr in child)
};

// Path of hops from the base to the nearest tree table housing `attr`
// natively; nullopt when no tree table houses it. An empty path means the
// base itself houses it.
std::optional<std::vector<Hop>> path_to_attr(const TableGraph& graph,
                                             const std::vector<Table>& tables,
                                             const TableTree& tree, const std::string& attr) {
    struct Item {
        const TableTree* node;
        std::vector<Hop> path;
    };
    std::vector<Item> frontier{{&tree, {}}};
    std::optional<std::vector<Hop>> best;
    while (!frontier.empty()) {
        std::vector<Item> next;
        for (const auto& item : frontier) {
            const Table& t = find_table(tables, item.node->root);
            for (const auto& col : t.attributes)
                if (graph.attr_matches(attr, t.name, col)) {
                    if (!best || item.path.size() < best->size()) best = item.path;
                    break;
                }
            for (const auto& c : item.node->children) {
                if (c.anchors.empty()) continue;
                auto anchors = c.anchors;
                std::sort(anchors.begin(), anchors.end());
                Item nx{&c.subtree, item.path};
                nx.path.push_back({item.node->root, c.subtree.root, anchors.front()});
                next.push_back(std::move(nx));
            }
        }
        if (best) return best;
        frontier = std::move(next);
    }
    return best;
}

// P(constraint satisfied) given that `in_attr` of path[depth].child has the
// concrete value `value`; multiplies conditionals hop by hop.
double chain_sat(const SourceStats& stats, const TableGraph& graph,
                 const std::vector<Table>& tables, const std::vector<Hop>& path,
                 std::size_t depth, const std::string& in_attr, const std::string& value,
                 const std::string& target_attr, const Constraint& c) {
    const std::string& table = path[depth].child;
    if (depth + 1 == path.size()) {
        if (graph.attr_matches(target_attr, table, in_attr) ||
            normalize_value(in_attr) == normalize_value(target_attr)) {
            Constraint native = c;
            native.attribute = in_attr;
            const Table& t = find_table(tables, table);
            int col = t.column(in_attr);
            return col >= 0 && evaluate_constraint_cell(t, col, value, native) ? 1.0 : 0.0;
        }
        std::string target;
        const Table& t = find_table(tables, table);
        for (const auto& col : t.attributes)
            if (graph.attr_matches(target_attr, table, col)) {
                target = normalize_value(col);
                break;
            }
        double p = 0.0;
        if (stats.has(table))
            for (const AssociationRule* r : rules_for(stats, table, {in_attr}, {value}, target))
                if (head_satisfies(r->head_value, c)) p += r->confidence();
        return p;
    }

    const auto& next_hop = path[depth + 1];
    const std::string& out_attr = next_hop.anchor.first;  // in this table
    const std::string& next_in = next_hop.anchor.second; // in next table
    int ca = graph.attr_class(table, in_attr), cb = graph.attr_class(table, out_attr);
    if (normalize_value(in_attr) == normalize_value(out_attr) || (ca >= 0 && ca == cb))
        return chain_sat(stats, graph, tables, path, depth + 1, next_in, value, target_attr, c);

    double p = 0.0;
    if (stats.has(table))
        for (const AssociationRule* r : rules_for(stats, table, {in_attr}, {value}, out_attr))
            p += r->confidence() * chain_sat(stats, graph, tables, path, depth + 1, next_in,
                                             r->head_value, target_attr, c);
    return p;
}

} // namespace

std::vector<double> translate_constraints(const SourceStats& stats, const TableGraph& graph,
                                          const std::vector<Table>& tables, const TableTree& tree,
                                          const std::vector<Constraint>& constraints,
                                          double epsilon) {
    const Table& base = find_table(tables, tree.root);
    std::vector<double> probs(base.tuple_count(), 1.0);

    for (const auto& c : constraints) {
        auto path = path_to_attr(graph, tables, tree, c.attribute);
        if (!path) {
            std::cerr << "warning: constraint attribute '" << c.attribute
                      << "' is unreachable from the selected tables; treating as epsilon\n";
            for (auto& p : probs) p *= epsilon;
            continue;
        }
        if (path->empty()) {
            // native: hard filter
            int col = -1;
            for (std::size_t i = 0; i < base.attributes.size(); ++i)
                if (graph.attr_matches(c.attribute, base.name, base.attributes[i])) {
                    col = int(i);
                    break;
                }
            Constraint native = c;
            native.attribute = base.attributes[col];
            for (std::size_t r = 0; r < base.rows.size(); ++r)
                if (!evaluate_constraint_cell(base, col, base.rows[r][col], native)) probs[r] = 0.0;
            continue;
        }
        int anchor_col = base.column((*path)[0].anchor.first);
        for (std::size_t r = 0; r < base.rows.size(); ++r) {
            if (probs[r] == 0.0) continue;
            const std::string& v = base.rows[r][anchor_col];
            if (is_missing(v)) {
                probs[r] = 0.0;
                continue;
            }
            probs[r] *= chain_sat(stats, graph, tables, *path, 0, (*path)[0].anchor.second, v,
                                  c.attribute, c);
        }
    }
    return probs;
}

std::vector<std::pair<int, double>> base_tuple_set(const std::vector<double>& row_probs,
                                                   double theta) {
    std::vector<std::pair<int, double>> out;
    for (std::size_t i = 0; i < row_probs.size(); ++i)
        if (row_probs[i] >= theta) out.emplace_back(int(i), row_probs[i]);
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    return out;
}

// --- expansion --------------------------------------------------------------

namespace {

struct ExpandCtx {
    std::map<int, std::string> class_value;           // class id -> raw value
    std::map<std::string, std::string> named_value;   // "table\x1fattr" -> raw value

    void set(const TableGraph& graph, const std::string& table, const std::string& attr,
             const std::string& value) {
        int cls = graph.attr_class(table, attr);
        if (cls >= 0) class_value[cls] = value;
        named_value[normalize_value(table) + '\x1f' + normalize_value(attr)] = value;
    }
    std::optional<std::string> get(const TableGraph& graph, const std::string& table,
                                   const std::string& attr) const {
        auto it = named_value.find(normalize_value(table) + '\x1f' + normalize_value(attr));
        if (it != named_value.end()) return it->second;
        int cls = graph.attr_class(table, attr);
        if (cls >= 0) {
            auto jt = class_value.find(cls);
            if (jt != class_value.end()) return jt->second;
        }
        return std::nullopt;
    }
};

std::optional<std::pair<std::string, double>> predict_value(const SourceStats& stats,
                                                            const TableGraph& graph,
                                                            const std::vector<Table>& tables,
                                                            const AttrNode& node,
                                                            const ExpandCtx& ctx, double delta) {
    const Table& t = find_table(tables, node.table);
    if (node.via_key) {
        const auto& [pa, ca] = node.anchors.front();
        auto v = ctx.get(graph, node.table, ca);
        if (!v || is_missing(*v)) return std::nullopt;
        int key_col = t.column(ca);
        int val_col = t.column(node.attribute);
        if (key_col < 0 || val_col < 0) return std::nullopt;
        std::string want = value_key(*v);
        for (const auto& row : t.rows)
            if (!is_missing(row[key_col]) && t.cell_key(key_col, row[key_col]) == want) {
                if (is_missing(row[val_col])) return std::nullopt;
                return std::make_pair(row[val_col], 1.0);
            }
        return std::nullopt;
    }

    if (!stats.has(node.table)) return std::nullopt;

    // evidence = anchor attributes whose value is known, in column order so
    // rule bodies line up with storage
    std::vector<std::pair<std::string, std::string>> evidence; // (attr, value)
    for (const auto& [pa, ca] : node.anchors) {
        auto v = ctx.get(graph, node.table, ca);
        if (v && !is_missing(*v)) evidence.emplace_back(normalize_value(ca), *v);
    }
    if (evidence.empty()) return std::nullopt;
    std::sort(evidence.begin(), evidence.end(),
              [&](const auto& a, const auto& b) { return t.column(a.first) < t.column(b.first); });

    std::vector<std::string> attrs;
    for (const auto& [a, v] : evidence) attrs.push_back(a);

    // best AFD per determining-set size, largest first
    std::vector<const Afd*> levels;
    for (std::size_t m = evidence.size(); m >= 1; --m)
        if (const Afd* afd = best_afd(stats, node.table, attrs, m, node.attribute))
            levels.push_back(afd);
    if (levels.empty()) return std::nullopt;

    // a larger set must beat the best smaller set by delta to be worth it
    std::size_t start = 0;
    while (start + 1 < levels.size()) {
        double smaller_best = 0.0;
        std::size_t arg = start + 1;
        for (std::size_t i = start + 1; i < levels.size(); ++i)
            if (levels[i]->confidence > smaller_best) {
                smaller_best = levels[i]->confidence;
                arg = i;
            }
        if (levels[start]->confidence >= smaller_best + delta) break;
        start = arg;
    }

    for (std::size_t i = start; i < levels.size(); ++i) {
        std::set<std::string> det(levels[i]->determining.begin(), levels[i]->determining.end());
        std::vector<std::string> body_attrs, body_values;
        for (const auto& [a, v] : evidence)
            if (det.count(a)) {
                body_attrs.push_back(a);
                body_values.push_back(v);
            }
        auto rules = rules_for(stats, node.table, body_attrs, body_values, node.attribute);
        if (rules.empty()) continue; // the exact value combination is absent: fall back
        return std::make_pair(rules.front()->head_value, rules.front()->confidence());
    }
    return std::nullopt;
}

void expand_nodes(const SourceStats& stats, const TableGraph& graph,
                  const std::vector<Table>& tables, const std::vector<AttrNode>& nodes,
                  ExpandCtx& ctx, const ExpansionConfig& config, ExpandedTuple& out) {
    for (const auto& node : nodes) {
        auto predicted = predict_value(stats, graph, tables, node, ctx, config.delta);
        if (!predicted) continue; // unreachable: leave absent, skip dependents
        ctx.set(graph, node.table, node.attribute, predicted->first);
        out.values.push_back(
            {node.display, predicted->first, predicted->second, node.table, true});
        expand_nodes(stats, graph, tables, node.children, ctx, config, out);
    }
}

} // namespace

ExpandedTuple expand_tuple(const SourceStats& stats, const TableGraph& graph,
                           const std::vector<Table>& tables, const TableTree& tree,
                           const AttributeTree& attr_tree, int base_row,
                           const ExpansionConfig& config) {
    const Table& base = find_table(tables, attr_tree.base_table);
    const auto& row = base.rows.at(base_row);

    ExpandedTuple out;
    ExpandCtx ctx;
    for (const auto& node : attr_tree.roots) {
        int col = base.column(node.attribute);
        const std::string& cell = row[col];
        out.values.push_back({node.display, cell, 1.0, node.table, false});
        if (!is_missing(cell)) ctx.set(graph, node.table, node.attribute, cell);
    }
    for (const auto& node : attr_tree.roots)
        if (ctx.get(graph, node.table, node.attribute))
            expand_nodes(stats, graph, tables, node.children, ctx, config, out);

    if (config.width) {
        // keep only the w predicted attributes that are easiest to predict
        std::vector<std::pair<double, std::string>> ranked;
        for (const auto& v : out.values)
            if (v.predicted)
                ranked.emplace_back(-pred_accuracy(stats, graph, tree, v.display), v.display);
        std::sort(ranked.begin(), ranked.end());
        std::set<std::string> keep;
        for (std::size_t i = 0; i < ranked.size() && i < *config.width; ++i)
            keep.insert(ranked[i].second);
        std::vector<ExpandedValue> kept;
        for (auto& v : out.values)
            if (!v.predicted || keep.count(v.display)) kept.push_back(std::move(v));
        out.values = std::move(kept);
    }

    out.tuple_confidence = 1.0;
    for (const auto& v : out.values)
        if (v.predicted) out.tuple_confidence *= v.confidence;
    return out;
}

std::vector<ExpandedTuple> answer_query(const std::vector<Table>& tables, const SourceStats& stats,
                                        const TableGraph& graph, const Query& query,
                                        const SelectionConfig& sel_config,
                                        const ExpansionConfig& exp_config,
                                        SelectionExplain* explain, TableTree* tree_out) {
    TableTree tree = select_tree(stats, graph, tables, query, sel_config, explain);
    if (tree_out) *tree_out = tree;
    AttributeTree attr_tree = build_attribute_tree(stats, graph, tables, tree);
    auto probs =
        translate_constraints(stats, graph, tables, tree, query.constraints, sel_config.epsilon);
    auto base = base_tuple_set(probs, exp_config.theta);

    std::vector<ExpandedTuple> out(base.size());
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < (long long)base.size(); ++i) {
        out[i] = expand_tuple(stats, graph, tables, tree, attr_tree, base[i].first, exp_config);
        out[i].base_probability = base[i].second;
    }
    std::stable_sort(out.begin(), out.end(), [](const ExpandedTuple& a, const ExpandedTuple& b) {
        return a.tuple_confidence > b.tuple_confidence;
    });
    return out;
}

} // namespace smartint
