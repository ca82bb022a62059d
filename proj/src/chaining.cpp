#include "smartint/chaining.hpp"

#include <algorithm>

#include "smartint/selection.hpp"

namespace smartint {

namespace {

Afd identity_afd(const std::string& table, const std::string& attr) {
    Afd a;
    a.table = normalize_value(table);
    a.determining = {attr};
    a.determined = attr;
    a.confidence = 1.0;
    return a;
}

} // namespace

AfdChain compose(const Afd& first, const Afd& second, const AttributeMapping& mapping) {
    AttributeRef out{normalize_value(first.table), normalize_value(first.determined)};
    std::set<std::string> second_det;
    for (const auto& d : second.determining) second_det.insert(normalize_value(d));

    for (const auto& [a, b] : mapping.pairs) {
        AttributeRef x{normalize_value(a.table), normalize_value(a.attribute)};
        AttributeRef y{normalize_value(b.table), normalize_value(b.attribute)};
        for (int flip = 0; flip < 2; ++flip) {
            const AttributeRef& from = flip ? y : x;
            const AttributeRef& to = flip ? x : y;
            if (from == out && to.table == normalize_value(second.table) &&
                second_det.count(to.attribute)) {
                AfdChain chain;
                chain.links.push_back({first, {from, to}});
                chain.links.push_back({second, {to, to}});
                chain.cumulative_confidence = first.confidence * second.confidence;
                chain.tables = {normalize_value(first.table), normalize_value(second.table)};
                return chain;
            }
        }
    }
    throw CompositionError("no attribute mapping anchors '" + first.table + "." +
                           first.determined + "' to the determining set of the AFD in '" +
                           second.table + "'");
}

std::optional<double> link_confidence(const SourceStats& stats, const TableGraph& graph,
                                      const std::string& table, const std::string& known_attr,
                                      const std::string& target_attr) {
    std::string t = normalize_value(table);
    std::string from = normalize_value(known_attr);
    std::string to = normalize_value(target_attr);
    if (from == to) return 1.0;
    int ca = graph.attr_class(t, from), cb = graph.attr_class(t, to);
    if (ca >= 0 && ca == cb) return 1.0;
    if (stats.has(t) && stats.at(t).is_key(from)) return 1.0;
    if (stats.has(t))
        if (const Afd* afd = best_afd(stats, t, {from}, 1, to)) return afd->confidence;
    return std::nullopt;
}

std::optional<AfdChain> best_chain(const SourceStats& stats, const TableGraph& graph,
                                   const AttributeRef& from, const AttributeRef& to,
                                   std::size_t max_hops) {
    std::string src = normalize_value(from.table), dst = normalize_value(to.table);
    if (src == dst) {
        if (auto conf = link_confidence(stats, graph, src, from.attribute, to.attribute)) {
            AfdChain chain;
            chain.cumulative_confidence = *conf;
            chain.tables = {src};
            if (normalize_value(from.attribute) != normalize_value(to.attribute))
                chain.links.push_back({identity_afd(src, to.attribute),
                                       {{src, normalize_value(from.attribute)},
                                        {src, normalize_value(to.attribute)}}});
            return chain;
        }
        return std::nullopt;
    }

    std::optional<AfdChain> best;
    std::vector<std::string> path{src};

    // DFS over simple table paths; per hop pick the best anchor pair.
    auto consider = [&](const AfdChain& cand) {
        if (!best || cand.cumulative_confidence > best->cumulative_confidence ||
            (cand.cumulative_confidence == best->cumulative_confidence &&
             cand.tables < best->tables))
            best = cand;
    };

    struct Frame {
        std::string known_attr; // inside path.back()
        AfdChain chain;
    };

    auto dfs = [&](auto&& self, const Frame& f) -> void {
        const std::string here = path.back(); // copy: push_back below may reallocate
        if (here == dst) {
            if (auto conf = link_confidence(stats, graph, here, f.known_attr, to.attribute)) {
                AfdChain done = f.chain;
                done.cumulative_confidence *= *conf;
                done.tables = path;
                consider(done);
            }
            return;
        }
        if (path.size() > max_hops) return;
        for (const auto& next : graph.neighbors(here)) {
            if (std::find(path.begin(), path.end(), next) != path.end()) continue;
            const auto* edge = graph.edge_between(here, next);
            if (!edge) continue;
            for (const auto& [ea, eb] : edge->attr_pairs) {
                std::string out_attr = (edge->a == here) ? ea : eb;
                std::string in_attr = (edge->a == here) ? eb : ea;
                auto conf = link_confidence(stats, graph, here, f.known_attr, out_attr);
                if (!conf) continue;
                Frame g;
                g.known_attr = in_attr;
                g.chain = f.chain;
                g.chain.cumulative_confidence *= *conf;
                Afd link = identity_afd(here, out_attr);
                if (const Afd* afd = stats.has(here)
                                         ? best_afd(stats, here, {f.known_attr}, 1, out_attr)
                                         : nullptr)
                    link = *afd;
                link.confidence = *conf;
                g.chain.links.push_back({link, {{here, out_attr}, {next, in_attr}}});
                path.push_back(next);
                self(self, g);
                path.pop_back();
            }
        }
    };

    Frame start;
    start.known_attr = normalize_value(from.attribute);
    dfs(dfs, start);
    return best;
}

namespace {

struct TreePath {
    const TableTree* node;
    std::vector<const TableTree::Child*> hops; // root -> node
};

void collect_paths(const TableTree& node, std::vector<const TableTree::Child*>& hops,
                   std::vector<TreePath>& out) {
    out.push_back({&node, hops});
    for (const auto& c : node.children) {
        hops.push_back(&c);
        collect_paths(c.subtree, hops, out);
        hops.pop_back();
    }
}

} // namespace

double pred_accuracy(const SourceStats& stats, const TableGraph& graph, const TableTree& tree,
                     const std::string& attribute) {
    std::vector<TreePath> paths;
    std::vector<const TableTree::Child*> hops;
    collect_paths(tree, hops, paths);

    double best = 0.0;
    for (const auto& p : paths) {
        if (!stats.has(p.node->root)) continue;
        const std::string& table = p.node->root;
        // the node must house the attribute natively
        std::string target;
        bool found = false;
        for (const auto& [ref, cls] : graph.class_of) {
            if (ref.table != table) continue;
            if (graph.attr_matches(attribute, table, ref.attribute)) {
                target = ref.attribute;
                found = true;
                break;
            }
        }
        if (!found) continue;

        if (p.hops.empty()) return 1.0; // base table

        double conf = 1.0;
        bool ok = true;
        std::string parent = tree.root;
        std::string known; // attribute known in the current table; empty = whole row known
        for (std::size_t i = 0; i < p.hops.size() && ok; ++i) {
            const auto& hop = *p.hops[i];
            if (hop.anchors.empty()) {
                ok = false;
                break;
            }
            // pick the best anchor pair for this hop
            double hop_best = -1.0;
            std::string next_known;
            for (const auto& [pa, caa] : hop.anchors) {
                double c = 1.0;
                if (!known.empty()) {
                    auto lc = link_confidence(stats, graph, parent, known, pa);
                    if (!lc) continue;
                    c = *lc;
                }
                if (c > hop_best) {
                    hop_best = c;
                    next_known = caa;
                }
            }
            if (hop_best < 0) {
                ok = false;
                break;
            }
            conf *= hop_best;
            known = next_known;
            parent = hop.subtree.root;
        }
        if (!ok) continue;
        auto final_link = link_confidence(stats, graph, table, known, target);
        if (!final_link) continue;
        conf *= *final_link;
        best = std::max(best, conf);
    }
    return best;
}

} // namespace smartint
