#include "smartint/mapping.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

namespace smartint {

const Table& find_table(const std::vector<Table>& tables, const std::string& name) {
    std::string key = normalize_value(name);
    for (const auto& t : tables)
        if (normalize_value(t.name) == key) return t;
    throw ResolutionError("unknown table '" + name + "'");
}

namespace {

AttributeRef parse_ref(const std::string& tok, const std::string& path, int line) {
    auto dot = tok.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == tok.size())
        throw ResolutionError(path + ":" + std::to_string(line) +
                              ": expected table.attr, got '" + tok + "'");
    return {normalize_value(tok.substr(0, dot)), normalize_value(tok.substr(dot + 1))};
}

std::string strip(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

} // namespace

AttributeMapping parse_mapping_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open mapping file " + path);
    AttributeMapping m;
    std::string line;
    int line_no = 0;
    enum { None, Matches, PkFk } section = None;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = strip(line);
        if (line.empty()) continue;
        std::string low = normalize_value(line);
        if (low == "matches:") {
            section = Matches;
            continue;
        }
        if (low == "pkfk:") {
            section = PkFk;
            continue;
        }
        if (section == Matches) {
            auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ResolutionError(path + ":" + std::to_string(line_no) +
                                      ": expected 'table.attr = table.attr'");
            auto a = parse_ref(strip(line.substr(0, eq)), path, line_no);
            auto b = parse_ref(strip(line.substr(eq + 1)), path, line_no);
            if (a.table == b.table)
                throw ResolutionError(path + ":" + std::to_string(line_no) +
                                      ": a match may not pair two attributes of one table");
            m.pairs.emplace_back(a, b);
        } else if (section == PkFk) {
            auto arrow = line.find("->");
            if (arrow == std::string::npos)
                throw ResolutionError(path + ":" + std::to_string(line_no) +
                                      ": expected 'table.attr -> table.attr'");
            auto a = parse_ref(strip(line.substr(0, arrow)), path, line_no);
            auto b = parse_ref(strip(line.substr(arrow + 2)), path, line_no);
            m.pk_fk_edges.emplace_back(a, b);
        } else {
            throw ResolutionError(path + ":" + std::to_string(line_no) +
                                  ": line outside of a 'matches:' or 'pkfk:' section");
        }
    }
    return m;
}

bool TableGraph::has_node(const std::string& t) const {
    return std::find(nodes.begin(), nodes.end(), normalize_value(t)) != nodes.end();
}

const TableGraph::Edge* TableGraph::edge_between(const std::string& x,
                                                 const std::string& y) const {
    std::string a = normalize_value(x), b = normalize_value(y);
    if (a > b) std::swap(a, b);
    for (const auto& e : undirected)
        if (e.a == a && e.b == b) return &e;
    return nullptr;
}

std::vector<std::string> TableGraph::neighbors(const std::string& t) const {
    std::string key = normalize_value(t);
    std::vector<std::string> out;
    for (const auto& e : undirected) {
        if (e.a == key) out.push_back(e.b);
        if (e.b == key) out.push_back(e.a);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

int TableGraph::attr_class(const std::string& table, const std::string& attr) const {
    auto it = class_of.find({normalize_value(table), normalize_value(attr)});
    return it == class_of.end() ? -1 : it->second;
}

bool TableGraph::attr_matches(const std::string& name, const std::string& table,
                              const std::string& attr) const {
    std::string key = normalize_value(name);
    if (key == normalize_value(attr)) return true;
    int cls = attr_class(table, attr);
    return cls >= 0 && class_names[cls].count(key) > 0;
}

std::vector<std::string> TableGraph::shared_attributes(const std::string& table) const {
    std::string key = normalize_value(table);
    std::set<std::string> out;
    for (const auto& [ref, cls] : class_of) {
        if (ref.table != key) continue;
        for (const auto& member : class_members[cls])
            if (member.table != key) {
                out.insert(ref.attribute);
                break;
            }
    }
    return {out.begin(), out.end()};
}

bool TableGraph::pk_declared(const std::string& table, const std::string& attr) const {
    AttributeRef ref{normalize_value(table), normalize_value(attr)};
    for (const auto& [fk, pk] : directed)
        if (pk == ref) return true;
    return false;
}

TableGraph build_graph(const std::vector<Table>& tables, const AttributeMapping& mapping) {
    TableGraph g;
    for (const auto& t : tables) g.nodes.push_back(normalize_value(t.name));
    std::sort(g.nodes.begin(), g.nodes.end());

    auto resolve = [&](const AttributeRef& r) -> AttributeRef {
        const Table& t = find_table(tables, r.table);
        int col = t.column(r.attribute);
        if (col < 0)
            throw ResolutionError("mapping refers to unknown attribute '" + r.table + "." +
                                  r.attribute + "'");
        return {normalize_value(t.name), normalize_value(t.attributes[col])};
    };

    // All (table, attr) pairs get a slot; match pairs union them up.
    std::vector<AttributeRef> refs;
    std::map<AttributeRef, int> index;
    for (const auto& t : tables)
        for (const auto& a : t.attributes) {
            AttributeRef r{normalize_value(t.name), normalize_value(a)};
            index.emplace(r, static_cast<int>(refs.size()));
            refs.push_back(r);
        }

    UnionFind uf(refs.size());
    for (const auto& [ra, rb] : mapping.pairs) {
        auto a = resolve(ra), b = resolve(rb);
        uf.unite(index.at(a), index.at(b));
    }
    for (const auto& [fk, pk] : mapping.pk_fk_edges) {
        auto a = resolve(fk), b = resolve(pk);
        uf.unite(index.at(a), index.at(b));
        g.directed.emplace_back(a, b);
    }
    std::sort(g.directed.begin(), g.directed.end());
    g.directed.erase(std::unique(g.directed.begin(), g.directed.end()), g.directed.end());

    std::map<int, int> root_to_class;
    for (std::size_t i = 0; i < refs.size(); ++i) {
        int root = uf.find(static_cast<int>(i));
        auto [it, fresh] = root_to_class.emplace(root, static_cast<int>(g.class_names.size()));
        if (fresh) {
            g.class_names.emplace_back();
            g.class_members.emplace_back();
        }
        g.class_of[refs[i]] = it->second;
        g.class_names[it->second].insert(refs[i].attribute);
        g.class_members[it->second].push_back(refs[i]);
    }

    // An undirected edge per table pair connected by at least one class.
    std::map<std::pair<std::string, std::string>, std::vector<std::pair<std::string, std::string>>>
        edges;
    for (const auto& members : g.class_members) {
        for (std::size_t i = 0; i < members.size(); ++i)
            for (std::size_t j = i + 1; j < members.size(); ++j) {
                auto a = members[i], b = members[j];
                if (a.table == b.table) continue;
                if (a.table > b.table) std::swap(a, b);
                edges[{a.table, b.table}].emplace_back(a.attribute, b.attribute);
            }
    }
    for (auto& [key, attr_pairs] : edges) {
        std::sort(attr_pairs.begin(), attr_pairs.end());
        attr_pairs.erase(std::unique(attr_pairs.begin(), attr_pairs.end()), attr_pairs.end());
        g.undirected.push_back({key.first, key.second, attr_pairs});
    }
    return g;
}

} // namespace smartint
