#include <doctest.h>

#include <algorithm>

#include "smartint/selection.hpp"
#include "smartint/queryparse.hpp"

using namespace smartint;

namespace {

const std::string kFixtures = SMARTINT_FIXTURES;
const char* kQ1 = "SELECT make, model WHERE price < $15000 AND cylinders = '4'";

struct CarsFixture {
    std::vector<Table> tables;
    TableGraph graph;
    SourceStats stats;
    CarsFixture() {
        tables = load_tables(kFixtures + "/cars");
        graph = build_graph(tables, parse_mapping_file(kFixtures + "/cars/mapping.txt"));
        stats = build_stats(tables, graph, MinerConfig{});
    }
    const Table& table(const std::string& n) const { return find_table(tables, n); }
};

} // namespace

TEST_CASE("query parsing") {
    Query q = parse_query(kQ1);
    CHECK_FALSE(q.wildcard);
    CHECK(q.projected == std::vector<std::string>{"make", "model"});
    REQUIRE(q.constraints.size() == 2);
    CHECK(q.constraints[0].attribute == "price");
    CHECK(q.constraints[0].op == Constraint::Op::Lt);
    CHECK(q.constraints[0].value == "15000"); // currency sign stripped
    CHECK(q.constraints[1].attribute == "cylinders");
    CHECK(q.constraints[1].op == Constraint::Op::Eq);
    CHECK(q.constraints[1].value == "4"); // quotes stripped

    CHECK(parse_query("SELECT * WHERE a >= 3").wildcard);
    CHECK(parse_query("select x").constraints.empty());
    CHECK_THROWS_AS(parse_query("SELECT"), QueryParseError);
    CHECK_THROWS_AS(parse_query("SELECT a WHERE b ~ 3"), QueryParseError);
    CHECK(query_to_string(parse_query(kQ1)) ==
          "SELECT make, model WHERE price < 15000 AND cylinders = 4");
}

TEST_CASE("constraint probability from native priors") {
    CarsFixture fx;
    Constraint c{"price", Constraint::Op::Lt, "15000"};
    CHECK(constraint_probability(fx.stats, fx.graph, fx.table("cars"), c, 1e-6) ==
          doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("constraint probability one hop away uses conditionals") {
    CarsFixture fx;
    Constraint c{"cylinders", Constraint::Op::Eq, "4"};
    // Accord 0, Civic 1, Camry 0, Corolla 1 -> 2 of 4 rows
    CHECK(constraint_probability(fx.stats, fx.graph, fx.table("cars"), c, 1e-6) ==
          doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("unreachable constraints fall to epsilon") {
    CarsFixture fx;
    Constraint c{"price", Constraint::Op::Lt, "15000"};
    // engine has no price column and no rules towards one
    CHECK(constraint_probability(fx.stats, fx.graph, fx.table("engine"), c, 1e-6) ==
          doctest::Approx(1e-6).epsilon(1e-9));
}

TEST_CASE("conformance multiplies the constraint probabilities") {
    CarsFixture fx;
    Query q = parse_query(kQ1);
    CHECK(conformance_probability(fx.stats, fx.graph, fx.table("cars"), q.constraints, 1e-6) ==
          doctest::Approx(0.375).epsilon(1e-12));
}

TEST_CASE("table relevance is coverage x conformance x tuple count") {
    CarsFixture fx;
    Query q = parse_query(kQ1);
    // (2/2 projected) * 0.375 * 4 tuples
    CHECK(table_relevance(fx.stats, fx.graph, fx.table("cars"), fx.tables, q, 1e-6) ==
          doctest::Approx(1.5).epsilon(1e-12));
    // engine covers neither projected attribute at full width and conforms at ~eps
    CHECK(table_relevance(fx.stats, fx.graph, fx.table("engine"), fx.tables, q, 1e-6) < 0.01);
}

TEST_CASE("tree relevance adds prediction accuracy for missing attributes") {
    CarsFixture fx;
    Query q = parse_query("SELECT make, cylinders WHERE price < 15000");

    TableTree lone;
    lone.root = "cars";
    double base = table_relevance(fx.stats, fx.graph, fx.table("cars"), fx.tables, q, 1e-6);
    CHECK(base == doctest::Approx(1.5).epsilon(1e-12)); // (1/2) * 0.75 * 4
    CHECK(tree_relevance(fx.stats, fx.graph, lone, fx.tables, q, 1e-6) ==
          doctest::Approx(base).epsilon(1e-12));

    TableTree engine_t;
    engine_t.root = "engine";
    TableTree with_engine = lone;
    with_engine.children.push_back({{{"model_name", "mdl"}}, engine_t});
    // cylinders now predictable with accuracy 1.0
    CHECK(tree_relevance(fx.stats, fx.graph, with_engine, fx.tables, q, 1e-6) ==
          doctest::Approx(base + 1.0).epsilon(1e-12));
}

TEST_CASE("effective projection expands the wildcard to one name per class") {
    CarsFixture fx;
    auto proj = effective_projection(fx.graph, fx.tables, parse_query(kQ1));
    CHECK(proj == std::vector<std::string>{"make", "model"});

    auto all = effective_projection(fx.graph, fx.tables, parse_query("SELECT *"));
    // 12 columns over 4 tables collapse into 9 attribute classes
    CHECK(all.size() == 9);
    for (const auto& name : {"make", "price", "cylinders", "review", "address"})
        CHECK(std::count(all.begin(), all.end(), name) == 1);
    // the model class appears exactly once, under one representative
    int model_names = 0;
    for (const auto& name : all)
        if (fx.graph.attr_matches("model", "reviews", "model") &&
            (name == "model" || name == "model_name" || name == "mdl"))
            ++model_names;
    CHECK(model_names == 1);
}

TEST_CASE("select_tree grows the cars-rooted tree for the running query") {
    CarsFixture fx;
    SelectionExplain explain;
    TableTree tree = select_tree(fx.stats, fx.graph, fx.tables, parse_query(kQ1),
                                 SelectionConfig{}, &explain);
    CHECK(tree.root == "cars");
    CHECK(tree.size() == 4);
    auto all = tree.all_tables();
    std::sort(all.begin(), all.end());
    CHECK(all == std::vector<std::string>{"cars", "dealers", "engine", "reviews"});
    CHECK(tree.relevance == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(explain.exhaustive);

    // shape: engine and reviews hang off cars; dealers hangs off reviews
    REQUIRE(tree.children.size() == 2);
    std::map<std::string, const TableTree::Child*> kids;
    for (const auto& c : tree.children) kids[c.subtree.root] = &c;
    REQUIRE(kids.count("engine"));
    REQUIRE(kids.count("reviews"));
    CHECK(kids["engine"]->anchors ==
          std::vector<std::pair<std::string, std::string>>{{"model_name", "mdl"}});
    REQUIRE(kids["reviews"]->subtree.children.size() == 1);
    CHECK(kids["reviews"]->subtree.children[0].subtree.root == "dealers");
}

TEST_CASE("k bounds the tree size") {
    CarsFixture fx;
    SelectionConfig cfg;
    cfg.k = 1;
    TableTree tree = select_tree(fx.stats, fx.graph, fx.tables, parse_query(kQ1), cfg);
    CHECK(tree.root == "cars");
    CHECK(tree.size() == 1);

    cfg.k = 2;
    tree = select_tree(fx.stats, fx.graph, fx.tables, parse_query(kQ1), cfg);
    CHECK(tree.size() == 2);
    CHECK(tree.root == "cars");
}

TEST_CASE("an unsatisfiable threshold reports the scores it saw") {
    CarsFixture fx;
    SelectionConfig cfg;
    cfg.tau = 100.0;
    try {
        select_tree(fx.stats, fx.graph, fx.tables, parse_query(kQ1), cfg);
        FAIL("expected SelectionError");
    } catch (const SelectionError& e) {
        CHECK(e.table_scores.size() == 4);
        double best = 0;
        for (const auto& [t, r] : e.table_scores) best = std::max(best, r);
        CHECK(best == doctest::Approx(1.5).epsilon(1e-12));
    }
}
