#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "smartint/stats.hpp"

using namespace smartint;

namespace {

const std::string kFixtures = SMARTINT_FIXTURES;

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

SourceStats cars_stats(std::vector<Table>* tables_out = nullptr) {
    auto tables = load_tables(kFixtures + "/cars");
    auto mapping = parse_mapping_file(kFixtures + "/cars/mapping.txt");
    auto graph = build_graph(tables, mapping);
    auto stats = build_stats(tables, graph, MinerConfig{});
    if (tables_out) *tables_out = std::move(tables);
    return stats;
}

} // namespace

TEST_CASE("priors on the car-db fixture") {
    Table t = load_csv(kFixtures + "/cardb.csv");
    auto graph = build_graph({t}, AttributeMapping{});
    auto stats = build_stats({t}, graph, MinerConfig{});
    CHECK(prior(stats, "cardb", "make", "Honda") == doctest::Approx(5.0 / 8.0).epsilon(1e-15));
    CHECK(prior(stats, "cardb", "make", "toyota") == doctest::Approx(3.0 / 8.0).epsilon(1e-15));
    CHECK(prior(stats, "cardb", "make", "ford") == 0.0);
    // priors over a column form a distribution
    double sum = 0;
    for (const auto& v : {"Accord", "Civic", "Sequoia", "Camry"})
        sum += prior(stats, "cardb", "model", v);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("conditional probabilities come from stored rules") {
    auto stats = cars_stats();
    CHECK(conditional(stats, "engine", {"cylinders", "4"}, {"mdl", "Civic"}) == 1.0);
    CHECK(conditional(stats, "engine", {"cylinders", "4"}, {"mdl", "Camry"}) == 0.0);
    CHECK(conditional(stats, "engine", {"cylinders", "6"}, {"mdl", "Accord"}) == 1.0);
    // value matching is by key, not raw spelling
    CHECK(conditional(stats, "engine", {"cylinders", "4.0"}, {"mdl", " CIVIC "}) == 1.0);
}

TEST_CASE("rules_for returns best-first candidates") {
    auto stats = cars_stats();
    auto rules = rules_for(stats, "engine", {"mdl"}, {"Corolla"}, "engine");
    REQUIRE(rules.size() == 2);
    // tie at confidence 0.5 broken by head value ascending
    CHECK(rules[0]->head_value == "155 hp");
    CHECK(rules[1]->head_value == "F23A1");
    CHECK(rules[0]->confidence() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(rules_for(stats, "engine", {"mdl"}, {"Highlander"}, "engine").empty());
}

TEST_CASE("best_afd picks the strongest applicable dependency") {
    auto stats = cars_stats();
    const Afd* afd = best_afd(stats, "engine", {"mdl"}, 1, "cylinders");
    REQUIRE(afd != nullptr);
    CHECK(afd->determining == std::vector<std::string>{"mdl"});
    CHECK(afd->confidence == 1.0);
    CHECK(best_afd(stats, "engine", {"engine"}, 2, "cylinders") == nullptr);
}

TEST_CASE("key flags and shared attributes") {
    auto stats = cars_stats();
    CHECK(stats.at("dealers").is_key("dealer")); // declared primary key
    CHECK_FALSE(stats.at("engine").is_key("mdl"));
    const auto& shared = stats.at("reviews").shared_attrs;
    CHECK(std::count(shared.begin(), shared.end(), "model") == 1);
    CHECK(std::count(shared.begin(), shared.end(), "dealer") == 1);
    CHECK(std::count(shared.begin(), shared.end(), "review") == 0);
}

TEST_CASE("stats survive a save/load round trip") {
    auto stats = cars_stats();
    auto p = temp_file("smartint_stats_rt.txt");
    save_stats(stats, p.string());
    SourceStats back = load_stats(p.string());

    REQUIRE(back.per_table.size() == stats.per_table.size());
    for (const auto& [name, ts] : stats.per_table) {
        const TableStats& bt = back.at(name);
        CHECK(bt.tuple_count == ts.tuple_count);
        REQUIRE(bt.afds.size() == ts.afds.size());
        for (std::size_t i = 0; i < ts.afds.size(); ++i) {
            CHECK(bt.afds[i].determining == ts.afds[i].determining);
            CHECK(bt.afds[i].determined == ts.afds[i].determined);
            CHECK(bt.afds[i].confidence == doctest::Approx(ts.afds[i].confidence).epsilon(1e-12));
        }
        REQUIRE(bt.rules.size() == ts.rules.size());
        CHECK(bt.priors == ts.priors);
        CHECK(bt.key_attrs == ts.key_attrs);
        CHECK(bt.shared_attrs == ts.shared_attrs);
    }
}

TEST_CASE("saving twice is byte-identical") {
    auto stats = cars_stats();
    auto p1 = temp_file("smartint_stats_a.txt");
    auto p2 = temp_file("smartint_stats_b.txt");
    save_stats(stats, p1.string());
    save_stats(load_stats(p1.string()), p2.string());
    CHECK(slurp(p1) == slurp(p2));
}

TEST_CASE("malformed stats files are rejected") {
    auto stats = cars_stats();
    auto p = temp_file("smartint_stats_bad.txt");
    save_stats(stats, p.string());
    std::string body = slurp(p);

    SUBCASE("truncated file") {
        std::ofstream out(p, std::ios::binary);
        out << body.substr(0, body.size() / 2);
        out.close();
        CHECK_THROWS_AS(load_stats(p.string()), StatsFormatError);
    }
    SUBCASE("wrong version") {
        std::ofstream out(p, std::ios::binary);
        out << "smartint-stats 999\n" << body.substr(body.find('\n') + 1);
        out.close();
        CHECK_THROWS_AS(load_stats(p.string()), StatsFormatError);
    }
    SUBCASE("not a stats file") {
        std::ofstream out(p, std::ios::binary);
        out << "hello world\n";
        out.close();
        CHECK_THROWS_AS(load_stats(p.string()), StatsFormatError);
    }
    SUBCASE("missing file") { CHECK_THROWS(load_stats("/nonexistent/stats.txt")); }
}

TEST_CASE("lookups on unknown tables raise LookupError") {
    auto stats = cars_stats();
    CHECK_THROWS_AS(stats.at("nope"), LookupError);
    CHECK(stats.has("engine"));
    CHECK_FALSE(stats.has("nope"));
}
