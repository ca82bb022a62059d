#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "smartint/mapping.hpp"
#include "smartint/miner.hpp"

using namespace smartint;

namespace {

const std::string kFixtures = SMARTINT_FIXTURES;

Table load_cardb() { return load_csv(kFixtures + "/cardb.csv"); }

// Deterministic small random table: up to 6 attributes, up to 100 rows,
// low-cardinality categorical values, no missing cells.
Table random_table(std::mt19937& rng) {
    std::uniform_int_distribution<int> n_attrs_d(2, 6), n_rows_d(1, 100), card_d(1, 6);
    Table t;
    t.name = "rnd";
    int n_attrs = n_attrs_d(rng), n_rows = n_rows_d(rng);
    std::vector<int> card;
    for (int c = 0; c < n_attrs; ++c) {
        t.attributes.push_back("a" + std::to_string(c));
        card.push_back(card_d(rng));
    }
    for (int r = 0; r < n_rows; ++r) {
        std::vector<std::string> row;
        for (int c = 0; c < n_attrs; ++c) {
            std::uniform_int_distribution<int> v(0, card[c] - 1);
            row.push_back("v" + std::to_string(v(rng)));
        }
        t.rows.push_back(std::move(row));
    }
    t.numeric.assign(n_attrs, false);
    return t;
}

// Independent reference miner: plain subset enumeration, map-based grouping.
MiningResult brute_force_mine(const Table& t, const MinerConfig& cfg) {
    MiningResult out;
    std::size_t n_attrs = t.attributes.size();
    std::size_t n = t.tuple_count();
    if (n == 0) return out;

    for (unsigned mask = 1; mask < (1u << n_attrs); ++mask) {
        std::vector<int> body;
        for (std::size_t c = 0; c < n_attrs; ++c)
            if (mask & (1u << c)) body.push_back(int(c));
        if (body.size() > cfg.max_det_set_size) continue;

        // group rows by the body value keys, remember a representative row
        std::map<std::vector<std::string>, std::vector<int>> groups;
        for (std::size_t r = 0; r < n; ++r) {
            std::vector<std::string> key;
            for (int c : body) key.push_back(t.cell_key(c, t.rows[r][c]));
            groups[key].push_back(int(r));
        }

        double spec = 0.0;
        if (n > 1) {
            double h = 0.0;
            for (const auto& [k, rows] : groups) {
                double p = double(rows.size()) / double(n);
                h -= p * std::log2(p);
            }
            spec = h / std::log2(double(n));
        }
        if (spec > cfg.max_specificity) continue;

        std::vector<std::string> body_attrs;
        for (int c : body) body_attrs.push_back(t.attributes[c]);

        for (std::size_t head = 0; head < n_attrs; ++head) {
            if (mask & (1u << head)) continue;
            long long conf_num = 0;
            for (const auto& [k, rows] : groups) {
                std::map<std::string, long long> head_counts;
                std::map<std::string, std::string> head_rep;
                for (int r : rows) {
                    std::string hk = t.cell_key(int(head), t.rows[r][head]);
                    if (!head_counts.count(hk)) head_rep[hk] = t.rows[r][head];
                    ++head_counts[hk];
                }
                long long best = 0;
                for (const auto& [hk, cnt] : head_counts) {
                    best = std::max(best, cnt);
                    AssociationRule rule;
                    rule.table = normalize_value(t.name);
                    rule.body_attrs = body_attrs;
                    for (int c : body) rule.body_values.push_back(t.rows[rows[0]][c]);
                    rule.head_attr = t.attributes[head];
                    rule.head_value = head_rep[hk];
                    rule.body_count = (long long)rows.size();
                    rule.joint_count = cnt;
                    rule.total = (long long)n;
                    out.rules.push_back(std::move(rule));
                }
                conf_num += best;
            }
            double conf = double(conf_num) / double(n);
            if (conf >= cfg.min_conf) {
                Afd afd;
                afd.table = normalize_value(t.name);
                afd.determining = body_attrs;
                afd.determined = t.attributes[head];
                afd.confidence = conf;
                afd.specificity = spec;
                out.afds.push_back(std::move(afd));
            }
        }
    }
    std::sort(out.afds.begin(), out.afds.end(), afd_less);
    std::sort(out.rules.begin(), out.rules.end(), rule_less);
    return out;
}

void check_same(const MiningResult& got, const MiningResult& want) {
    REQUIRE(got.afds.size() == want.afds.size());
    for (std::size_t i = 0; i < got.afds.size(); ++i) {
        const Afd &a = got.afds[i], &b = want.afds[i];
        CHECK(a.determining == b.determining);
        CHECK(a.determined == b.determined);
        CHECK(std::abs(a.confidence - b.confidence) <= 1e-12);
        CHECK(std::abs(a.specificity - b.specificity) <= 1e-12);
    }
    REQUIRE(got.rules.size() == want.rules.size());
    for (std::size_t i = 0; i < got.rules.size(); ++i) {
        const AssociationRule &a = got.rules[i], &b = want.rules[i];
        CHECK(a.body_attrs == b.body_attrs);
        CHECK(a.body_values == b.body_values);
        CHECK(a.head_attr == b.head_attr);
        CHECK(a.head_value == b.head_value);
        CHECK(a.body_count == b.body_count);
        CHECK(a.joint_count == b.joint_count);
        CHECK(a.total == b.total);
    }
}

} // namespace

TEST_CASE("support on the car-db fixture") {
    Table t = load_cardb();
    CHECK(support(t, {"make"}, {"Honda"}) == doctest::Approx(5.0 / 8.0).epsilon(1e-15));
    CHECK(support(t, {"make", "model"}, {"Honda", "Accord"}) ==
          doctest::Approx(3.0 / 8.0).epsilon(1e-15));
    CHECK(support(t, {"make"}, {"Ford"}) == 0.0);
}

TEST_CASE("afd_confidence make determines model is 0.625") {
    Table t = load_cardb();
    CHECK(afd_confidence(t, {"make"}, "model") == 0.625);
}

TEST_CASE("specificity of make on the car-db fixture") {
    Table t = load_cardb();
    // (-(5/8)log2(5/8) - (3/8)log2(3/8)) / log2(8)
    CHECK(specificity(t, {"make"}) == doctest::Approx(0.3181446).epsilon(1e-6));
}

TEST_CASE("specificity extremes") {
    Table t;
    t.name = "x";
    t.attributes = {"konst", "key"};
    for (int i = 0; i < 10; ++i) t.rows.push_back({"same", "id" + std::to_string(i)});
    t.numeric = {false, false};
    CHECK(specificity(t, {"konst"}) == 0.0);
    CHECK(specificity(t, {"key"}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(afd_confidence(t, {"key"}, "konst") == 1.0);
    CHECK(afd_confidence(t, {"konst"}, "key") == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("afd_confidence on the engine fixture") {
    auto tables = load_tables(kFixtures + "/cars");
    const Table& engine = find_table(tables, "engine");
    CHECK(afd_confidence(engine, {"mdl"}, "cylinders") == 1.0);
    CHECK(afd_confidence(engine, {"mdl"}, "engine") == doctest::Approx(4.0 / 6.0).epsilon(1e-15));
}

TEST_CASE("missing cells are excluded from bodies and heads") {
    Table t;
    t.name = "m";
    t.attributes = {"x", "y"};
    t.rows = {{"a", "1"}, {"a", "1"}, {"a", ""}, {"", "2"}};
    t.numeric = {false, true};
    // body groups: only {a} with rows 0,1,2; best head count = 2 (y=1)
    CHECK(afd_confidence(t, {"x"}, "y") == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(support(t, {"x"}, {"a"}) == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("generate_next_level follows apriori joins") {
    CHECK(generate_next_level({{0}, {1}, {2}}) ==
          std::vector<std::vector<int>>{{0, 1}, {0, 2}, {1, 2}});
    CHECK(generate_next_level({{0, 1}, {0, 2}, {1, 2}}) ==
          std::vector<std::vector<int>>{{0, 1, 2}});
    // {1,2} absent: {0,1,2} must not be generated
    CHECK(generate_next_level({{0, 1}, {0, 2}}).empty());
    CHECK(generate_next_level({}).empty());
}

TEST_CASE("prune_level keeps exactly the sets within the threshold") {
    std::mt19937 rng(7);
    Table t = random_table(rng);
    std::vector<std::vector<std::string>> level;
    for (const auto& a : t.attributes) level.push_back({a});
    auto kept = prune_level(level, t, 0.5);
    for (const auto& attrs : kept) CHECK(specificity(t, attrs) <= 0.5);
    std::size_t expect = 0;
    for (const auto& attrs : level)
        if (specificity(t, attrs) <= 0.5) ++expect;
    CHECK(kept.size() == expect);
}

TEST_CASE("miner matches the brute-force reference on random tables") {
    std::mt19937 rng(12345);
    for (int i = 0; i < 25; ++i) {
        Table t = random_table(rng);
        MinerConfig cfg;
        cfg.min_conf = 0.3;
        cfg.max_specificity = (i % 2) ? 0.8 : 1.0;
        cfg.max_det_set_size = 3;
        check_same(mine_afds(t, cfg), brute_force_mine(t, cfg));
    }
}

TEST_CASE("parallel and serial miners agree exactly") {
    std::mt19937 rng(99);
    for (int i = 0; i < 5; ++i) {
        Table t = random_table(rng);
        MinerConfig cfg;
        auto a = mine_afds(t, cfg);
        auto b = mine_afds_serial(t, cfg);
        check_same(a, b);
    }
}

TEST_CASE("specificity is monotone under attribute-set growth") {
    std::mt19937 rng(4242);
    int violations = 0;
    for (int i = 0; i < 200; ++i) {
        Table t = random_table(rng);
        std::size_t n_attrs = t.attributes.size();
        std::uniform_int_distribution<unsigned> mask_d(1, (1u << n_attrs) - 1);
        unsigned ymask = mask_d(rng);
        // X: random non-empty proper-or-equal subset of Y
        unsigned xmask = 0;
        while (xmask == 0) xmask = ymask & mask_d(rng);
        std::vector<std::string> xs, ys;
        for (std::size_t c = 0; c < n_attrs; ++c) {
            if (ymask & (1u << c)) ys.push_back(t.attributes[c]);
            if (xmask & (1u << c)) xs.push_back(t.attributes[c]);
        }
        if (specificity(t, ys) < specificity(t, xs) - 1e-12) ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("per-body best rule counts reproduce each AFD confidence") {
    std::mt19937 rng(2024);
    Table t = random_table(rng);
    MinerConfig cfg;
    cfg.min_conf = 0.0;
    auto result = mine_afds(t, cfg);
    for (const Afd& afd : result.afds) {
        // sum over distinct bodies of max joint count
        std::map<std::vector<std::string>, long long> best;
        long long total = 0;
        for (const AssociationRule& r : result.rules) {
            if (r.body_attrs != afd.determining || r.head_attr != afd.determined) continue;
            auto& b = best[r.body_values];
            b = std::max(b, r.joint_count);
            total = r.total;
        }
        long long num = 0;
        for (const auto& [k, v] : best) num += v;
        REQUIRE(total > 0);
        CHECK(afd.confidence == doctest::Approx(double(num) / double(total)).epsilon(1e-12));
    }
}

TEST_CASE("mining an empty table yields nothing") {
    Table t;
    t.name = "e";
    t.attributes = {"a", "b"};
    t.numeric = {false, false};
    auto result = mine_afds(t, MinerConfig{});
    CHECK(result.afds.empty());
    CHECK(result.rules.empty());
}
