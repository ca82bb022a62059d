#include <chrono>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "smartint/eval.hpp"
#include "smartint/queryparse.hpp"

using namespace smartint;

namespace {

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    }
};

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

// dotted column paths in attribute-tree preorder
void collect_paths(const std::vector<AttrNode>& nodes, const std::string& prefix,
                   std::vector<std::pair<std::string, std::string>>& out) {
    for (const auto& n : nodes) {
        std::string path = prefix.empty() ? n.display : prefix + "." + n.display;
        out.emplace_back(n.display, path);
        collect_paths(n.children, path, out);
    }
}

std::vector<Query> load_workload(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw EvalError("cannot open workload " + path);
    std::vector<Query> out;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        if (normalize_value(line).empty()) continue;
        out.push_back(parse_query(line));
    }
    return out;
}

int cmd_mine(const std::string& tables_dir, const std::string& mapping_file,
             const std::string& out_path, const MinerConfig& config) {
    Timer timer;
    auto tables = load_tables(tables_dir);
    if (tables.empty()) {
        std::cerr << "error: no CSV tables found in " << tables_dir << "\n";
        return 1;
    }
    auto mapping = mapping_file.empty() ? AttributeMapping{} : parse_mapping_file(mapping_file);
    auto graph = build_graph(tables, mapping);
    auto stats = build_stats(tables, graph, config);
    save_stats(stats, out_path);
    for (const auto& [name, ts] : stats.per_table)
        std::cout << "table " << name << ": " << ts.afds.size() << " afds, " << ts.rules.size()
                  << " rules, " << ts.tuple_count << " tuples\n";
    std::cerr << "mined " << stats.per_table.size() << " tables in " << timer.ms() << " ms\n";
    return 0;
}

int cmd_query(const std::string& query_text, const std::string& tables_dir,
              const std::string& mapping_file, const std::string& stats_path,
              const SelectionConfig& sel, const ExpansionConfig& exp, bool explain,
              const std::string& format) {
    Timer timer;
    auto tables = load_tables(tables_dir);
    auto mapping = mapping_file.empty() ? AttributeMapping{} : parse_mapping_file(mapping_file);
    auto graph = build_graph(tables, mapping);
    auto stats = load_stats(stats_path);

    Query query = parse_query(query_text);
    SelectionExplain sexp;
    TableTree tree;
    std::vector<ExpandedTuple> answers;
    try {
        answers = answer_query(tables, stats, graph, query, sel, exp, &sexp, &tree);
    } catch (const SelectionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        for (const auto& [t, r] : e.table_scores)
            std::cerr << "  relevance " << t << " = " << r << "\n";
        return 1;
    }

    auto attr_tree = build_attribute_tree(stats, graph, tables, tree);
    std::vector<std::pair<std::string, std::string>> columns; // display -> dotted path
    collect_paths(attr_tree.roots, "", columns);

    if (explain) {
        std::cout << "# table relevance:\n";
        for (const auto& [t, r] : sexp.table_scores)
            std::cout << "#   " << t << " = " << r << "\n";
        std::cout << "# selected tree (" << (sexp.exhaustive ? "exhaustive" : "greedy")
                  << "): root " << tree.root << ", tables";
        for (const auto& t : tree.all_tables()) std::cout << " " << t;
        std::cout << ", relevance " << tree.relevance << "\n";
    }

    if (format == "csv") {
        for (std::size_t i = 0; i < columns.size(); ++i)
            std::cout << (i ? "," : "") << csv_quote(columns[i].second);
        std::cout << ",confidence\n";
        char buf[32];
        for (const auto& t : answers) {
            for (std::size_t i = 0; i < columns.size(); ++i) {
                const ExpandedValue* v = nullptr;
                for (const auto& ev : t.values)
                    if (ev.display == columns[i].first) {
                        v = &ev;
                        break;
                    }
                std::cout << (i ? "," : "") << (v ? csv_quote(v->value) : "");
            }
            std::snprintf(buf, sizeof buf, ",%.6f\n", t.tuple_confidence);
            std::cout << buf;
        }
    } else {
        int rank = 0;
        char buf[64];
        for (const auto& t : answers) {
            std::snprintf(buf, sizeof buf, "#%d  confidence %.6f  base-prob %.6f\n", ++rank,
                          t.tuple_confidence, t.base_probability);
            std::cout << buf;
            for (const auto& v : t.values) {
                std::cout << "    " << v.display << " = " << v.value;
                if (explain) {
                    std::snprintf(buf, sizeof buf, "   [%s, %.6f%s]", v.table.c_str(),
                                  v.confidence, v.predicted ? "" : ", base");
                    std::cout << buf;
                }
                std::cout << "\n";
            }
        }
        if (answers.empty()) std::cout << "(no answers)\n";
    }
    std::cerr << "answered in " << timer.ms() << " ms\n";
    return 0;
}

int cmd_generate(const std::string& out_path, unsigned seed, std::size_t rows) {
    save_csv(generate_master(seed, rows), out_path);
    std::cerr << "wrote " << rows << " rows to " << out_path << "\n";
    return 0;
}

int cmd_eval(const std::string& master_path, unsigned seed, std::size_t rows,
             const std::string& fragments_path, const std::string& workload_path,
             const std::string& out_prefix, const SystemConfigs& configs,
             const std::vector<std::string>& systems, int sweep_max) {
    Timer timer;
    Table master =
        master_path.empty() ? generate_master(seed, rows) : load_csv(master_path);
    auto specs =
        fragments_path.empty() ? builtin_fragment_layout() : parse_fragment_specs(fragments_path);
    auto fragments = split_master(master, specs);
    auto graph = build_graph(fragments, fragment_mapping(fragments));
    auto stats = build_stats(fragments, graph, configs.miner);
    auto queries = workload_path.empty() ? default_workload() : load_workload(workload_path);

    char buf[128];
    for (const auto& name : systems) {
        System sys = name == "smart"    ? System::Smart
                     : name == "single" ? System::SingleTable
                                        : System::DirectJoin;
        EvalReport report = evaluate(sys, fragments, graph, stats, master, queries, configs);
        write_report_csv(report, out_prefix + "_" + name + ".csv");
        std::snprintf(buf, sizeof buf, "%s: precision %.4f recall %.4f f %.4f\n", name.c_str(),
                      report.precision, report.recall, report.f);
        std::cout << buf;
    }
    if (sweep_max >= 0) {
        auto curve = width_sweep(fragments, graph, stats, master, queries, configs, 0,
                                 std::size_t(sweep_max));
        std::ofstream out(out_prefix + "_width.csv");
        out << "w,precision,recall,f_measure\n";
        for (const auto& p : curve) {
            std::snprintf(buf, sizeof buf, "%zu,%.6f,%.6f,%.6f\n", p.w, p.precision, p.recall,
                          p.f);
            out << buf;
        }
    }
    std::cerr << "evaluated in " << timer.ms() << " ms\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"smartint: query mediation over key-less tables via mined AFDs"};
    app.require_subcommand(1);

    MinerConfig miner;
    SelectionConfig sel;
    ExpansionConfig exp;
    int width = -1, max_hops = 3;

    auto add_miner_flags = [&](CLI::App* cmd) {
        cmd->add_option("--min-conf", miner.min_conf, "minimum AFD confidence");
        cmd->add_option("--max-specificity", miner.max_specificity,
                        "determining-set specificity cutoff");
        cmd->add_option("--max-detset", miner.max_det_set_size, "max determining-set size");
    };
    auto add_query_flags = [&](CLI::App* cmd) {
        cmd->add_option("--tau", sel.tau, "table relevance threshold");
        cmd->add_option("--k", sel.k, "max tree size");
        cmd->add_option("--epsilon", sel.epsilon, "unreachable-constraint probability");
        cmd->add_option("--theta", exp.theta, "base-set conformance cutoff");
        cmd->add_option("--delta", exp.delta, "fall-back confidence margin");
        cmd->add_option("--width", width, "max predicted attributes per tuple");
        cmd->add_option("--max-hops", max_hops, "max chain hops");
    };

    // mine
    std::string tables_dir, mapping_file, stats_path = "stats.txt";
    auto* mine = app.add_subcommand("mine", "mine AFDs and association statistics");
    mine->add_option("tables", tables_dir, "directory of CSV tables")->required();
    mine->add_option("--mapping", mapping_file, "attribute mapping file");
    mine->add_option("-o,--out", stats_path, "stats output path");
    add_miner_flags(mine);

    // query
    std::string query_text, format = "text";
    bool explain = false;
    auto* query = app.add_subcommand("query", "answer a query over mined statistics");
    query->add_option("query", query_text, "e.g. \"SELECT make, model WHERE price < 15000\"")
        ->required();
    query->add_option("--tables", tables_dir, "directory of CSV tables")->required();
    query->add_option("--mapping", mapping_file, "attribute mapping file");
    query->add_option("--stats", stats_path, "stats file from 'mine'")->required();
    query->add_option("--format", format, "text|csv")->check(CLI::IsMember({"text", "csv"}));
    query->add_flag("--explain", explain, "print selection scores and provenance");
    add_query_flags(query);

    // eval
    std::string master_path, fragments_path, workload_path, out_prefix = "eval";
    unsigned seed = 42;
    std::size_t rows = 5000;
    std::vector<std::string> systems = {"smart", "single", "dj"};
    int sweep_max = -1;
    auto* eval = app.add_subcommand("eval", "run the three systems against a master table");
    eval->add_option("--master", master_path, "master CSV (omit to generate synthetically)");
    eval->add_option("--seed", seed, "seed for the synthetic master");
    eval->add_option("--rows", rows, "rows for the synthetic master");
    eval->add_option("--fragments", fragments_path, "fragment spec (omit for built-in layout)");
    eval->add_option("--workload", workload_path, "query file (omit for built-in workload)");
    eval->add_option("--out", out_prefix, "report path prefix");
    eval->add_option("--systems", systems, "subset of smart,single,dj")
        ->check(CLI::IsMember({"smart", "single", "dj"}));
    eval->add_option("--width-sweep", sweep_max, "also sweep width 0..N");
    add_miner_flags(eval);
    add_query_flags(eval);

    // generate
    std::string gen_out = "master.csv";
    auto* gen = app.add_subcommand("generate", "write a synthetic master table");
    gen->add_option("-o,--out", gen_out, "output CSV path");
    gen->add_option("--seed", seed, "generator seed");
    gen->add_option("--rows", rows, "row count");

    CLI11_PARSE(app, argc, argv);
    if (width >= 0) exp.width = std::size_t(width);

    try {
        if (mine->parsed()) return cmd_mine(tables_dir, mapping_file, stats_path, miner);
        if (query->parsed())
            return cmd_query(query_text, tables_dir, mapping_file, stats_path, sel, exp, explain,
                             format);
        if (eval->parsed())
            return cmd_eval(master_path, seed, rows, fragments_path, workload_path, out_prefix,
                            {miner, sel, exp}, systems, sweep_max);
        if (gen->parsed()) return cmd_generate(gen_out, seed, rows);
    } catch (const QueryParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
