#ifndef SMARTINT_EVAL_HPP
#define SMARTINT_EVAL_HPP

#include <array>

#include "smartint/expansion.hpp"

namespace smartint {

struct EvalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FragmentSpec {
    std::string name;
    std::vector<std::string> attributes;
    std::vector<Constraint> predicate; // conjunctive row filter; empty = all rows
};

// Text format: one fragment per block,
//   fragment <name>
//   attrs a, b, c
//   where attr = value        (optional, repeatable, AND semantics)
std::vector<FragmentSpec> parse_fragment_specs(const std::string& path);

std::vector<Table> split_master(const Table& master, const std::vector<FragmentSpec>& specs);

// Declares a match between every pair of equally named attributes of distinct
// tables.
AttributeMapping mapping_by_name(const std::vector<Table>& tables);

// How the fragments are wired together: matched on `model` only, so every
// cross-fragment link (joins, anchors, chains) goes through the one attribute
// the fragments genuinely share as an entity handle. Falls back to
// mapping_by_name for layouts without a model column.
AttributeMapping fragment_mapping(const std::vector<Table>& tables);

double tuple_correctness(const ExpandedTuple& answer, const Table& master, int truth_row);
double tuple_completeness(const ExpandedTuple& answer, const Table& master);

enum class System { Smart, SingleTable, DirectJoin };

struct SystemConfigs {
    MinerConfig miner;
    SelectionConfig selection;
    ExpansionConfig expansion;
};

struct QueryScore {
    std::string query;
    double precision = 0, recall = 0, f = 0;
    std::size_t answers = 0;
    double runtime_ms = 0;
    std::size_t n_attrs = 0, n_constraints = 0;
};

struct EvalReport {
    std::vector<QueryScore> per_query;
    double precision = 0, recall = 0, f = 0; // means over queries
    std::map<std::size_t, std::array<double, 3>> by_attr_count;       // P,R,F
    std::map<std::size_t, std::array<double, 3>> by_constraint_count; // P,R,F
};

// Equi-join over the minimal connected table set covering the query, on all
// mapped attribute pairs, duplicates kept; constraints applied on the join.
std::vector<ExpandedTuple> direct_join_answer(const std::vector<Table>& tables,
                                              const TableGraph& graph, const Query& query);

// The single table satisfying the most constraints (then covering the most
// projected attributes); unmappable constraints are dropped.
std::vector<ExpandedTuple> single_table_answer(const std::vector<Table>& tables,
                                               const TableGraph& graph, const Query& query);

EvalReport evaluate(System system, const std::vector<Table>& fragments, const TableGraph& graph,
                    const SourceStats& stats, const Table& master,
                    const std::vector<Query>& queries, const SystemConfigs& configs);

struct WidthPoint {
    std::size_t w;
    double precision = 0, recall = 0, f = 0;
};

std::vector<WidthPoint> width_sweep(const std::vector<Table>& fragments, const TableGraph& graph,
                                    const SourceStats& stats, const Table& master,
                                    const std::vector<Query>& queries,
                                    const SystemConfigs& configs, std::size_t w_min,
                                    std::size_t w_max);

// Synthetic vehicles master: 18 attributes, functional dependencies of
// configurable strength hanging off `model`; deterministic per seed.
struct MasterSpec {
    std::size_t n_models = 150;
    std::size_t n_makes = 8;
    std::size_t n_engines = 50;
    double p_make = 0.95;
    double p_engine = 0.85;
    double p_vehicle_type = 0.9;
    double p_body_style = 0.85;
    double p_door_count = 0.9;
    double p_color = 0.8;
    double p_cylinders = 0.9;
    double p_transmission = 0.8;
};

Table generate_master(unsigned seed, std::size_t n_rows, const MasterSpec& spec = {});

// The five-fragment vehicles layout used by the experiments.
std::vector<FragmentSpec> builtin_fragment_layout();

std::vector<Query> default_workload();

void write_report_csv(const EvalReport& report, const std::string& path);

} // namespace smartint

#endif
