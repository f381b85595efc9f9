#include "sheafdb/bell.hpp"

#include "sheafdb/errors.hpp"

#include <algorithm>
#include <sstream>

namespace sheafdb::bell {

namespace {

constexpr StateCode N = kNA;

// index, A, B, A', B'
constexpr StateCode kMissingRows[16][5] = {
    {1, 0, 0, 0, 0},   {2, 1, 1, 1, 1},   {3, 0, 0, 0, N},   {4, 1, 1, N, 1},
    {5, N, 0, 1, 0},   {6, 1, N, 1, 0},   {7, N, N, 1, 0},   {8, N, 1, 0, 1},
    {9, 0, N, 0, 1},   {10, N, N, 0, 1},  {11, 1, 1, 1, N},  {12, 0, 0, N, 0},
    {13, 0, 0, 0, N},  {14, 1, 1, 1, N},  {15, 0, N, N, 0},  {16, 1, N, N, 1},
};

constexpr StateCode kBaseRows[8][5] = {
    {1, 0, 0, 0, 0}, {2, 0, 0, 0, 0}, {3, 0, 1, 0, 1}, {4, 0, 1, 0, 1},
    {5, 1, 0, 1, 0}, {6, 1, 0, 1, 0}, {7, 1, 1, 1, 1}, {8, 1, 1, 1, 1},
};

std::string concat_names(const Schema& schema, std::vector<VariableId> cols) {
    std::string out;
    for (VariableId v : cols) out += schema.variable(v).name;
    return out;
}

}  // namespace

SchemaPtr schema() {
    static const SchemaPtr s = std::make_shared<const Schema>(std::vector<Variable>{
        {"A", {"0", "1"}}, {"B", {"0", "1"}}, {"A'", {"0", "1"}}, {"B'", {"0", "1"}}});
    return s;
}

MeasurementScenario scenario() { return MeasurementScenario(schema(), {{0, 1}, {1, 2}, {0, 3}, {2, 3}}); }

std::vector<std::string> context_names() { return {"C_AB", "C_A'B", "C_AB'", "C_A'B'"}; }

Table missing_data_table() {
    std::vector<Record> rows;
    for (const auto& r : kMissingRows) {
        rows.push_back({std::nullopt, r[0], State{r[1], r[2], r[3], r[4]}, SemiringValue::boolean(true)});
    }
    return Table(schema(), schema()->all_columns(), Kind::Boolean, std::move(rows));
}

RelationFamily count_family() {
    auto s = schema();
    // Dense order is lexicographic over the sorted context columns; every
    // matrix here is symmetric, so (A',B) stored as (B,A') reads the same.
    return RelationFamily(scenario(), {Relation::counts(s, {0, 1}, {4, 0, 0, 4}),
                                       Relation::counts(s, {1, 2}, {3, 1, 1, 3}),
                                       Relation::counts(s, {0, 3}, {3, 1, 1, 3}),
                                       Relation::counts(s, {2, 3}, {1, 3, 3, 1})});
}

VersionedTable versioned_base() {
    std::vector<Record> rows;
    for (const auto& r : kBaseRows) {
        rows.push_back({VersionId("1"), r[0], State{r[1], r[2], r[3], r[4]}, SemiringValue::boolean(true)});
    }
    auto poset = std::make_shared<const Poset>(Poset::from_relations({"1"}, {}));
    return VersionedTable(Table(schema(), schema()->all_columns(), Kind::Boolean, std::move(rows)), poset);
}

std::vector<SwapEdit> swap_edits() {
    return {
        {"2", "1", 1, 3, 6},  // B in records 3 and 6
        {"3", "1", 3, 3, 6},  // B' in records 3 and 6
        {"4", "1", 2, 2, 7},  // A' in records 2 and 7
        {"5", "2", 0, 4, 5},  // A in records 4 and 5
    };
}

VersionAssignment reference_omega() { return {{"5", "2", "3", "4"}}; }

std::vector<std::string> expected_snapshots() {
    return {
        "version index | A B\n"
        "1 1 | 0 0\n1 2 | 0 0\n2 3 | 0 0\n5 4 | 1 1\n5 5 | 0 0\n2 6 | 1 1\n1 7 | 1 1\n1 8 | 1 1\n",
        "version index | B A'\n"
        "1 1 | 0 0\n1 2 | 0 0\n2 3 | 0 0\n1 4 | 1 0\n1 5 | 0 1\n2 6 | 1 1\n1 7 | 1 1\n1 8 | 1 1\n",
        "version index | A B'\n"
        "1 1 | 0 0\n1 2 | 0 0\n3 3 | 0 0\n1 4 | 0 1\n1 5 | 1 0\n3 6 | 1 1\n1 7 | 1 1\n1 8 | 1 1\n",
        "version index | A' B'\n"
        "1 1 | 0 0\n4 2 | 1 0\n1 3 | 0 1\n1 4 | 0 1\n1 5 | 1 0\n1 6 | 1 0\n4 7 | 0 1\n1 8 | 1 1\n",
    };
}

std::string render_table(const Table& t) {
    const Schema& schema = *t.schema();
    std::ostringstream out;
    out << "version index |";
    for (VariableId v : t.columns()) out << ' ' << schema.variable(v).name;
    out << '\n';
    const Table sorted = sorted_by_index(t);
    for (const auto& r : sorted.records()) {
        out << r.version.value_or("-") << ' ' << r.index << " |";
        for (std::size_t k = 0; k < r.state.size(); ++k) {
            out << ' ' << (r.state[k] == kNA ? std::string("NA") : schema.label_of(t.columns()[k], r.state[k]));
        }
        out << '\n';
    }
    return out.str();
}

VersionedBell reproduce_bell_versioned(std::optional<VersionAssignment> omega) {
    VersionedTable table = versioned_base();
    for (const auto& edit : swap_edits()) table = apply_swap_edit(table, edit);
    MeasurementScenario sc = scenario();
    VersionAssignment w = omega ? *omega : reference_omega();
    ConcurrentSnapshotFamily snaps = concurrent_snapshot(table, sc, w);
    std::vector<Relation> summaries;
    for (const auto& t : snaps.tables) summaries.push_back(summarize(t, SemiringMorphism::bool_indicator()));
    RelationFamily family(sc, std::move(summaries));
    return {std::move(table), std::move(sc), std::move(w), std::move(snaps), std::move(family)};
}

VersionAssignment parse_omega(const MeasurementScenario& scenario, const std::string& text) {
    const Schema& schema = *scenario.schema();
    VersionAssignment out;
    out.versions.assign(scenario.size(), "");
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        auto eq = item.find('=');
        if (eq == std::string::npos) throw ParseError("omega entry '" + item + "' lacks '='");
        std::string key = item.substr(0, eq), version = item.substr(eq + 1);
        if (key.rfind("C_", 0) == 0) key = key.substr(2);
        bool matched = false;
        for (std::size_t k = 0; k < scenario.size() && !matched; ++k) {
            std::vector<VariableId> cols = scenario.contexts()[k];
            std::sort(cols.begin(), cols.end());
            do {
                if (concat_names(schema, cols) == key) {
                    out.versions[k] = version;
                    matched = true;
                    break;
                }
            } while (std::next_permutation(cols.begin(), cols.end()));
        }
        if (!matched) throw ParseError("omega entry '" + item + "' names no context");
    }
    for (std::size_t k = 0; k < scenario.size(); ++k) {
        if (out.versions[k].empty()) {
            throw ParseError("omega does not assign context " + schema.describe(scenario.contexts()[k]));
        }
    }
    return out;
}

}  // namespace sheafdb::bell
