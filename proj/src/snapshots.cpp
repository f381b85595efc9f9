#include "sheafdb/snapshots.hpp"

#include "sheafdb/errors.hpp"

#include <algorithm>

namespace sheafdb {

TablePresheaf ConcurrentSnapshotFamily::as_presheaf() const {
    TablePresheaf p(scenario);
    for (std::size_t k = 0; k < tables.size(); ++k) p.assign(scenario.contexts()[k], tables[k]);
    return p;
}

ConcurrentSnapshotFamily concurrent_snapshot(const VersionedTable& table, const MeasurementScenario& scenario,
                                             const VersionAssignment& omega) {
    if (omega.versions.size() != scenario.size()) {
        throw ScenarioError("version assignment has " + std::to_string(omega.versions.size()) + " entries for " +
                            std::to_string(scenario.size()) + " contexts");
    }
    const Schema& schema = *scenario.schema();
    std::vector<Table> tables;
    for (std::size_t k = 0; k < scenario.size(); ++k) {
        const Columns& ctx = scenario.contexts()[k];
        if (!is_subset(ctx, table.columns())) {
            throw ColumnError("context " + schema.describe(ctx) + " is not covered by the table columns");
        }
        try {
            tables.push_back(restrict_table(snapshot(table, omega.versions[k]), ctx));
        } catch (const SnapshotConflict& e) {
            throw SnapshotConflict("context " + schema.describe(ctx) + ": " + e.what(), e.indices());
        }
    }
    return {scenario, std::move(tables), omega, table};
}

PiCompatibilityReport is_pi_compatible(const ConcurrentSnapshotFamily& family, const SemiringMorphism& phi) {
    PiCompatibilityReport report;
    std::vector<Relation> summaries;
    for (const auto& t : family.tables) summaries.push_back(summarize(t, phi));
    RelationFamily relations(family.scenario, std::move(summaries));
    auto generated = generate_family(relations);
    if (auto* bad = std::get_if<IllDefined>(&generated)) report.ill_defined = *bad;
    report.overlaps = check_compatible_relation_family(relations);
    report.compatible = !report.ill_defined && report.overlaps.compatible;
    report.summaries = std::move(relations);
    return report;
}

namespace {

std::shared_ptr<const Poset> extend_poset(const VersionedTable& table, const VersionId& version,
                                          const VersionId& parent) {
    const Poset& poset = *table.poset();
    if (!poset.contains(parent)) throw EditError("unknown parent version '" + parent + "'");
    if (poset.contains(version)) throw EditError("version '" + version + "' already exists");
    return std::make_shared<const Poset>(poset.with_element(version, {parent}));
}

Table parent_snapshot(const VersionedTable& table, const VersionId& parent) {
    try {
        return snapshot(table, parent);
    } catch (const SnapshotConflict& e) {
        throw EditError(std::string("parent snapshot is ambiguous: ") + e.what());
    }
}

const Record& find_row(const Table& snap, Index index, const VersionId& parent) {
    const auto& rows = snap.records();
    auto it = std::find_if(rows.begin(), rows.end(), [&](const Record& r) { return r.index == index; });
    if (it == rows.end()) {
        throw EditError("index " + std::to_string(index) + " is not present in the snapshot at '" + parent + "'");
    }
    return *it;
}

}  // namespace

VersionedTable apply_swap_edit(const VersionedTable& table, const SwapEdit& edit) {
    auto poset = extend_poset(table, edit.version, edit.parent);
    auto col = std::find(table.columns().begin(), table.columns().end(), edit.column);
    if (col == table.columns().end()) throw EditError("swap column is not a column of the table");
    const std::size_t k = static_cast<std::size_t>(col - table.columns().begin());
    if (edit.first == edit.second) throw VacuousEdit("swap of an index with itself");

    Table snap = parent_snapshot(table, edit.parent);
    Record a = find_row(snap, edit.first, edit.parent);
    Record b = find_row(snap, edit.second, edit.parent);
    if (a.state[k] == b.state[k]) {
        throw VacuousEdit("indices " + std::to_string(edit.first) + " and " + std::to_string(edit.second) +
                          " already hold the same value of " + table.schema()->variable(edit.column).name);
    }
    std::swap(a.state[k], b.state[k]);
    a.version = edit.version;
    b.version = edit.version;

    std::vector<Record> rows = table.rows().records();
    rows.push_back(std::move(a));
    rows.push_back(std::move(b));
    return VersionedTable(Table(table.schema(), table.columns(), table.kind(), std::move(rows)), std::move(poset));
}

EditOutcome apply_row_edit(const VersionedTable& table, const RowEdit& edit) {
    auto poset = extend_poset(table, edit.version, edit.parent);
    Table snap = parent_snapshot(table, edit.parent);
    std::vector<Record> rows = table.rows().records();
    for (const auto& [index, state] : edit.rows) {
        Record r = find_row(snap, index, edit.parent);
        r.version = edit.version;
        r.state = state;
        rows.push_back(std::move(r));
    }
    VersionedTable out(Table(table.schema(), table.columns(), table.kind(), std::move(rows)), std::move(poset));
    bool preserved = single_variable_marginals_equal(out, edit.parent, edit.version);
    return {std::move(out), preserved};
}

bool single_variable_marginals_equal(const VersionedTable& table, const VersionId& a, const VersionId& b) {
    const auto phi = SemiringMorphism::counting(table.kind());
    Table sa = snapshot(table, a), sb = snapshot(table, b);
    for (VariableId v : table.columns()) {
        if (!(summarize(restrict_table(sa, {v}), phi) == summarize(restrict_table(sb, {v}), phi))) return false;
    }
    return true;
}

}  // namespace sheafdb
