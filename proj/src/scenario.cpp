#include "sheafdb/scenario.hpp"

#include "sheafdb/errors.hpp"

#include <algorithm>
#include <set>

namespace sheafdb {

namespace {

using RowKey = std::pair<std::optional<VersionId>, Index>;

}  // namespace

MeasurementScenario::MeasurementScenario(SchemaPtr schema, std::vector<Columns> contexts)
    : schema_(std::move(schema)), contexts_(std::move(contexts)) {
    if (!schema_) throw ScenarioError("scenario without schema");
    if (contexts_.empty()) throw ScenarioError("scenario needs at least one context");
    Columns covered;
    for (const auto& c : contexts_) {
        validate_columns(*schema_, c);
        if (c.empty()) throw ScenarioError("empty context");
        covered = column_union(covered, c);
    }
    if (covered != schema_->all_columns()) {
        throw ScenarioError("contexts do not cover every variable");
    }
    for (std::size_t i = 0; i < contexts_.size(); ++i) {
        for (std::size_t j = 0; j < contexts_.size(); ++j) {
            if (i != j && is_subset(contexts_[i], contexts_[j])) {
                throw ScenarioError("context " + schema_->describe(contexts_[i]) + " is contained in " +
                                    schema_->describe(contexts_[j]) + "; contexts must be coatoms");
            }
        }
    }
}

std::optional<std::size_t> MeasurementScenario::find(const Columns& context) const {
    auto it = std::find(contexts_.begin(), contexts_.end(), context);
    if (it == contexts_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - contexts_.begin());
}

bool operator==(const MeasurementScenario& a, const MeasurementScenario& b) {
    return (a.schema() == b.schema() || *a.schema() == *b.schema()) && a.contexts() == b.contexts();
}

bool OpenSetLattice::contains(const Columns& u) const { return std::find(opens.begin(), opens.end(), u) != opens.end(); }

OpenSetLattice build_topology(const MeasurementScenario& scenario) {
    std::set<Columns> opens(scenario.contexts().begin(), scenario.contexts().end());
    opens.insert(Columns{});
    bool grew = true;
    while (grew) {
        grew = false;
        std::vector<Columns> current(opens.begin(), opens.end());
        for (std::size_t i = 0; i < current.size(); ++i) {
            for (std::size_t j = i + 1; j < current.size(); ++j) {
                if (opens.insert(column_intersection(current[i], current[j])).second) grew = true;
            }
        }
    }
    OpenSetLattice lattice;
    // Smaller sets first, then lexicographic.
    lattice.opens.assign(opens.begin(), opens.end());
    std::stable_sort(lattice.opens.begin(), lattice.opens.end(),
                     [](const Columns& a, const Columns& b) { return a.size() < b.size(); });
    for (std::size_t i = 0; i < lattice.opens.size(); ++i) {
        for (std::size_t j = 0; j < lattice.opens.size(); ++j) {
            if (i != j && is_subset(lattice.opens[i], lattice.opens[j])) lattice.inclusions.emplace_back(i, j);
        }
    }
    return lattice;
}

// Table presheaves

TablePresheaf::TablePresheaf(MeasurementScenario scenario, std::map<Columns, Table> sections)
    : scenario_(std::move(scenario)) {
    for (auto& [open, table] : sections) assign(open, std::move(table));
}

void TablePresheaf::assign(const Columns& open, Table table) {
    if (table.columns() != open) throw SchemaError("table columns differ from the open they are assigned to");
    if (!(*table.schema() == *scenario_.schema())) throw SchemaError("table schema differs from the scenario schema");
    sections_.insert_or_assign(open, std::move(table));
}

PresheafReport check_compatible_presheaf(const TablePresheaf& presheaf) {
    PresheafReport report;
    const auto& sections = presheaf.sections();
    for (auto a = sections.begin(); a != sections.end(); ++a) {
        for (auto b = std::next(a); b != sections.end(); ++b) {
            const Columns overlap = column_intersection(a->first, b->first);
            std::map<RowKey, const Record*> right;
            for (const auto& r : b->second.records()) right.emplace(RowKey{r.version, r.index}, &r);
            for (const auto& r : a->second.records()) {
                auto it = right.find(RowKey{r.version, r.index});
                if (it == right.end()) continue;
                const Record& other = *it->second;
                bool same = restrict_state({a->first, r.state}, overlap) ==
                                restrict_state({b->first, other.state}, overlap) &&
                            r.value == other.value;
                if (!same) {
                    report.compatible = false;
                    report.violations.push_back({r.version, r.index, a->first, b->first});
                }
            }
        }
    }
    return report;
}

bool is_compatible_section_family(const TablePresheaf& presheaf) {
    const auto& sections = presheaf.sections();
    for (auto a = sections.begin(); a != sections.end(); ++a) {
        for (auto b = std::next(a); b != sections.end(); ++b) {
            const Columns overlap = column_intersection(a->first, b->first);
            if (!(restrict_table(a->second, overlap) == restrict_table(b->second, overlap))) return false;
        }
    }
    return true;
}

TablePresheaf sheafify_rows(const TablePresheaf& presheaf) {
    if (!check_compatible_presheaf(presheaf).compatible) {
        throw CompatibilityError("cannot glue rows of an incompatible presheaf of tables");
    }
    struct Occurrence {
        const Columns* open;
        const Record* record;
        Kind kind;
    };
    std::map<RowKey, std::vector<Occurrence>> by_key;
    for (const auto& [open, table] : presheaf.sections()) {
        for (const auto& r : table.records()) by_key[{r.version, r.index}].push_back({&open, &r, table.kind()});
    }

    std::map<Columns, std::vector<Record>> additions;
    std::map<Columns, Kind> addition_kinds;
    for (const auto& [key, occurrences] : by_key) {
        if (occurrences.size() < 2) continue;
        Columns glued_cols;
        for (const auto& o : occurrences) glued_cols = column_union(glued_cols, *o.open);
        bool present = std::any_of(occurrences.begin(), occurrences.end(),
                                   [&](const Occurrence& o) { return *o.open == glued_cols; });
        if (present) continue;
        State glued(glued_cols.size(), kNA);
        for (const auto& o : occurrences) {
            StateAssignment extended = extend_state({*o.open, o.record->state}, glued_cols);
            for (std::size_t k = 0; k < glued.size(); ++k) {
                if (extended.values[k] != kNA) glued[k] = extended.values[k];
            }
        }
        // NA entries shared by every contributor stay NA; compatibility makes the
        // per-column values agree.
        additions[glued_cols].push_back({key.first, key.second, glued, occurrences.front().record->value});
        addition_kinds.emplace(glued_cols, occurrences.front().kind);
    }

    TablePresheaf out = presheaf;
    for (auto& [cols, rows] : additions) {
        auto existing = presheaf.sections().find(cols);
        std::vector<Record> merged;
        Kind kind = addition_kinds.at(cols);
        if (existing != presheaf.sections().end()) {
            merged = existing->second.records();
            kind = existing->second.kind();
        }
        for (auto& r : rows) merged.push_back(std::move(r));
        out.assign(cols, Table(presheaf.scenario().schema(), cols, kind, std::move(merged)));
    }
    return out;
}

// Relation families

RelationFamily::RelationFamily(MeasurementScenario scenario, std::vector<Relation> sections)
    : scenario_(std::move(scenario)), sections_(std::move(sections)) {
    if (sections_.size() != scenario_.size()) {
        throw SchemaError("family has " + std::to_string(sections_.size()) + " relations for " +
                          std::to_string(scenario_.size()) + " contexts");
    }
    for (std::size_t k = 0; k < sections_.size(); ++k) {
        const auto& r = sections_[k];
        if (r.columns() != scenario_.contexts()[k]) {
            throw SchemaError("relation " + std::to_string(k) + " is not on context " +
                              scenario_.schema()->describe(scenario_.contexts()[k]));
        }
        if (!(*r.schema() == *scenario_.schema())) throw SchemaError("relation schema differs from scenario schema");
        if (r.kind() != sections_.front().kind()) throw KindError("family mixes semiring kinds");
    }
}

Kind RelationFamily::kind() const { return sections_.front().kind(); }

Relation normalize_relation(const Relation& r) {
    Rational total = 0;
    for (const auto& [s, v] : r.support()) total += v.as_rational();
    if (total == 0) throw DegenerateTotal("cannot normalize a relation with zero total");
    Relation out(r.schema(), r.columns(), Kind::NonnegRational);
    for (const auto& [s, v] : r.support()) out.set(s, SemiringValue::rational(v.as_rational() / total));
    return out;
}

RelationFamily normalize_family(const RelationFamily& f) {
    std::vector<Relation> sections;
    for (const auto& r : f.sections()) sections.push_back(normalize_relation(r));
    return RelationFamily(f.scenario(), std::move(sections));
}

FamilyReport check_compatible_relation_family(const RelationFamily& family, bool up_to_normalization) {
    FamilyReport report;
    const auto& contexts = family.scenario().contexts();
    const Schema& schema = *family.scenario().schema();
    auto prepare = [&](const Relation& r) {
        if (!up_to_normalization || r.total().is_zero()) return r;
        return normalize_relation(r);
    };
    for (std::size_t i = 0; i < contexts.size(); ++i) {
        for (std::size_t j = i + 1; j < contexts.size(); ++j) {
            Columns overlap = column_intersection(contexts[i], contexts[j]);
            if (overlap.empty()) continue;
            Relation left = prepare(restrict_relation(family.section(i), overlap));
            Relation right = prepare(restrict_relation(family.section(j), overlap));
            for_each_state(schema, overlap, [&](const State& s) {
                SemiringValue a = left.at(s), b = right.at(s);
                if (!(a == b)) {
                    report.compatible = false;
                    report.disagreements.push_back({i, j, overlap, s, a, b});
                }
            });
        }
    }
    return report;
}

namespace {

std::vector<Columns> default_targets(const MeasurementScenario& scenario) {
    std::vector<Columns> out;
    for (auto& open : build_topology(scenario).opens) {
        if (!open.empty()) out.push_back(std::move(open));
    }
    return out;
}

template <class Section, class Restrict>
std::variant<GeneratedFamily<Section>, IllDefined> generate(const MeasurementScenario& scenario,
                                                            const std::vector<Section>& per_context,
                                                            const std::vector<Columns>& targets, Restrict restrict) {
    GeneratedFamily<Section> family;
    const auto& contexts = scenario.contexts();
    for (const auto& open : targets) {
        std::optional<Section> assigned;
        std::size_t source = 0;
        for (std::size_t k = 0; k < contexts.size(); ++k) {
            if (!is_subset(open, contexts[k])) continue;
            Section candidate = restrict(per_context[k], open);
            if (!assigned) {
                assigned = std::move(candidate);
                source = k;
            } else if (!(*assigned == candidate)) {
                return IllDefined{open, source, k};
            }
        }
        if (assigned) {
            family.opens.push_back(open);
            family.sections.push_back(std::move(*assigned));
        }
    }
    return family;
}

}  // namespace

std::variant<GeneratedFamily<Relation>, IllDefined> generate_family(const RelationFamily& family,
                                                                    std::optional<std::vector<Columns>> targets) {
    const auto& scenario = family.scenario();
    return generate<Relation>(scenario, family.sections(), targets ? *targets : default_targets(scenario),
                              [](const Relation& r, const Columns& u) { return restrict_relation(r, u); });
}

std::variant<GeneratedFamily<Table>, IllDefined> generate_family(const MeasurementScenario& scenario,
                                                                 const std::vector<Table>& per_context,
                                                                 std::optional<std::vector<Columns>> targets) {
    if (per_context.size() != scenario.size()) throw SchemaError("one table per context is required");
    for (std::size_t k = 0; k < per_context.size(); ++k) {
        if (per_context[k].columns() != scenario.contexts()[k]) {
            throw SchemaError("table " + std::to_string(k) + " is not on its context");
        }
    }
    return generate<Table>(scenario, per_context, targets ? *targets : default_targets(scenario),
                           [](const Table& t, const Columns& u) { return restrict_table(t, u); });
}

}  // namespace sheafdb
