#pragma once

// Measurement scenarios, the topology their contexts generate, and the two
// levels of presheaf built over it: tables whose sections are rows, and
// relation families whose sections are whole relations.

#include "sheafdb/table.hpp"

#include <map>
#include <optional>
#include <variant>
#include <vector>

namespace sheafdb {

/// Variables plus contexts C_1..C_K. Contexts cover every variable and none
/// is contained in another.
class MeasurementScenario {
public:
    /// Throws ScenarioError on empty, duplicate, non-covering or nested
    /// contexts.
    MeasurementScenario(SchemaPtr schema, std::vector<Columns> contexts);

    const SchemaPtr& schema() const noexcept { return schema_; }
    const std::vector<Columns>& contexts() const noexcept { return contexts_; }
    std::size_t size() const noexcept { return contexts_.size(); }
    /// Position of `context` among the contexts, if it is one.
    std::optional<std::size_t> find(const Columns& context) const;

private:
    SchemaPtr schema_;
    std::vector<Columns> contexts_;
};

bool operator==(const MeasurementScenario& a, const MeasurementScenario& b);

/// Closure of the contexts under intersection, with ∅; inclusions are the
/// strict subset pairs (i, j) meaning opens[i] ⊂ opens[j].
struct OpenSetLattice {
    std::vector<Columns> opens;
    std::vector<std::pair<std::size_t, std::size_t>> inclusions;

    bool contains(const Columns& u) const;
};

OpenSetLattice build_topology(const MeasurementScenario& scenario);

/// An open ↦ table assignment (versioned rows, NA allowed). Keys may be any
/// column set; gluing adds tables on unions of opens.
class TablePresheaf {
public:
    explicit TablePresheaf(MeasurementScenario scenario) : scenario_(std::move(scenario)) {}
    TablePresheaf(MeasurementScenario scenario, std::map<Columns, Table> sections);

    const MeasurementScenario& scenario() const noexcept { return scenario_; }
    const std::map<Columns, Table>& sections() const noexcept { return sections_; }
    /// Throws SchemaError when the table's columns differ from `open`.
    void assign(const Columns& open, Table table);

    friend bool operator==(const TablePresheaf&, const TablePresheaf&) = default;

private:
    MeasurementScenario scenario_;
    std::map<Columns, Table> sections_;
};

struct PresheafViolation {
    std::optional<VersionId> version;
    Index index;
    Columns first;
    Columns second;
};

struct PresheafReport {
    bool compatible = true;
    std::vector<PresheafViolation> violations;
};

/// Rows sharing (version, index) in two opens must agree on the overlap.
PresheafReport check_compatible_presheaf(const TablePresheaf& presheaf);

/// Table-space level: every pair of tables restricts to equal tables on the
/// overlap (a compatible family of local sections of the table-space
/// presheaf).
bool is_compatible_section_family(const TablePresheaf& presheaf);

/// Adds, for each (version, index) present in several opens, the glued row
/// on the union of those opens. Idempotent. Throws CompatibilityError when
/// the presheaf is not compatible.
TablePresheaf sheafify_rows(const TablePresheaf& presheaf);

/// One relation per context, all of one semiring kind.
class RelationFamily {
public:
    /// Throws SchemaError when a relation's columns do not match its context
    /// and KindError on mixed kinds.
    RelationFamily(MeasurementScenario scenario, std::vector<Relation> sections);

    const MeasurementScenario& scenario() const noexcept { return scenario_; }
    const std::vector<Relation>& sections() const noexcept { return sections_; }
    const Relation& section(std::size_t k) const { return sections_.at(k); }
    Kind kind() const;

    friend bool operator==(const RelationFamily& a, const RelationFamily& b) {
        return a.scenario_ == b.scenario_ && a.sections_ == b.sections_;
    }

private:
    MeasurementScenario scenario_;
    std::vector<Relation> sections_;
};

/// Divides a relation by its total. Throws DegenerateTotal on a zero total.
Relation normalize_relation(const Relation& r);
RelationFamily normalize_family(const RelationFamily& f);

struct OverlapDisagreement {
    std::size_t first;   // context positions
    std::size_t second;
    Columns overlap;
    State state;
    SemiringValue first_value;
    SemiringValue second_value;
};

struct FamilyReport {
    bool compatible = true;
    std::vector<OverlapDisagreement> disagreements;
};

/// Compares ρ-restrictions to every nonempty pairwise overlap, exactly or
/// after normalizing both sides by their totals.
FamilyReport check_compatible_relation_family(const RelationFamily& family, bool up_to_normalization = false);

/// Raised by family generation when two contexts restrict differently onto
/// the same open.
struct IllDefined {
    Columns open;
    std::size_t first;
    std::size_t second;
};

template <class Section>
struct GeneratedFamily {
    std::vector<Columns> opens;
    std::vector<Section> sections;

    const Section* find(const Columns& open) const {
        for (std::size_t k = 0; k < opens.size(); ++k) {
            if (opens[k] == open) return &sections[k];
        }
        return nullptr;
    }
};

/// Assigns each target open the common restriction from every context that
/// contains it. Targets default to the nonempty opens of the lattice.
std::variant<GeneratedFamily<Relation>, IllDefined> generate_family(const RelationFamily& family,
                                                                    std::optional<std::vector<Columns>> targets = {});
std::variant<GeneratedFamily<Table>, IllDefined> generate_family(const MeasurementScenario& scenario,
                                                                 const std::vector<Table>& per_context,
                                                                 std::optional<std::vector<Columns>> targets = {});

}  // namespace sheafdb
