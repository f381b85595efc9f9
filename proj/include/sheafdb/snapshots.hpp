#pragma once

// Concurrent per-context views of a versioned table: each context reads the
// snapshot at its own version, and edits are committed as new versions.

#include "sheafdb/scenario.hpp"

#include <optional>
#include <vector>

namespace sheafdb {

/// ω: one version per context, aligned with the scenario's contexts.
struct VersionAssignment {
    std::vector<VersionId> versions;

    friend bool operator==(const VersionAssignment&, const VersionAssignment&) = default;
};

/// T^ω(C_j) = τ(T_{<=ω(C_j)}) onto C_j, one table per context.
struct ConcurrentSnapshotFamily {
    MeasurementScenario scenario;
    std::vector<Table> tables;
    VersionAssignment omega;
    VersionedTable source;

    TablePresheaf as_presheaf() const;
};

/// Throws UnknownVersion for versions outside the poset, ScenarioError when
/// ω does not cover the contexts, and SnapshotConflict naming the context
/// whose snapshot has incomparable maximal versions.
ConcurrentSnapshotFamily concurrent_snapshot(const VersionedTable& table, const MeasurementScenario& scenario,
                                             const VersionAssignment& omega);

struct PiCompatibilityReport {
    bool compatible = false;
    std::optional<RelationFamily> summaries;
    FamilyReport overlaps;
    std::optional<IllDefined> ill_defined;
};

/// Summarizes every snapshot with φ, generates the family on the opens and
/// checks it for compatibility.
PiCompatibilityReport is_pi_compatible(const ConcurrentSnapshotFamily& family, const SemiringMorphism& phi);

/// Exchange the values of `column` between two indices, committed as
/// `version` directly above `parent`.
struct SwapEdit {
    VersionId version;
    VersionId parent;
    VariableId column;
    Index first;
    Index second;
};

/// Adds the two modified full rows as a new commit. Throws EditError on an
/// unknown parent, a reused version id or indices missing from the parent
/// snapshot, and VacuousEdit when the two values are equal.
VersionedTable apply_swap_edit(const VersionedTable& table, const SwapEdit& edit);

/// Replaces whole rows; any change is allowed.
struct RowEdit {
    VersionId version;
    VersionId parent;
    std::vector<std::pair<Index, State>> rows;
};

struct EditOutcome {
    VersionedTable table;
    /// Every single-variable count marginal at the new version equals the
    /// parent's.
    bool preserves_marginals;
};

EditOutcome apply_row_edit(const VersionedTable& table, const RowEdit& edit);

/// Compares single-variable count marginals of the snapshots at two versions.
bool single_variable_marginals_equal(const VersionedTable& table, const VersionId& a, const VersionId& b);

}  // namespace sheafdb
