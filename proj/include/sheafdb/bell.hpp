#pragma once

// The two Bell constructions: a missing-data table whose available-case
// summaries form the Bell family, and a versioned table whose concurrent
// snapshots do. Data is embedded so demos have no file dependencies.

#include "sheafdb/snapshots.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sheafdb::bell {

/// Binary variables A, B, A', B' (states "0", "1"), in that order.
SchemaPtr schema();
/// Contexts {A,B}, {A',B}, {A,B'}, {A',B'}.
MeasurementScenario scenario();
/// Context names in scenario order: C_AB, C_A'B, C_AB', C_A'B'.
std::vector<std::string> context_names();

/// Sixteen Boolean-valued rows with NA cells.
Table missing_data_table();
/// The four 2x2 count tables m_AB, m_A'B, m_AB', m_A'B'.
RelationFamily count_family();

/// Eight complete rows, all at version 1.
VersionedTable versioned_base();
/// The four swaps producing versions 2..5 over the tree (1 (2 (5)) (3) (4)).
std::vector<SwapEdit> swap_edits();
VersionAssignment reference_omega();
/// Expected per-context snapshots in render_table format.
std::vector<std::string> expected_snapshots();

/// "version index | A B" header followed by one line per row, sorted by
/// index. NA renders as "NA".
std::string render_table(const Table& t);

struct VersionedBell {
    VersionedTable table;
    MeasurementScenario scenario;
    VersionAssignment omega;
    ConcurrentSnapshotFamily snapshots;
    RelationFamily family;
};

/// Builds the versioned table from version 1 plus the swaps, snapshots it
/// under ω (the reference assignment by default) and summarizes each view to counts.
VersionedBell reproduce_bell_versioned(std::optional<VersionAssignment> omega = {});

/// Parses "C_AB=5,C_A'B=2,..." (or "A,B=5;...") against a scenario's
/// contexts; names may list a context's variables in any order.
VersionAssignment parse_omega(const MeasurementScenario& scenario, const std::string& text);

}  // namespace sheafdb::bell
