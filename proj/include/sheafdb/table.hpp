#pragma once

// Relations, indexed tables with missing data, versioned tables and the maps
// between them: extension (NA padding), restriction, summary, relation
// marginalization, snapshots and lifting.

#include "sheafdb/causet.hpp"
#include "sheafdb/semiring.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace sheafdb {

using VariableId = std::size_t;
/// Sorted, duplicate-free list of variable ids.
using Columns = std::vector<VariableId>;
/// Index into a variable's state space; kNA marks a missing value.
using StateCode = std::int32_t;
inline constexpr StateCode kNA = -1;
/// States aligned with some Columns.
using State = std::vector<StateCode>;
using Index = std::int64_t;
using VersionId = std::string;

struct Variable {
    std::string name;
    std::vector<std::string> states;
};

class Schema {
public:
    Schema() = default;
    /// Throws SchemaError on duplicate names, empty or duplicate state labels.
    explicit Schema(std::vector<Variable> variables);

    std::size_t size() const noexcept { return variables_.size(); }
    const std::vector<Variable>& variables() const noexcept { return variables_; }
    const Variable& variable(VariableId id) const { return variables_.at(id); }

    VariableId id_of(const std::string& name) const;
    StateCode code_of(VariableId var, const std::string& label) const;
    const std::string& label_of(VariableId var, StateCode code) const;

    /// Sorted column set for the given names.
    Columns columns(const std::vector<std::string>& names) const;
    Columns all_columns() const;
    std::vector<std::string> names(const Columns& cols) const;
    /// "{A,B}" style rendering.
    std::string describe(const Columns& cols) const;

    /// Number of NA-free states on `cols`.
    std::size_t state_count(const Columns& cols) const;

    friend bool operator==(const Schema& a, const Schema& b);

private:
    std::vector<Variable> variables_;
    std::map<std::string, VariableId> by_name_;
};

using SchemaPtr = std::shared_ptr<const Schema>;

bool is_subset(const Columns& sub, const Columns& super);
Columns column_intersection(const Columns& a, const Columns& b);
Columns column_union(const Columns& a, const Columns& b);
/// Throws ColumnError unless `cols` is sorted, unique and within the schema.
void validate_columns(const Schema& schema, const Columns& cols);

/// Calls fn on every NA-free state of Σ_cols in lexicographic order (the
/// last column varies fastest).
void for_each_state(const Schema& schema, const Columns& cols, const std::function<void(const State&)>& fn);

struct StateAssignment {
    Columns columns;
    State values;

    friend bool operator==(const StateAssignment&, const StateAssignment&) = default;
};

/// Pads the columns of `target` missing from `sigma` with NA.
StateAssignment extend_state(const StateAssignment& sigma, const Columns& target);
/// Keeps the values on `target`, NA included.
StateAssignment restrict_state(const StateAssignment& sigma, const Columns& target);

/// Total map Σ_S -> semiring, stored sparsely (absent cells are zero).
class Relation {
public:
    Relation(SchemaPtr schema, Columns columns, Kind kind);

    /// Dense constructor: `values` enumerates Σ_S in for_each_state order.
    static Relation from_dense(SchemaPtr schema, Columns columns, const std::vector<SemiringValue>& values);
    static Relation counts(SchemaPtr schema, Columns columns, const std::vector<std::int64_t>& values);

    const SchemaPtr& schema() const noexcept { return schema_; }
    const Columns& columns() const noexcept { return columns_; }
    Kind kind() const noexcept { return kind_; }

    SemiringValue at(const State& state) const;
    /// Overwrites a cell; zero erases it from the support.
    void set(const State& state, const SemiringValue& value);
    /// Adds into a cell with semiring addition.
    void accumulate(const State& state, const SemiringValue& value);

    /// Nonzero cells in lexicographic state order.
    const std::map<State, SemiringValue>& support() const noexcept { return cells_; }
    /// Values over all of Σ_S in for_each_state order.
    std::vector<SemiringValue> dense() const;
    SemiringValue total() const;

    friend bool operator==(const Relation& a, const Relation& b);

private:
    void check_state(const State& state) const;

    SchemaPtr schema_;
    Columns columns_;
    Kind kind_;
    std::map<State, SemiringValue> cells_;
};

struct Record {
    std::optional<VersionId> version;
    Index index = 0;
    State state;
    SemiringValue value;

    friend bool operator==(const Record&, const Record&) = default;
};

/// Indexed rows (i, σ, s) over NA-augmented states. Rows may carry a
/// version annotation; no two rows share the same (version, index).
class Table {
public:
    /// Throws SchemaError on out-of-range states, kind mismatch or a repeated
    /// (version, index) pair.
    Table(SchemaPtr schema, Columns columns, Kind kind, std::vector<Record> records = {});

    const SchemaPtr& schema() const noexcept { return schema_; }
    const Columns& columns() const noexcept { return columns_; }
    Kind kind() const noexcept { return kind_; }
    const std::vector<Record>& records() const noexcept { return records_; }
    std::size_t size() const noexcept { return records_.size(); }

    /// True when no index repeats, ignoring versions.
    bool has_unique_indices() const;
    bool has_missing() const;

    friend bool operator==(const Table&, const Table&);

private:
    SchemaPtr schema_;
    Columns columns_;
    Kind kind_;
    std::vector<Record> records_;
};

/// Table whose rows all carry versions drawn from a version poset.
class VersionedTable {
public:
    /// Throws SchemaError on unversioned rows and UnknownVersion on versions
    /// outside the poset.
    VersionedTable(Table rows, std::shared_ptr<const Poset> poset);

    const Table& rows() const noexcept { return rows_; }
    const std::shared_ptr<const Poset>& poset() const noexcept { return poset_; }
    const SchemaPtr& schema() const noexcept { return rows_.schema(); }
    const Columns& columns() const noexcept { return rows_.columns(); }
    Kind kind() const noexcept { return rows_.kind(); }

    friend bool operator==(const VersionedTable& a, const VersionedTable& b);

private:
    Table rows_;
    std::shared_ptr<const Poset> poset_;
};

/// ε: pads every row with NA on target ∖ columns.
Table extend_table(const Table& t, const Columns& target);
/// τ: restricts every row's state; versions, indices and values are kept.
Table restrict_table(const Table& t, const Columns& target);
VersionedTable restrict_table(const VersionedTable& t, const Columns& target);

struct Summary {
    Relation relation;
    /// Rows dropped for having NA in at least one column.
    std::size_t skipped = 0;
};

/// π_φ: sums φ(value) per complete state; rows with any NA are skipped.
/// Rejects tables whose indices repeat (raw multi-version tables).
Summary summarize_with_stats(const Table& t, const SemiringMorphism& phi);
Relation summarize(const Table& t, const SemiringMorphism& phi);

/// ℓ: one row per nonzero cell, indices 1.. in lexicographic state order.
Table lift(const Relation& r);
/// f: forgets indices of a complete, NA-free table.
Relation forget(const Table& t);
/// ρ = f ∘ π_id ∘ τ ∘ ℓ, marginalizing onto `target`.
Relation restrict_relation(const Relation& r, const Columns& target);

/// T_v: the rows committed at exactly version v.
Table commit(const VersionedTable& t, const VersionId& v);
/// T_{<=v}: per index, the row at the unique maximal version u <= v. Rows
/// keep their version as an annotation. Throws SnapshotConflict and
/// UnknownVersion.
Table snapshot(const VersionedTable& t, const VersionId& v);

/// Drops every version annotation. Throws SchemaError if that would make
/// indices collide.
Table erase_versions(const Table& t);

/// Canonical row order: by index, then version.
Table sorted_by_index(const Table& t);

}  // namespace sheafdb
