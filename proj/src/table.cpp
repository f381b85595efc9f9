#include "sheafdb/table.hpp"

#include "sheafdb/errors.hpp"

#include <algorithm>
#include <set>
#include <utility>

namespace sheafdb {

namespace {

bool same_schema(const SchemaPtr& a, const SchemaPtr& b) { return a == b || (a && b && *a == *b); }

// Positions of `sub` inside `super`; both sorted, sub ⊆ super.
std::vector<std::size_t> positions_in(const Columns& sub, const Columns& super) {
    std::vector<std::size_t> pos;
    pos.reserve(sub.size());
    for (VariableId v : sub) {
        auto it = std::lower_bound(super.begin(), super.end(), v);
        pos.push_back(static_cast<std::size_t>(it - super.begin()));
    }
    return pos;
}

void require_subset(const Columns& sub, const Columns& super, const char* what) {
    if (!is_subset(sub, super)) throw ColumnError(std::string(what) + ": target columns are not a subset of the source");
}

bool sorted_unique(const Columns& cols) {
    return std::adjacent_find(cols.begin(), cols.end(), std::greater_equal<>()) == cols.end();
}

}  // namespace

// Schema

Schema::Schema(std::vector<Variable> variables) : variables_(std::move(variables)) {
    for (VariableId i = 0; i < variables_.size(); ++i) {
        const auto& v = variables_[i];
        if (v.name.empty()) throw SchemaError("variable with empty name");
        if (!by_name_.emplace(v.name, i).second) throw SchemaError("duplicate variable '" + v.name + "'");
        if (v.states.empty()) throw SchemaError("variable '" + v.name + "' has an empty state space");
        std::set<std::string> seen(v.states.begin(), v.states.end());
        if (seen.size() != v.states.size()) throw SchemaError("variable '" + v.name + "' has duplicate states");
    }
}

VariableId Schema::id_of(const std::string& name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) throw ColumnError("unknown variable '" + name + "'");
    return it->second;
}

StateCode Schema::code_of(VariableId var, const std::string& label) const {
    const auto& states = variable(var).states;
    auto it = std::find(states.begin(), states.end(), label);
    if (it == states.end()) {
        throw SchemaError("state '" + label + "' not in the state space of '" + variable(var).name + "'");
    }
    return static_cast<StateCode>(it - states.begin());
}

const std::string& Schema::label_of(VariableId var, StateCode code) const {
    const auto& states = variable(var).states;
    if (code < 0 || static_cast<std::size_t>(code) >= states.size()) {
        throw SchemaError("state code out of range for '" + variable(var).name + "'");
    }
    return states[static_cast<std::size_t>(code)];
}

Columns Schema::columns(const std::vector<std::string>& names) const {
    Columns cols;
    for (const auto& n : names) cols.push_back(id_of(n));
    std::sort(cols.begin(), cols.end());
    if (!sorted_unique(cols)) throw ColumnError("repeated column in " + describe(cols));
    return cols;
}

Columns Schema::all_columns() const {
    Columns cols(variables_.size());
    for (VariableId i = 0; i < cols.size(); ++i) cols[i] = i;
    return cols;
}

std::vector<std::string> Schema::names(const Columns& cols) const {
    std::vector<std::string> out;
    for (VariableId v : cols) out.push_back(variable(v).name);
    return out;
}

std::string Schema::describe(const Columns& cols) const {
    std::string out = "{";
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i) out += ",";
        out += cols[i] < variables_.size() ? variables_[cols[i]].name : "?";
    }
    return out + "}";
}

std::size_t Schema::state_count(const Columns& cols) const {
    std::size_t n = 1;
    for (VariableId v : cols) n *= variable(v).states.size();
    return n;
}

bool operator==(const Schema& a, const Schema& b) {
    if (a.variables_.size() != b.variables_.size()) return false;
    for (std::size_t i = 0; i < a.variables_.size(); ++i) {
        if (a.variables_[i].name != b.variables_[i].name || a.variables_[i].states != b.variables_[i].states) {
            return false;
        }
    }
    return true;
}

// Column sets and states

bool is_subset(const Columns& sub, const Columns& super) {
    return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

Columns column_intersection(const Columns& a, const Columns& b) {
    Columns out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

Columns column_union(const Columns& a, const Columns& b) {
    Columns out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

void validate_columns(const Schema& schema, const Columns& cols) {
    if (!sorted_unique(cols)) throw ColumnError("column set must be sorted and duplicate-free");
    for (VariableId v : cols) {
        if (v >= schema.size()) throw ColumnError("column id " + std::to_string(v) + " outside the schema");
    }
}

void for_each_state(const Schema& schema, const Columns& cols, const std::function<void(const State&)>& fn) {
    State s(cols.size(), 0);
    while (true) {
        fn(s);
        std::size_t k = cols.size();
        while (k > 0) {
            --k;
            if (static_cast<std::size_t>(++s[k]) < schema.variable(cols[k]).states.size()) break;
            s[k] = 0;
            if (k == 0) return;
        }
        if (cols.empty()) return;
    }
}

StateAssignment extend_state(const StateAssignment& sigma, const Columns& target) {
    require_subset(sigma.columns, target, "extend_state");
    StateAssignment out{target, State(target.size(), kNA)};
    auto pos = positions_in(sigma.columns, target);
    for (std::size_t k = 0; k < pos.size(); ++k) out.values[pos[k]] = sigma.values[k];
    return out;
}

StateAssignment restrict_state(const StateAssignment& sigma, const Columns& target) {
    require_subset(target, sigma.columns, "restrict_state");
    StateAssignment out{target, State(target.size(), kNA)};
    auto pos = positions_in(target, sigma.columns);
    for (std::size_t k = 0; k < pos.size(); ++k) out.values[k] = sigma.values[pos[k]];
    return out;
}

// Relation

Relation::Relation(SchemaPtr schema, Columns columns, Kind kind)
    : schema_(std::move(schema)), columns_(std::move(columns)), kind_(kind) {
    if (!schema_) throw SchemaError("relation without schema");
    validate_columns(*schema_, columns_);
}

Relation Relation::from_dense(SchemaPtr schema, Columns columns, const std::vector<SemiringValue>& values) {
    if (values.empty()) throw SchemaError("from_dense needs at least one value to fix the kind");
    Relation r(std::move(schema), std::move(columns), values.front().kind());
    if (values.size() != r.schema_->state_count(r.columns_)) {
        throw SchemaError("from_dense: expected " + std::to_string(r.schema_->state_count(r.columns_)) +
                          " values, got " + std::to_string(values.size()));
    }
    std::size_t k = 0;
    for_each_state(*r.schema_, r.columns_, [&](const State& s) { r.set(s, values[k++]); });
    return r;
}

Relation Relation::counts(SchemaPtr schema, Columns columns, const std::vector<std::int64_t>& values) {
    std::vector<SemiringValue> vals;
    for (auto v : values) vals.push_back(SemiringValue::natural(v));
    return from_dense(std::move(schema), std::move(columns), vals);
}

void Relation::check_state(const State& state) const {
    if (state.size() != columns_.size()) throw SchemaError("state width does not match relation columns");
    for (std::size_t k = 0; k < state.size(); ++k) {
        if (state[k] == kNA) throw SchemaError("relations have no NA states");
        if (state[k] < 0 || static_cast<std::size_t>(state[k]) >= schema_->variable(columns_[k]).states.size()) {
            throw SchemaError("state code out of range");
        }
    }
}

SemiringValue Relation::at(const State& state) const {
    check_state(state);
    auto it = cells_.find(state);
    return it == cells_.end() ? SemiringValue::zero(kind_) : it->second;
}

void Relation::set(const State& state, const SemiringValue& value) {
    check_state(state);
    if (value.kind() != kind_) throw KindError("relation cell kind mismatch");
    if (value.is_zero()) {
        cells_.erase(state);
    } else {
        cells_[state] = value;
    }
}

void Relation::accumulate(const State& state, const SemiringValue& value) { set(state, add(at(state), value)); }

std::vector<SemiringValue> Relation::dense() const {
    std::vector<SemiringValue> out;
    for_each_state(*schema_, columns_, [&](const State& s) {
        auto it = cells_.find(s);
        out.push_back(it == cells_.end() ? SemiringValue::zero(kind_) : it->second);
    });
    return out;
}

SemiringValue Relation::total() const {
    SemiringValue sum = SemiringValue::zero(kind_);
    for (const auto& [s, v] : cells_) sum = add(sum, v);
    return sum;
}

bool operator==(const Relation& a, const Relation& b) {
    return a.kind_ == b.kind_ && a.columns_ == b.columns_ && same_schema(a.schema_, b.schema_) && a.cells_ == b.cells_;
}

// Table

Table::Table(SchemaPtr schema, Columns columns, Kind kind, std::vector<Record> records)
    : schema_(std::move(schema)), columns_(std::move(columns)), kind_(kind), records_(std::move(records)) {
    if (!schema_) throw SchemaError("table without schema");
    validate_columns(*schema_, columns_);
    std::set<std::pair<std::optional<VersionId>, Index>> keys;
    for (const auto& r : records_) {
        if (r.state.size() != columns_.size()) {
            throw SchemaError("row " + std::to_string(r.index) + " has the wrong number of states");
        }
        for (std::size_t k = 0; k < r.state.size(); ++k) {
            StateCode c = r.state[k];
            if (c != kNA && (c < 0 || static_cast<std::size_t>(c) >= schema_->variable(columns_[k]).states.size())) {
                throw SchemaError("row " + std::to_string(r.index) + " has an out-of-range state");
            }
        }
        if (r.value.kind() != kind_) throw KindError("row " + std::to_string(r.index) + " has the wrong value kind");
        if (!keys.emplace(r.version, r.index).second) {
            throw SchemaError("duplicate (version, index) (" + r.version.value_or("-") + ", " +
                              std::to_string(r.index) + ")");
        }
    }
}

bool Table::has_unique_indices() const {
    std::set<Index> seen;
    for (const auto& r : records_) {
        if (!seen.insert(r.index).second) return false;
    }
    return true;
}

bool Table::has_missing() const {
    return std::any_of(records_.begin(), records_.end(), [](const Record& r) {
        return std::find(r.state.begin(), r.state.end(), kNA) != r.state.end();
    });
}

bool operator==(const Table& a, const Table& b) {
    if (a.kind_ != b.kind_ || a.columns_ != b.columns_ || !same_schema(a.schema_, b.schema_)) return false;
    return sorted_by_index(a).records_ == sorted_by_index(b).records_;
}

VersionedTable::VersionedTable(Table rows, std::shared_ptr<const Poset> poset)
    : rows_(std::move(rows)), poset_(std::move(poset)) {
    if (!poset_) throw SchemaError("versioned table without a version poset");
    for (const auto& r : rows_.records()) {
        if (!r.version) throw SchemaError("row " + std::to_string(r.index) + " has no version");
        if (!poset_->contains(*r.version)) throw UnknownVersion("unknown version '" + *r.version + "'");
    }
}

bool operator==(const VersionedTable& a, const VersionedTable& b) {
    return a.rows_ == b.rows_ && (a.poset_ == b.poset_ || *a.poset_ == *b.poset_);
}

// Structure maps

Table extend_table(const Table& t, const Columns& target) {
    validate_columns(*t.schema(), target);
    require_subset(t.columns(), target, "extend_table");
    std::vector<Record> out;
    out.reserve(t.size());
    for (const auto& r : t.records()) {
        out.push_back({r.version, r.index, extend_state({t.columns(), r.state}, target).values, r.value});
    }
    return Table(t.schema(), target, t.kind(), std::move(out));
}

Table restrict_table(const Table& t, const Columns& target) {
    require_subset(target, t.columns(), "restrict_table");
    std::vector<Record> out;
    out.reserve(t.size());
    for (const auto& r : t.records()) {
        out.push_back({r.version, r.index, restrict_state({t.columns(), r.state}, target).values, r.value});
    }
    return Table(t.schema(), target, t.kind(), std::move(out));
}

VersionedTable restrict_table(const VersionedTable& t, const Columns& target) {
    return VersionedTable(restrict_table(t.rows(), target), t.poset());
}

Summary summarize_with_stats(const Table& t, const SemiringMorphism& phi) {
    if (phi.source() != t.kind()) {
        throw KindError("summary morphism expects " + std::string(to_string(phi.source())) + " values, table holds " +
                        std::string(to_string(t.kind())));
    }
    if (!t.has_unique_indices()) {
        throw SchemaError("cannot summarize a table whose indices repeat across versions; take a commit or snapshot first");
    }
    Summary out{Relation(t.schema(), t.columns(), phi.target()), 0};
    for (const auto& r : t.records()) {
        if (std::find(r.state.begin(), r.state.end(), kNA) != r.state.end()) {
            ++out.skipped;
            continue;
        }
        out.relation.accumulate(r.state, phi(r.value));
    }
    return out;
}

Relation summarize(const Table& t, const SemiringMorphism& phi) { return summarize_with_stats(t, phi).relation; }

Table lift(const Relation& r) {
    std::vector<Record> rows;
    Index next = 1;
    for (const auto& [state, value] : r.support()) rows.push_back({std::nullopt, next++, state, value});
    return Table(r.schema(), r.columns(), r.kind(), std::move(rows));
}

Relation forget(const Table& t) {
    if (t.has_missing()) throw SchemaError("forget requires a table without NA");
    return summarize(t, SemiringMorphism::identity(t.kind()));
}

Relation restrict_relation(const Relation& r, const Columns& target) {
    require_subset(target, r.columns(), "restrict_relation");
    return forget(restrict_table(lift(r), target));
}

Table commit(const VersionedTable& t, const VersionId& v) {
    if (!t.poset()->contains(v)) throw UnknownVersion("unknown version '" + v + "'");
    std::vector<Record> rows;
    for (const auto& r : t.rows().records()) {
        if (r.version == v) rows.push_back(r);
    }
    return Table(t.schema(), t.columns(), t.kind(), std::move(rows));
}

Table snapshot(const VersionedTable& t, const VersionId& v) {
    const Poset& poset = *t.poset();
    if (!poset.contains(v)) throw UnknownVersion("unknown version '" + v + "'");

    std::map<Index, std::vector<const Record*>> candidates;
    for (const auto& r : t.rows().records()) {
        if (poset.leq(*r.version, v)) candidates[r.index].push_back(&r);
    }
    std::vector<Record> rows;
    std::vector<Index> conflicts;
    for (const auto& [index, recs] : candidates) {
        std::vector<const Record*> maximal;
        for (const Record* a : recs) {
            bool dominated = std::any_of(recs.begin(), recs.end(),
                                         [&](const Record* b) { return poset.less(*a->version, *b->version); });
            if (!dominated) maximal.push_back(a);
        }
        if (maximal.size() == 1) {
            rows.push_back(*maximal.front());
        } else {
            conflicts.push_back(index);
        }
    }
    if (!conflicts.empty()) {
        std::string list;
        for (Index i : conflicts) list += (list.empty() ? "" : ", ") + std::to_string(i);
        throw SnapshotConflict("snapshot at version '" + v + "' has incomparable maximal versions for indices " + list,
                               std::move(conflicts));
    }
    return Table(t.schema(), t.columns(), t.kind(), std::move(rows));
}

Table erase_versions(const Table& t) {
    std::vector<Record> rows = t.records();
    for (auto& r : rows) r.version.reset();
    return Table(t.schema(), t.columns(), t.kind(), std::move(rows));
}

Table sorted_by_index(const Table& t) {
    std::vector<Record> rows = t.records();
    std::sort(rows.begin(), rows.end(), [](const Record& a, const Record& b) {
        return std::tie(a.index, a.version) < std::tie(b.index, b.version);
    });
    return Table(t.schema(), t.columns(), t.kind(), std::move(rows));
}

}  // namespace sheafdb
