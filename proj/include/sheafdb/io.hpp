#pragma once

// File formats: CSV tables, JSON tables/relations/scenarios/families/
// patches/posets/edit scripts, and JSON renderings of results.

#include "sheafdb/causet.hpp"
#include "sheafdb/contextuality.hpp"
#include "sheafdb/snapshots.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>

namespace sheafdb::io {

using nlohmann::json;

inline constexpr const char* kDefaultNaToken = "NA";

struct CsvOptions {
    std::string na_token = kDefaultNaToken;
    /// Value kind when the file has no `value` column: each row counts 1
    /// (natural) or true (boolean).
    Kind kind = Kind::Natural;
    /// Fixed schema; when absent, states are inferred per column in sorted
    /// order (numerically when every label is an integer).
    SchemaPtr schema;
};

/// Rows of a CSV table, plus the version poset when one was supplied.
struct LoadedTable {
    Table table;
    bool versioned = false;
};

/// Header row names the variables; optional leading `version` and `index`
/// columns, optional trailing `value` column. Throws ParseError with line
/// numbers.
LoadedTable read_table_csv(std::istream& in, const CsvOptions& options = {});

std::string read_file(const std::filesystem::path& path);

json schema_to_json(const Schema& schema);
SchemaPtr schema_from_json(const json& j);

json value_to_json(const SemiringValue& v);
SemiringValue value_from_json(Kind kind, const json& j);
Rational rational_from_json(const json& j);

json relation_to_json(const Relation& r);
/// `schema` may be null when the document carries its own "schema".
Relation relation_from_json(const json& j, SchemaPtr schema = nullptr);

json table_to_json(const Table& t, const std::string& na_token = kDefaultNaToken);
json versioned_table_to_json(const VersionedTable& t, const std::string& na_token = kDefaultNaToken);

/// `{schema, columns?, kind?, rows:[{v?, i, state:{...}, value?}], poset?}`.
struct JsonTable {
    Table table;
    std::shared_ptr<const Poset> poset;
};
JsonTable table_from_json(const json& j, SchemaPtr schema = nullptr, const std::string& na_token = kDefaultNaToken);

/// Loads a table from .json or .csv (by extension).
JsonTable load_table(const std::filesystem::path& path, const CsvOptions& options = {});

json poset_to_json(const Poset& p);
Poset poset_from_json(const json& j);

/// `{variables:[{name,states}], contexts:[[...],...]}`.
json scenario_to_json(const MeasurementScenario& s);
MeasurementScenario scenario_from_json(const json& j);

/// `{agents, links:[{from,to,delay}], events:[{id,agent,t_s,t_e}]}`.
SpaceGraph space_graph_from_json(const json& j);
std::vector<Eventstamp> events_from_json(const json& j);
Patch patch_from_json(const json& j);

struct LoadedFamily {
    RelationFamily family;
    bool normalize = false;
    std::size_t skipped_rows = 0;
};

/// `{scenario: {...}|"path", sections:[{context:[...], relation: {...}|"path"}
/// | {context:[...], table: "path"}], normalize?: bool}`. Relative paths are
/// resolved against `base_dir`; table sections are summarized with the
/// counting morphism.
LoadedFamily family_from_json(const json& j, const std::filesystem::path& base_dir, const CsvOptions& options = {});

json family_to_json(const RelationFamily& f);

/// `{base: table-file, poset: {...}, edits:[{version,parent,column,
/// indices:[i,j]}], omega:{context:version}}`.
struct EditScript {
    VersionedTable table;
    std::optional<MeasurementScenario> scenario;
    std::optional<VersionAssignment> omega;
    std::vector<std::string> notes;
};
EditScript edit_script_from_json(const json& j, const std::filesystem::path& base_dir,
                                 const CsvOptions& options = {});

json certificate_to_json(const Certificate& c);
/// `{status, witness?, certificate?, stats:{nodes, pivots, time_ms}}`.
json result_to_json(const FeasibilityResult& r);
json family_report_to_json(const RelationFamily& f, const FamilyReport& r);

}  // namespace sheafdb::io
