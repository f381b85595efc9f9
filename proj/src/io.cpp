#include "sheafdb/io.hpp"

#include "sheafdb/bell.hpp"
#include "sheafdb/errors.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>

namespace sheafdb::io {

namespace {

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cell += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cell += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(trim(cell));
            cell.clear();
        } else {
            cell += c;
        }
    }
    out.push_back(trim(cell));
    return out;
}

bool is_integer(const std::string& s) {
    long long v;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc() && p == s.data() + s.size();
}

Index parse_index(const std::string& s, std::size_t line) {
    Index v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw ParseError("index '" + s + "' is not an integer", line);
    return v;
}

std::string scalar_text(const json& j) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number() || j.is_boolean()) return j.dump();
    throw ParseError("expected a scalar, got " + j.dump());
}

std::vector<std::string> string_list(const json& j, const char* what) {
    if (!j.is_array()) throw ParseError(std::string(what) + " must be an array");
    std::vector<std::string> out;
    for (const auto& e : j) out.push_back(scalar_text(e));
    return out;
}

json state_to_json(const Schema& schema, const Columns& cols, const State& s, const std::string& na) {
    json out = json::object();
    for (std::size_t k = 0; k < cols.size(); ++k) {
        out[schema.variable(cols[k]).name] = s[k] == kNA ? na : schema.label_of(cols[k], s[k]);
    }
    return out;
}

State state_from_json(const Schema& schema, const Columns& cols, const json& j, const std::string& na) {
    if (!j.is_object()) throw ParseError("state must be an object of variable -> label");
    State s(cols.size(), kNA);
    for (std::size_t k = 0; k < cols.size(); ++k) {
        const std::string& name = schema.variable(cols[k]).name;
        if (!j.contains(name)) {
            s[k] = kNA;
            continue;
        }
        std::string label = scalar_text(j.at(name));
        s[k] = label == na ? kNA : schema.code_of(cols[k], label);
    }
    for (const auto& [name, value] : j.items()) {
        VariableId v = schema.id_of(name);
        if (!std::binary_search(cols.begin(), cols.end(), v)) {
            throw ParseError("state mentions variable '" + name + "' outside the columns");
        }
        (void)value;
    }
    return s;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

json load_json_file(const std::filesystem::path& path) {
    try {
        return json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// CSV

LoadedTable read_table_csv(std::istream& in, const CsvOptions& options) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) {
            header = split_csv_line(line);
            break;
        }
    }
    if (header.empty()) throw ParseError("missing header row", line_no ? line_no : 1);

    std::size_t first_var = 0;
    bool has_version = false, has_index = false, has_value = false;
    if (first_var < header.size() && header[first_var] == "version") {
        has_version = true;
        ++first_var;
    }
    if (first_var < header.size() && header[first_var] == "index") {
        has_index = true;
        ++first_var;
    }
    std::size_t last_var = header.size();
    if (last_var > first_var && header[last_var - 1] == "value") {
        has_value = true;
        --last_var;
    }
    std::vector<std::string> names(header.begin() + static_cast<std::ptrdiff_t>(first_var),
                                   header.begin() + static_cast<std::ptrdiff_t>(last_var));

    struct RawRow {
        std::size_t line;
        std::vector<std::string> cells;
    };
    std::vector<RawRow> raw;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw ParseError("expected " + std::to_string(header.size()) + " fields, got " +
                                 std::to_string(cells.size()),
                             line_no);
        }
        raw.push_back({line_no, std::move(cells)});
    }

    SchemaPtr schema = options.schema;
    if (!schema) {
        std::vector<Variable> vars;
        for (std::size_t k = 0; k < names.size(); ++k) {
            std::set<std::string> labels;
            for (const auto& r : raw) {
                const auto& c = r.cells[first_var + k];
                if (c != options.na_token) labels.insert(c);
            }
            if (labels.empty()) {
                throw ParseError("column '" + names[k] + "' has no observed states; supply a schema");
            }
            std::vector<std::string> states(labels.begin(), labels.end());
            if (std::all_of(states.begin(), states.end(), is_integer)) {
                std::sort(states.begin(), states.end(),
                          [](const std::string& a, const std::string& b) { return std::stoll(a) < std::stoll(b); });
            }
            vars.push_back({names[k], std::move(states)});
        }
        schema = std::make_shared<const Schema>(std::move(vars));
    }
    Columns cols;
    try {
        cols = schema->columns(names);
    } catch (const Error& e) {
        throw ParseError(e.what(), 1);
    }
    // Map file column order to the sorted column order.
    std::vector<std::size_t> slot(names.size());
    for (std::size_t k = 0; k < names.size(); ++k) {
        slot[k] = static_cast<std::size_t>(std::lower_bound(cols.begin(), cols.end(), schema->id_of(names[k])) -
                                           cols.begin());
    }

    std::vector<Record> records;
    Index next_index = 1;
    for (const auto& r : raw) {
        Record rec;
        try {
            if (has_version) rec.version = r.cells[0];
            rec.index = has_index ? parse_index(r.cells[has_version ? 1 : 0], r.line) : next_index++;
            rec.state.assign(cols.size(), kNA);
            for (std::size_t k = 0; k < names.size(); ++k) {
                const auto& c = r.cells[first_var + k];
                rec.state[slot[k]] = c == options.na_token ? kNA : schema->code_of(cols[slot[k]], c);
            }
            rec.value = has_value ? SemiringValue::parse(options.kind, r.cells.back())
                                  : SemiringValue::one(options.kind);
        } catch (const ParseError& e) {
            if (e.line()) throw;
            throw ParseError(e.what(), r.line);
        } catch (const Error& e) {
            throw ParseError(e.what(), r.line);
        }
        records.push_back(std::move(rec));
    }
    try {
        return {Table(schema, cols, options.kind, std::move(records)), has_version};
    } catch (const Error& e) {
        throw ParseError(e.what());
    }
}

// Schema and values

json schema_to_json(const Schema& schema) {
    json vars = json::array();
    for (const auto& v : schema.variables()) vars.push_back({{"name", v.name}, {"states", v.states}});
    return {{"variables", vars}};
}

SchemaPtr schema_from_json(const json& j) {
    const json& vars = j.is_array() ? j : j.at("variables");
    std::vector<Variable> out;
    for (const auto& v : vars) out.push_back({v.at("name").get<std::string>(), string_list(v.at("states"), "states")});
    return std::make_shared<const Schema>(std::move(out));
}

json value_to_json(const SemiringValue& v) {
    switch (v.kind()) {
        case Kind::Boolean: return v.as_bool();
        case Kind::Natural:
        case Kind::Integer: return v.as_int();
        case Kind::NonnegRational: return v.to_string();
    }
    return nullptr;
}

SemiringValue value_from_json(Kind kind, const json& j) {
    if (kind == Kind::Boolean && j.is_boolean()) return SemiringValue::boolean(j.get<bool>());
    if (kind == Kind::NonnegRational && j.is_number()) return SemiringValue::rational(rational_from_json(j));
    return SemiringValue::parse(kind, scalar_text(j));
}

Rational rational_from_json(const json& j) {
    // Floats are re-read from their shortest decimal rendering, so 0.1 is 1/10.
    return parse_rational(scalar_text(j));
}

// Relations and tables

json relation_to_json(const Relation& r) {
    const Schema& schema = *r.schema();
    json cells = json::array();
    for (const auto& [s, v] : r.support()) {
        cells.push_back({{"state", state_to_json(schema, r.columns(), s, kDefaultNaToken)}, {"value", value_to_json(v)}});
    }
    return {{"schema", schema_to_json(schema)},
            {"columns", schema.names(r.columns())},
            {"kind", std::string(to_string(r.kind()))},
            {"cells", cells}};
}

Relation relation_from_json(const json& j, SchemaPtr schema) {
    try {
        if (j.contains("schema")) {
            SchemaPtr own = schema_from_json(j.at("schema"));
            if (schema && !(*own == *schema)) throw ParseError("relation schema differs from the expected schema");
            if (!schema) schema = own;
        }
        if (!schema) throw ParseError("relation has no schema");
        Columns cols = schema->columns(string_list(j.at("columns"), "columns"));
        Kind kind = j.contains("kind") ? parse_kind(j.at("kind").get<std::string>()) : Kind::Natural;
        Relation r(schema, cols, kind);
        for (const auto& cell : j.at("cells")) {
            State s = state_from_json(*schema, cols, cell.at("state"), kDefaultNaToken);
            r.accumulate(s, value_from_json(kind, cell.at("value")));
        }
        return r;
    } catch (const json::exception& e) {
        throw ParseError(std::string("relation: ") + e.what());
    }
}

json table_to_json(const Table& t, const std::string& na_token) {
    const Schema& schema = *t.schema();
    json rows = json::array();
    for (const auto& r : t.records()) {
        json row = {{"i", r.index}, {"state", state_to_json(schema, t.columns(), r.state, na_token)},
                    {"value", value_to_json(r.value)}};
        if (r.version) row["v"] = *r.version;
        rows.push_back(std::move(row));
    }
    return {{"schema", schema_to_json(schema)},
            {"columns", schema.names(t.columns())},
            {"kind", std::string(to_string(t.kind()))},
            {"rows", rows}};
}

json versioned_table_to_json(const VersionedTable& t, const std::string& na_token) {
    json j = table_to_json(t.rows(), na_token);
    j["poset"] = poset_to_json(*t.poset());
    return j;
}

JsonTable table_from_json(const json& j, SchemaPtr schema, const std::string& na_token) {
    try {
        if (j.contains("schema")) schema = schema_from_json(j.at("schema"));
        if (!schema) throw ParseError("table has no schema");
        Columns cols = j.contains("columns") ? schema->columns(string_list(j.at("columns"), "columns"))
                                             : schema->all_columns();
        Kind kind = j.contains("kind") ? parse_kind(j.at("kind").get<std::string>()) : Kind::Natural;
        std::string na = j.value("na_token", na_token);
        std::vector<Record> rows;
        for (const auto& row : j.at("rows")) {
            Record r;
            if (row.contains("v")) r.version = scalar_text(row.at("v"));
            r.index = row.at("i").get<Index>();
            r.state = state_from_json(*schema, cols, row.at("state"), na);
            r.value = row.contains("value") ? value_from_json(kind, row.at("value")) : SemiringValue::one(kind);
            rows.push_back(std::move(r));
        }
        JsonTable out{Table(schema, cols, kind, std::move(rows)), nullptr};
        if (j.contains("poset")) out.poset = std::make_shared<const Poset>(poset_from_json(j.at("poset")));
        return out;
    } catch (const json::exception& e) {
        throw ParseError(std::string("table: ") + e.what());
    }
}

JsonTable load_table(const std::filesystem::path& path, const CsvOptions& options) {
    if (path.extension() == ".json") return table_from_json(load_json_file(path), options.schema, options.na_token);
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    try {
        return {read_table_csv(in, options).table, nullptr};
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

// Posets, scenarios, patches

json poset_to_json(const Poset& p) {
    json covers = json::array();
    for (const auto& [u, v] : p.covers()) covers.push_back({u, v});
    return {{"versions", p.elements()}, {"covers", covers}};
}

Poset poset_from_json(const json& j) {
    try {
        std::vector<std::pair<std::string, std::string>> rel;
        if (j.contains("covers")) {
            for (const auto& c : j.at("covers")) {
                if (!c.is_array() || c.size() != 2) throw ParseError("cover must be a pair [u, v]");
                rel.emplace_back(scalar_text(c[0]), scalar_text(c[1]));
            }
        }
        return Poset::from_relations(string_list(j.at("versions"), "versions"), rel);
    } catch (const json::exception& e) {
        throw ParseError(std::string("poset: ") + e.what());
    }
}

json scenario_to_json(const MeasurementScenario& s) {
    json j = schema_to_json(*s.schema());
    json contexts = json::array();
    for (const auto& c : s.contexts()) contexts.push_back(s.schema()->names(c));
    j["contexts"] = contexts;
    return j;
}

MeasurementScenario scenario_from_json(const json& j) {
    try {
        SchemaPtr schema = schema_from_json(j);
        std::vector<Columns> contexts;
        for (const auto& c : j.at("contexts")) contexts.push_back(schema->columns(string_list(c, "context")));
        return MeasurementScenario(schema, std::move(contexts));
    } catch (const json::exception& e) {
        throw ParseError(std::string("scenario: ") + e.what());
    }
}

SpaceGraph space_graph_from_json(const json& j) {
    try {
        std::vector<Link> links;
        if (j.contains("links")) {
            for (const auto& l : j.at("links")) {
                links.push_back({scalar_text(l.at("from")), scalar_text(l.at("to")), rational_from_json(l.at("delay"))});
            }
        }
        return SpaceGraph(string_list(j.at("agents"), "agents"), std::move(links));
    } catch (const json::exception& e) {
        throw ParseError(std::string("patch: ") + e.what());
    }
}

std::vector<Eventstamp> events_from_json(const json& j) {
    try {
        std::vector<Eventstamp> out;
        for (const auto& e : j.at("events")) {
            out.push_back({scalar_text(e.at("id")), scalar_text(e.at("agent")), rational_from_json(e.at("t_s")),
                           rational_from_json(e.at("t_e"))});
        }
        return out;
    } catch (const json::exception& e) {
        throw ParseError(std::string("patch: ") + e.what());
    }
}

Patch patch_from_json(const json& j) { return build_patch(space_graph_from_json(j), events_from_json(j)); }

// Families

LoadedFamily family_from_json(const json& j, const std::filesystem::path& base_dir, const CsvOptions& options) {
    try {
        json scenario_json = j.at("scenario");
        if (scenario_json.is_string()) scenario_json = load_json_file(resolve(base_dir, scenario_json.get<std::string>()));
        MeasurementScenario scenario = scenario_from_json(scenario_json);
        const Schema& schema = *scenario.schema();

        std::vector<std::optional<Relation>> sections(scenario.size());
        std::size_t skipped = 0;
        for (const auto& sec : j.at("sections")) {
            Columns ctx = schema.columns(string_list(sec.at("context"), "context"));
            auto pos = scenario.find(ctx);
            if (!pos) throw ParseError("section context " + schema.describe(ctx) + " is not a scenario context");
            if (sections[*pos]) throw ParseError("context " + schema.describe(ctx) + " has two sections");
            if (sec.contains("relation")) {
                json rel = sec.at("relation");
                if (rel.is_string()) rel = load_json_file(resolve(base_dir, rel.get<std::string>()));
                sections[*pos] = relation_from_json(rel, scenario.schema());
            } else if (sec.contains("table")) {
                CsvOptions opts = options;
                opts.schema = scenario.schema();
                JsonTable t = load_table(resolve(base_dir, sec.at("table").get<std::string>()), opts);
                if (!(*t.table.schema() == schema)) throw ParseError("table schema differs from scenario schema");
                // Re-home the table on the scenario schema before restricting.
                Table rehomed(scenario.schema(), t.table.columns(), t.table.kind(), t.table.records());
                Summary s = summarize_with_stats(restrict_table(rehomed, ctx), SemiringMorphism::counting(rehomed.kind()));
                skipped += s.skipped;
                sections[*pos] = std::move(s.relation);
            } else {
                throw ParseError("section needs a 'relation' or a 'table'");
            }
        }
        std::vector<Relation> rels;
        for (std::size_t k = 0; k < sections.size(); ++k) {
            if (!sections[k]) throw ParseError("context " + schema.describe(scenario.contexts()[k]) + " has no section");
            rels.push_back(std::move(*sections[k]));
        }
        return {RelationFamily(scenario, std::move(rels)), j.value("normalize", false), skipped};
    } catch (const json::exception& e) {
        throw ParseError(std::string("family: ") + e.what());
    }
}

json family_to_json(const RelationFamily& f) {
    json sections = json::array();
    const Schema& schema = *f.scenario().schema();
    for (std::size_t k = 0; k < f.scenario().size(); ++k) {
        json rel = relation_to_json(f.section(k));
        rel.erase("schema");
        sections.push_back({{"context", schema.names(f.scenario().contexts()[k])}, {"relation", rel}});
    }
    return {{"scenario", scenario_to_json(f.scenario())}, {"sections", sections}};
}

EditScript edit_script_from_json(const json& j, const std::filesystem::path& base_dir, const CsvOptions& options) {
    try {
        JsonTable base = [&] {
            const json& b = j.at("base");
            if (b.is_string()) return load_table(resolve(base_dir, b.get<std::string>()), options);
            return table_from_json(b, options.schema, options.na_token);
        }();
        std::shared_ptr<const Poset> poset = base.poset;
        if (j.contains("poset")) poset = std::make_shared<const Poset>(poset_from_json(j.at("poset")));
        if (!poset) {
            std::vector<std::string> versions;
            for (const auto& r : base.table.records()) {
                if (r.version && std::find(versions.begin(), versions.end(), *r.version) == versions.end()) {
                    versions.push_back(*r.version);
                }
            }
            poset = std::make_shared<const Poset>(Poset::from_relations(versions, {}));
        }
        EditScript script{VersionedTable(base.table, poset), std::nullopt, std::nullopt, {}};
        const Schema& schema = *script.table.schema();
        if (j.contains("edits")) {
            for (const auto& e : j.at("edits")) {
                std::string version = scalar_text(e.at("version"));
                std::string parent = scalar_text(e.at("parent"));
                if (e.contains("indices")) {
                    const auto& idx = e.at("indices");
                    if (!idx.is_array() || idx.size() != 2) throw ParseError("swap edit needs two indices");
                    SwapEdit swap{version, parent, schema.id_of(e.at("column").get<std::string>()),
                                  idx[0].get<Index>(), idx[1].get<Index>()};
                    script.table = apply_swap_edit(script.table, swap);
                } else {
                    RowEdit edit{version, parent, {}};
                    for (const auto& row : e.at("rows")) {
                        edit.rows.emplace_back(row.at("i").get<Index>(),
                                               state_from_json(schema, script.table.columns(), row.at("state"),
                                                               options.na_token));
                    }
                    EditOutcome outcome = apply_row_edit(script.table, edit);
                    if (!outcome.preserves_marginals) {
                        script.notes.push_back("edit " + version + " breaks the single-variable marginal invariant");
                    }
                    script.table = std::move(outcome.table);
                }
            }
        }
        if (j.contains("scenario")) {
            json sj = j.at("scenario");
            if (sj.is_string()) sj = load_json_file(resolve(base_dir, sj.get<std::string>()));
            script.scenario = scenario_from_json(sj);
        }
        if (j.contains("omega")) {
            const json& om = j.at("omega");
            if (!script.scenario) {
                // Contexts come from the omega keys, written "A,B".
                std::vector<Columns> contexts;
                for (const auto& [key, value] : om.items()) {
                    std::vector<std::string> names;
                    std::istringstream ss(key);
                    std::string n;
                    while (std::getline(ss, n, ',')) names.push_back(trim(n));
                    contexts.push_back(schema.columns(names));
                    (void)value;
                }
                script.scenario = MeasurementScenario(script.table.schema(), std::move(contexts));
            }
            VersionAssignment w;
            bool named = std::all_of(om.items().begin(), om.items().end(),
                                     [](const auto& kv) { return kv.key().find(',') == std::string::npos; });
            if (named) {
                std::string text;
                for (const auto& [key, value] : om.items()) text += key + "=" + scalar_text(value) + ",";
                w = bell::parse_omega(*script.scenario, text);
            } else {
                w.versions.assign(script.scenario->size(), "");
                for (const auto& [key, value] : om.items()) {
                    std::vector<std::string> names;
                    std::istringstream ss(key);
                    std::string n;
                    while (std::getline(ss, n, ',')) names.push_back(trim(n));
                    auto pos = script.scenario->find(schema.columns(names));
                    if (!pos) throw ParseError("omega key '" + key + "' names no context");
                    w.versions[*pos] = scalar_text(value);
                }
                for (std::size_t k = 0; k < w.versions.size(); ++k) {
                    if (w.versions[k].empty()) {
                        throw ParseError("omega does not assign context " +
                                         schema.describe(script.scenario->contexts()[k]));
                    }
                }
            }
            script.omega = std::move(w);
        }
        return script;
    } catch (const json::exception& e) {
        throw ParseError(std::string("edit script: ") + e.what());
    }
}

// Results

json certificate_to_json(const Certificate& c) {
    json j = {{"type", c.type == Certificate::Type::Farkas ? "farkas" : "exhaustive-search"}, {"summary", c.summary}};
    if (!c.multipliers.empty()) {
        json m = json::array();
        for (const auto& q : c.multipliers) m.push_back(format_rational(q));
        j["multipliers"] = m;
    }
    if (c.row_elimination) j["row_elimination"] = *c.row_elimination;
    return j;
}

json result_to_json(const FeasibilityResult& r) {
    json j = {{"status", std::string(to_string(r.status))},
              {"stats", {{"nodes", r.stats.nodes}, {"pivots", r.stats.pivots}, {"time_ms", r.stats.time_ms}}}};
    if (r.witness) {
        json w = relation_to_json(*r.witness);
        w.erase("schema");
        j["witness"] = w;
    }
    if (r.certificate) j["certificate"] = certificate_to_json(*r.certificate);
    return j;
}

json family_report_to_json(const RelationFamily& f, const FamilyReport& r) {
    const Schema& schema = *f.scenario().schema();
    json list = json::array();
    for (const auto& d : r.disagreements) {
        list.push_back({{"first", schema.names(f.scenario().contexts()[d.first])},
                        {"second", schema.names(f.scenario().contexts()[d.second])},
                        {"overlap", schema.names(d.overlap)},
                        {"state", state_to_json(schema, d.overlap, d.state, kDefaultNaToken)},
                        {"first_value", value_to_json(d.first_value)},
                        {"second_value", value_to_json(d.second_value)}});
    }
    return {{"compatible", r.compatible}, {"disagreements", list}};
}

}  // namespace sheafdb::io
