#include "sheafdb/bell.hpp"
#include "sheafdb/errors.hpp"
#include "sheafdb/io.hpp"

#include "support.hpp"

#include <doctest.h>

#include <sstream>

using namespace sheafdb;

namespace {

const std::filesystem::path kData = SHEAFDB_TEST_DATA;

io::json load(const char* name) { return io::json::parse(io::read_file(kData / name)); }

io::LoadedTable csv(const std::string& text, io::CsvOptions opts = {}) {
    std::istringstream in(text);
    return io::read_table_csv(in, opts);
}

}  // namespace

TEST_CASE("CSV tables") {
    SUBCASE("the missing-data table") {
        io::CsvOptions opts;
        opts.kind = Kind::Boolean;
        opts.schema = bell::schema();
        io::JsonTable t = io::load_table(kData / "missing_data.csv", opts);
        CHECK(t.table == bell::missing_data_table());
    }
    SUBCASE("inferred states") {
        io::LoadedTable t = csv("x,y\n10,b\n9,a\nNA,a\n");
        const Schema& s = *t.table.schema();
        CHECK(s.variable(0).states == std::vector<std::string>{"9", "10"});
        CHECK(s.variable(1).states == std::vector<std::string>{"a", "b"});
        CHECK(t.table.records()[2].state == State{kNA, 0});
        CHECK(t.table.records()[2].index == 3);
        CHECK_FALSE(t.versioned);
    }
    SUBCASE("quoted fields, values and a custom NA token") {
        io::CsvOptions opts;
        opts.na_token = "?";
        io::LoadedTable t = csv("index,\"a,b\",c,value\n4,\"x\",?,3\n7,y,z,2\n", opts);
        CHECK(t.table.schema()->variable(0).name == "a,b");
        CHECK(t.table.records()[0] == Record{std::nullopt, 4, {0, kNA}, SemiringValue::natural(3)});
        CHECK(t.table.records()[1].index == 7);
    }
    SUBCASE("versions") {
        io::LoadedTable t = csv("version,index,a\n1,1,0\n2,1,1\n");
        CHECK(t.versioned);
        CHECK(*t.table.records()[1].version == "2");
    }
    SUBCASE("errors carry line numbers") {
        try {
            csv("a,b\n0,1\n0\n");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 3);
        }
        try {
            csv("index,a\n1,0\nx,1\n");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 3);
        }
        io::CsvOptions opts;
        opts.schema = testing::binary_schema(1);
        try {
            csv("X0\n0\n7\n", opts);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 3);
        }
        CHECK_THROWS_AS(csv(""), ParseError);
        CHECK_THROWS_AS(csv("a\nNA\n"), ParseError);
        CHECK_THROWS_AS(csv("index,a\n1,0\n1,1\n"), ParseError);
    }
    SUBCASE("header only") {
        io::CsvOptions opts;
        opts.schema = testing::binary_schema(1);
        CHECK(csv("X0\n", opts).table.size() == 0);
    }
}

TEST_CASE("JSON round trips") {
    RelationFamily f = bell::count_family();
    for (const auto& r : f.sections()) CHECK(io::relation_from_json(io::relation_to_json(r)) == r);
    Relation q = normalize_family(f).section(3);
    CHECK(io::relation_from_json(io::relation_to_json(q)) == q);

    MeasurementScenario sc = io::scenario_from_json(io::scenario_to_json(bell::scenario()));
    CHECK(sc.contexts() == bell::scenario().contexts());
    CHECK(*sc.schema() == *bell::schema());

    Table t = bell::missing_data_table();
    CHECK(io::table_from_json(io::table_to_json(t)).table == t);

    bell::VersionedBell vb = bell::reproduce_bell_versioned();
    io::JsonTable vt = io::table_from_json(io::versioned_table_to_json(vb.table));
    CHECK(vt.table == vb.table.rows());
    REQUIRE(vt.poset);
    CHECK(vt.poset->covers() == vb.table.poset()->covers());

    CHECK(io::rational_from_json("3/4") == Rational(3, 4));
    CHECK(io::rational_from_json(2) == Rational(2));
    CHECK(io::rational_from_json(0.5) == Rational(1, 2));
    CHECK_THROWS_AS(io::relation_from_json(io::json{{"columns", {"A"}}}, bell::schema()), ParseError);
}

TEST_CASE("family files") {
    io::LoadedFamily bellf = io::family_from_json(load("bell_family.json"), kData);
    CHECK(bellf.family == bell::count_family());
    CHECK_FALSE(bellf.normalize);
    CHECK(io::family_from_json(load("bell_family_normalized.json"), kData).normalize);

    io::LoadedFamily fromtable = io::family_from_json(load("missing_data_family.json"), kData);
    CHECK(fromtable.family == bell::count_family());
    CHECK(fromtable.skipped_rows == 8 + 8 + 8 + 8);

    io::json roundtrip = io::family_to_json(bell::count_family());
    CHECK(io::family_from_json(roundtrip, kData).family == bell::count_family());

    io::json dup = load("bell_family.json");
    dup["sections"][1] = dup["sections"][0];
    CHECK_THROWS_AS(io::family_from_json(dup, kData), ParseError);
    io::json missing = load("bell_family.json");
    missing["sections"].erase(3);
    CHECK_THROWS_AS(io::family_from_json(missing, kData), ParseError);
}

TEST_CASE("edit scripts") {
    io::CsvOptions boolean;
    boolean.kind = Kind::Boolean;
    io::EditScript s = io::edit_script_from_json(load("bell_edits.json"), kData, boolean);
    bell::VersionedBell vb = bell::reproduce_bell_versioned();
    CHECK(s.table.rows() == vb.table.rows());
    REQUIRE(s.omega);
    CHECK(*s.omega == bell::reference_omega());
    REQUIRE(s.scenario);
    CHECK(s.scenario->contexts() == bell::scenario().contexts());
    CHECK(s.notes.empty());

    io::EditScript single = io::edit_script_from_json(load("bell_edits_single.json"), kData);
    REQUIRE(single.scenario);
    CHECK(single.scenario->size() == 4);
    CHECK(single.omega->versions == std::vector<VersionId>(4, "1"));

    io::EditScript row = io::edit_script_from_json(load("row_edit.json"), kData);
    CHECK(row.notes.size() == 1);
    CHECK(row.scenario->size() == 2);

    io::json bad = load("bell_edits.json");
    bad["edits"][0]["indices"] = {3, 4};
    CHECK_THROWS_AS(io::edit_script_from_json(bad, kData), VacuousEdit);
}

TEST_CASE("patch files") {
    Patch p = io::patch_from_json(load("tree_patch.json"));
    auto covers = p.covers();
    std::sort(covers.begin(), covers.end());
    CHECK(covers == std::vector<std::pair<EventId, EventId>>{{"1", "2"}, {"1", "3"}, {"1", "4"}, {"2", "5"}});
    CHECK_THROWS_AS(io::patch_from_json(load("bad_patch.json")), SchemaError);
    CHECK_THROWS_AS(io::patch_from_json(io::json{{"agents", {"X"}}}), ParseError);
}

TEST_CASE("result rendering") {
    FeasibilityResult nat = global_section_nat(bell::count_family());
    io::json j = io::result_to_json(nat);
    CHECK(j.at("status") == "Contextual");
    CHECK(j.at("certificate").at("type").is_string());
    FeasibilityResult q = global_section_nonneg(normalize_family(bell::count_family()));
    io::json jq = io::result_to_json(q);
    CHECK(jq.at("certificate").at("multipliers").is_array());
}
