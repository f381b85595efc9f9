#include "sheafdb/demo.hpp"
#include "sheafdb/errors.hpp"
#include "sheafdb/io.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace sheafdb;

namespace {

py::object to_py(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

nlohmann::json from_py(const py::object& o) {
    return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

py::object fraction(const Rational& q) { return py::module_::import("fractions").attr("Fraction")(format_rational(q)); }

py::object value_to_py(const SemiringValue& v) {
    switch (v.kind()) {
        case Kind::Boolean: return py::bool_(v.as_bool());
        case Kind::Natural:
        case Kind::Integer: return py::int_(v.as_int());
        case Kind::NonnegRational: return fraction(v.as_rational());
    }
    return py::none();
}

Columns columns_of(const Schema& schema, const std::vector<std::string>& names) { return schema.columns(names); }

py::dict cells(const Relation& r) {
    const Schema& schema = *r.schema();
    py::dict out;
    for (const auto& [s, v] : r.support()) {
        py::tuple key(s.size());
        for (std::size_t k = 0; k < s.size(); ++k) key[k] = schema.label_of(r.columns()[k], s[k]);
        out[key] = value_to_py(v);
    }
    return out;
}

io::CsvOptions csv_options(const std::string& na_token, const std::string& kind) {
    io::CsvOptions opts;
    opts.na_token = na_token;
    opts.kind = parse_kind(kind);
    return opts;
}

py::dict check_to_py(const RelationFamily& family, bool normalize) {
    CheckReport check = check_family(family, normalize);
    nlohmann::json j = {{"verdict", std::string(to_string(check.verdict))},
                        {"compatibility", io::family_report_to_json(family, check.compatibility)}};
    if (check.natural) j["natural"] = io::result_to_json(*check.natural);
    if (check.rational) j["rational"] = io::result_to_json(*check.rational);
    return to_py(j);
}

py::dict demo_to_py(const DemoReport& demo) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : demo.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    return to_py({{"name", demo.name},
                  {"ok", demo.ok()},
                  {"verdict", std::string(to_string(demo.verdict))},
                  {"checks", checks},
                  {"details", demo.details}});
}

}  // namespace

PYBIND11_MODULE(_sheafdb, m) {
    m.doc() = "Semiring-valued tables, sheaf compatibility and contextuality checks";

    auto base = py::register_exception<Error>(m, "SheafdbError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<IncompatibleFamily>(m, "IncompatibleFamily", base.ptr());
    py::register_exception<SnapshotConflict>(m, "SnapshotConflict", base.ptr());
    py::register_exception<CausalityViolation>(m, "CausalityViolation", base.ptr());

    py::class_<Relation>(m, "Relation")
        .def_property_readonly("columns", [](const Relation& r) { return r.schema()->names(r.columns()); })
        .def_property_readonly("kind", [](const Relation& r) { return std::string(to_string(r.kind())); })
        .def("cells", &cells, "Nonzero cells keyed by state-label tuples")
        .def("total", [](const Relation& r) { return value_to_py(r.total()); })
        .def("restrict", [](const Relation& r, const std::vector<std::string>& names) {
            return restrict_relation(r, columns_of(*r.schema(), names));
        })
        .def("normalized", &normalize_relation)
        .def("to_dict", [](const Relation& r) { return to_py(io::relation_to_json(r)); })
        .def("__eq__", [](const Relation& a, const Relation& b) { return a == b; })
        .def("__repr__", [](const Relation& r) {
            return "<Relation " + r.schema()->describe(r.columns()) + " " + std::string(to_string(r.kind())) + ">";
        });

    py::class_<Table>(m, "Table")
        .def_static(
            "load",
            [](const std::filesystem::path& path, const std::string& na_token, const std::string& kind) {
                return io::load_table(path, csv_options(na_token, kind)).table;
            },
            py::arg("path"), py::arg("na_token") = io::kDefaultNaToken, py::arg("kind") = "natural")
        .def_property_readonly("columns", [](const Table& t) { return t.schema()->names(t.columns()); })
        .def_property_readonly("kind", [](const Table& t) { return std::string(to_string(t.kind())); })
        .def("__len__", &Table::size)
        .def("restrict", [](const Table& t, const std::vector<std::string>& names) {
            return restrict_table(t, columns_of(*t.schema(), names));
        })
        .def("extend", [](const Table& t, const std::vector<std::string>& names) {
            return extend_table(t, columns_of(*t.schema(), names));
        })
        .def(
            "summarize",
            [](const Table& t) {
                Summary s = summarize_with_stats(t, SemiringMorphism::counting(t.kind()));
                return py::make_tuple(s.relation, s.skipped);
            },
            "Available-case count summary; returns (relation, skipped rows)")
        .def("render", &bell::render_table)
        .def("to_dict", [](const Table& t) { return to_py(io::table_to_json(t)); })
        .def("__eq__", [](const Table& a, const Table& b) { return a == b; });

    py::class_<RelationFamily>(m, "Family")
        .def_static(
            "load",
            [](const std::filesystem::path& path) {
                return io::family_from_json(nlohmann::json::parse(io::read_file(path)), path.parent_path()).family;
            },
            py::arg("path"))
        .def_static(
            "from_dict",
            [](const py::object& d, const std::filesystem::path& base_dir) {
                return io::family_from_json(from_py(d), base_dir).family;
            },
            py::arg("data"), py::arg("base_dir") = ".")
        .def_property_readonly("contexts",
                               [](const RelationFamily& f) {
                                   std::vector<std::vector<std::string>> out;
                                   for (const auto& c : f.scenario().contexts()) out.push_back(f.scenario().schema()->names(c));
                                   return out;
                               })
        .def_property_readonly("sections", &RelationFamily::sections)
        .def("is_compatible",
             [](const RelationFamily& f, bool up_to_normalization) {
                 return check_compatible_relation_family(f, up_to_normalization).compatible;
             },
             py::arg("up_to_normalization") = false)
        .def("normalized", &normalize_family)
        .def("check", &check_to_py, py::arg("normalize") = false,
             "Compatibility, then every applicable solver; returns a report dict")
        .def("chsh", [](const RelationFamily& f) { return fraction(chsh_value(f)); })
        .def("to_dict", [](const RelationFamily& f) { return to_py(io::family_to_json(f)); });

    py::class_<Patch>(m, "Patch")
        .def_static("load", [](const std::filesystem::path& path) {
            return io::patch_from_json(nlohmann::json::parse(io::read_file(path)));
        })
        .def_static("from_dict", [](const py::object& d) { return io::patch_from_json(from_py(d)); })
        .def("covers", &Patch::covers)
        .def("less", [](const Patch& p, const EventId& a, const EventId& b) { return p.strict_order().less(a, b); })
        .def("past", &Patch::past_light_cone)
        .def("is_antichain", &Patch::is_antichain);

    m.def("bell_missing_table", &bell::missing_data_table, "The embedded sixteen-row missing-data table");
    m.def("bell_family", &bell::count_family, "The four Bell count tables");

    m.def(
        "demo",
        [](const std::string& name, std::optional<std::string> omega) {
            if (name == "bell-missing") return demo_to_py(run_demo_bell_missing());
            if (name == "bell-versioned") {
                std::optional<VersionAssignment> w;
                if (omega) w = bell::parse_omega(bell::scenario(), *omega);
                return demo_to_py(run_demo_bell_versioned(w));
            }
            throw ParseError("unknown demo '" + name + "'");
        },
        py::arg("name"), py::arg("omega") = std::nullopt);

    m.def(
        "snapshot",
        [](const std::filesystem::path& script_path, std::optional<std::string> omega, const std::string& kind) {
            io::CsvOptions opts;
            opts.kind = parse_kind(kind);
            io::EditScript script = io::edit_script_from_json(nlohmann::json::parse(io::read_file(script_path)),
                                                              script_path.parent_path(), opts);
            if (!script.scenario) throw ScenarioError("edit script has no scenario or omega");
            VersionAssignment w = omega ? bell::parse_omega(*script.scenario, *omega)
                                        : script.omega.value_or(VersionAssignment{});
            ConcurrentSnapshotFamily fam = concurrent_snapshot(script.table, *script.scenario, w);
            PiCompatibilityReport pi = is_pi_compatible(fam, SemiringMorphism::counting(script.table.kind()));
            py::list views;
            for (const auto& t : fam.tables) views.append(t);
            py::dict out;
            out["views"] = views;
            out["pi_compatible"] = pi.compatible;
            out["notes"] = script.notes;
            if (pi.summaries) out["family"] = *pi.summaries;
            return out;
        },
        py::arg("script"), py::arg("omega") = std::nullopt, py::arg("kind") = "boolean",
        "Concurrent snapshot of an edit script; returns views, pi-compatibility and the summary family");
}
