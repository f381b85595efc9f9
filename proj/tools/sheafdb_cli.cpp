// sheafdb: command-line front end.
//
//   sheafdb summarize table.csv --columns A,B
//   sheafdb restrict table.csv --columns A
//   sheafdb snapshot script.json --omega "C_AB=5,C_A'B=2,C_AB'=3,C_A'B'=4"
//   sheafdb check family.json [--normalize]
//   sheafdb demo bell-missing|bell-versioned [--omega ...]
//   sheafdb causet patch.json [--subset 2,3,4] [--event 5]
//
// Exit codes: 0 completed with a verdict, 2 input error, 3 assertion failure.

#include "sheafdb/demo.hpp"
#include "sheafdb/errors.hpp"
#include "sheafdb/io.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace sheafdb;
using nlohmann::json;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitAssert = 3;

struct RunConfig {
    std::string command;
    std::vector<std::string> inputs;
    std::string na_token = io::kDefaultNaToken;
    std::string kind = "natural";
    bool normalize = false;
    std::string output;
    std::uint64_t seed = 0;
    bool json = false;
};

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
    std::ostringstream out;
    for (unsigned int k = 0; k < len; ++k) out << std::hex << std::setw(2) << std::setfill('0') << int(digest[k]);
    return out.str();
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

json base_report(const RunConfig& cfg) {
    json inputs = json::array();
    for (const auto& p : cfg.inputs) inputs.push_back({{"path", p}, {"sha256", sha256_hex(io::read_file(p))}});
    return {{"command", cfg.command}, {"seed", cfg.seed}, {"inputs", inputs}};
}

void emit(const RunConfig& cfg, const json& report, const std::string& text) {
    const std::string body = cfg.json ? report.dump(2) + "\n" : text;
    if (cfg.output.empty()) {
        std::cout << body;
    } else {
        std::ofstream out(cfg.output);
        if (!out) throw ParseError("cannot write '" + cfg.output + "'");
        out << report.dump(2) << "\n";
        if (!cfg.json) std::cout << text;
    }
}

std::string header_text(const json& report) {
    std::ostringstream out;
    out << "seed: " << report["seed"].get<std::uint64_t>() << "\n";
    for (const auto& in : report["inputs"]) {
        out << "input: " << in["path"].get<std::string>() << " sha256:" << in["sha256"].get<std::string>() << "\n";
    }
    return out.str();
}

io::CsvOptions csv_options(const RunConfig& cfg) {
    io::CsvOptions o;
    o.na_token = cfg.na_token;
    o.kind = parse_kind(cfg.kind);
    return o;
}

std::string relation_text(const Relation& r) {
    const Schema& schema = *r.schema();
    std::ostringstream out;
    for (VariableId v : r.columns()) out << schema.variable(v).name << ' ';
    out << "| value\n";
    for (const auto& [s, v] : r.support()) {
        for (std::size_t k = 0; k < s.size(); ++k) out << schema.label_of(r.columns()[k], s[k]) << ' ';
        out << "| " << v.to_string() << "\n";
    }
    return out.str();
}

std::string result_text(const char* solver, const FeasibilityResult& r) {
    std::ostringstream out;
    out << solver << ": " << (r.status == Feasibility::GlobalSectionExists ? "noncontextual" : "contextual") << " ("
        << r.stats.nodes << " nodes, " << r.stats.pivots << " pivots)\n";
    if (r.witness) out << "witness:\n" << relation_text(*r.witness);
    if (r.certificate) {
        out << "certificate: " << r.certificate->summary << "\n";
        if (r.certificate->row_elimination) out << *r.certificate->row_elimination << "\n";
    }
    return out.str();
}

int cmd_summarize(const RunConfig& cfg, const std::string& columns) {
    io::JsonTable t = io::load_table(cfg.inputs.at(0), csv_options(cfg));
    Columns cols = t.table.schema()->columns(split_list(columns));
    Table restricted = restrict_table(t.table, cols);
    Summary s = summarize_with_stats(restricted, SemiringMorphism::counting(t.table.kind()));
    Relation out = cfg.normalize ? normalize_relation(s.relation) : s.relation;

    json report = base_report(cfg);
    report["relation"] = io::relation_to_json(out);
    report["skipped_rows"] = s.skipped;
    emit(cfg, report, header_text(report) + relation_text(out) + std::to_string(s.skipped) + " rows skipped\n");
    return 0;
}

int cmd_restrict(const RunConfig& cfg, const std::string& columns) {
    io::JsonTable t = io::load_table(cfg.inputs.at(0), csv_options(cfg));
    Table out = restrict_table(t.table, t.table.schema()->columns(split_list(columns)));
    json report = base_report(cfg);
    report["table"] = io::table_to_json(out, cfg.na_token);
    emit(cfg, report, header_text(report) + bell::render_table(out));
    return 0;
}

int cmd_snapshot(const RunConfig& cfg, const std::string& version, const std::string& omega) {
    const std::filesystem::path path = cfg.inputs.at(0);
    io::EditScript script =
        io::edit_script_from_json(json::parse(io::read_file(path)), path.parent_path(), csv_options(cfg));
    json report = base_report(cfg);
    std::string text = header_text(report);
    for (const auto& note : script.notes) text += "note: " + note + "\n";
    report["notes"] = script.notes;

    if (!version.empty()) {
        Table snap = snapshot(script.table, version);
        report["snapshot"] = io::table_to_json(snap, cfg.na_token);
        emit(cfg, report, text + bell::render_table(snap));
        return 0;
    }
    if (!omega.empty()) {
        if (!script.scenario) throw ParseError("--omega needs a scenario in the edit script");
        script.omega = bell::parse_omega(*script.scenario, omega);
    }
    if (!script.omega || !script.scenario) throw ParseError("give --version, --omega or an omega in the script");

    ConcurrentSnapshotFamily fam = concurrent_snapshot(script.table, *script.scenario, *script.omega);
    const Schema& schema = *script.scenario->schema();
    json views = json::array();
    for (std::size_t k = 0; k < fam.tables.size(); ++k) {
        const std::string name = schema.describe(script.scenario->contexts()[k]);
        views.push_back({{"context", name}, {"version", fam.omega.versions[k]},
                         {"table", io::table_to_json(fam.tables[k], cfg.na_token)}});
        text += name + " at version " + fam.omega.versions[k] + ":\n" + bell::render_table(fam.tables[k]);
    }
    report["views"] = views;

    PiCompatibilityReport pi = is_pi_compatible(fam, SemiringMorphism::counting(script.table.kind()));
    report["pi_compatible"] = pi.compatible;
    text += std::string("pi-compatible: ") + (pi.compatible ? "yes" : "no") + "\n";
    if (pi.summaries && pi.compatible) {
        CheckReport check = check_family(*pi.summaries, cfg.normalize);
        report["verdict"] = std::string(to_string(check.verdict));
        text += "verdict: " + std::string(to_string(check.verdict)) + "\n";
        if (check.natural) report["natural"] = io::result_to_json(*check.natural);
        if (check.rational) report["rational"] = io::result_to_json(*check.rational);
    }
    emit(cfg, report, text);
    return 0;
}

int cmd_check(const RunConfig& cfg) {
    const std::filesystem::path path = cfg.inputs.at(0);
    io::LoadedFamily loaded = io::family_from_json(json::parse(io::read_file(path)), path.parent_path(), csv_options(cfg));
    const bool normalize = cfg.normalize || loaded.normalize;
    CheckReport check = check_family(loaded.family, normalize);

    json report = base_report(cfg);
    report["normalize"] = normalize;
    report["compatibility"] = io::family_report_to_json(loaded.family, check.compatibility);
    report["verdict"] = std::string(to_string(check.verdict));
    std::string text = header_text(report);
    if (loaded.skipped_rows) text += std::to_string(loaded.skipped_rows) + " rows skipped while summarizing\n";
    if (!check.compatibility.compatible) {
        const Schema& schema = *loaded.family.scenario().schema();
        for (const auto& d : check.compatibility.disagreements) {
            text += "overlap " + schema.describe(d.overlap) + ": " +
                    schema.describe(loaded.family.scenario().contexts()[d.first]) + " gives " +
                    d.first_value.to_string() + ", " + schema.describe(loaded.family.scenario().contexts()[d.second]) +
                    " gives " + d.second_value.to_string() + "\n";
        }
    }
    if (check.natural) {
        report["natural"] = io::result_to_json(*check.natural);
        text += result_text("natural-number solver", *check.natural);
    }
    if (check.rational) {
        report["rational"] = io::result_to_json(*check.rational);
        text += result_text("rational solver", *check.rational);
    }
    if (check.compatibility.compatible && has_bell_shape(loaded.family) && !normalize) {
        try {
            Rational chsh = chsh_value(loaded.family);
            report["chsh"] = format_rational(chsh);
            text += "CHSH: " + format_rational(chsh) + "\n";
        } catch (const DegenerateTotal&) {
        }
    }
    text += "verdict: " + std::string(to_string(check.verdict)) + "\n";
    emit(cfg, report, text);
    return 0;
}

int cmd_demo(const RunConfig& cfg, const std::string& name, const std::string& omega) {
    DemoReport demo;
    if (name == "bell-missing") {
        if (!omega.empty()) throw ParseError("--omega applies to bell-versioned only");
        demo = run_demo_bell_missing();
    } else if (name == "bell-versioned") {
        std::optional<VersionAssignment> w;
        if (!omega.empty()) w = bell::parse_omega(bell::scenario(), omega);
        demo = run_demo_bell_versioned(w);
    } else {
        throw ParseError("unknown demo '" + name + "'");
    }
    json report = base_report(cfg);
    report["demo"] = demo.name;
    report["verdict"] = std::string(to_string(demo.verdict));
    report["details"] = demo.details;
    json checks = json::array();
    std::string text = header_text(report);
    for (const auto& c : demo.checks) {
        checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
        text += std::string(c.passed ? "ok   " : "FAIL ") + c.name + "\n";
        if (!c.passed && !c.detail.empty()) text += "     " + c.detail + "\n";
    }
    report["checks"] = checks;
    report["ok"] = demo.ok();
    text += "verdict: " + std::string(to_string(demo.verdict)) + "\n";
    emit(cfg, report, text);
    return demo.ok() ? 0 : kExitAssert;
}

int cmd_causet(const RunConfig& cfg, const std::string& subset, const std::string& event) {
    Patch patch = io::patch_from_json(json::parse(io::read_file(cfg.inputs.at(0))));
    json report = base_report(cfg);
    std::string text = header_text(report);

    json covers = json::array();
    text += "covers:";
    for (const auto& [u, v] : patch.covers()) {
        covers.push_back({u, v});
        text += " (" + u + "," + v + ")";
    }
    text += "\n";
    report["covers"] = covers;

    if (!subset.empty()) {
        auto ids = split_list(subset);
        // Maximal antichains would be exponential; report the pairwise picture.
        json pairs = json::array();
        for (std::size_t a = 0; a < ids.size(); ++a) {
            for (std::size_t b = a + 1; b < ids.size(); ++b) {
                if (patch.is_antichain({ids[a], ids[b]})) pairs.push_back({ids[a], ids[b]});
            }
        }
        const bool anti = patch.is_antichain(ids);
        report["subset"] = {{"events", ids}, {"antichain", anti}, {"spacelike_pairs", pairs}};
        text += "subset {" + subset + "} is " + (anti ? "" : "not ") + "an antichain\n";
        text += "spacelike pairs:";
        for (const auto& p : pairs) text += " (" + p[0].get<std::string>() + "," + p[1].get<std::string>() + ")";
        text += "\n";
    }
    if (!event.empty()) {
        auto past = patch.past_light_cone(event);
        report["past"] = {{"event", event}, {"events", past}};
        text += "past(" + event + ") = {";
        for (std::size_t k = 0; k < past.size(); ++k) text += (k ? "," : "") + past[k];
        text += "}\n";
    }
    emit(cfg, report, text);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Semiring-valued tables, versioned snapshots and contextuality checks"};
    app.require_subcommand(1);
    RunConfig cfg;
    app.add_option("--na-token", cfg.na_token, "Missing-value token in CSV input")->capture_default_str();
    app.add_option("--kind", cfg.kind, "Value kind for CSV rows: boolean, natural, integer, rational")
        ->capture_default_str();
    app.add_flag("--normalize", cfg.normalize, "Normalize relations by their totals");
    app.add_option("--seed", cfg.seed, "Seed recorded in the report")->capture_default_str();
    app.add_flag("--json", cfg.json, "Emit the JSON report instead of text");
    app.add_option("-o,--output", cfg.output, "Also write the JSON report to this file");

    std::string path, columns, version, omega, subset, event, demo_name;

    auto* summarize = app.add_subcommand("summarize", "Restrict a table to columns and summarize it");
    summarize->add_option("table", path, "CSV or JSON table")->required()->check(CLI::ExistingFile);
    summarize->add_option("--columns", columns, "Comma-separated column names")->required();

    auto* restrict = app.add_subcommand("restrict", "Restrict a table to columns");
    restrict->add_option("table", path, "CSV or JSON table")->required()->check(CLI::ExistingFile);
    restrict->add_option("--columns", columns, "Comma-separated column names")->required();

    auto* snap = app.add_subcommand("snapshot", "Snapshot a versioned table from an edit script");
    snap->add_option("script", path, "Edit script JSON")->required()->check(CLI::ExistingFile);
    snap->add_option("--version", version, "Single version to snapshot");
    snap->add_option("--omega", omega, "Per-context versions, e.g. C_AB=5,C_A'B=2");

    auto* check = app.add_subcommand("check", "Check a relation family for compatibility and contextuality");
    check->add_option("family", path, "Family JSON")->required()->check(CLI::ExistingFile);

    auto* demo = app.add_subcommand("demo", "Run an embedded demonstration");
    demo->add_option("name", demo_name, "bell-missing or bell-versioned")
        ->required()
        ->check(CLI::IsMember({"bell-missing", "bell-versioned"}));
    demo->add_option("--omega", omega, "Per-context versions for bell-versioned");

    auto* causet = app.add_subcommand("causet", "Causal order of a patch of eventstamps");
    causet->add_option("patch", path, "Patch JSON")->required()->check(CLI::ExistingFile);
    causet->add_option("--subset", subset, "Comma-separated events to test for spacelike separation");
    causet->add_option("--event", event, "Event whose past light cone to print");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitInput;
    }

    try {
        cfg.command = app.get_subcommands().front()->get_name();
        if (!path.empty()) cfg.inputs.push_back(path);
        if (cfg.command == "summarize") return cmd_summarize(cfg, columns);
        if (cfg.command == "restrict") return cmd_restrict(cfg, columns);
        if (cfg.command == "snapshot") return cmd_snapshot(cfg, version, omega);
        if (cfg.command == "check") return cmd_check(cfg);
        if (cfg.command == "demo") return cmd_demo(cfg, demo_name, omega);
        if (cfg.command == "causet") return cmd_causet(cfg, subset, event);
    } catch (const CausalityViolation& e) {
        std::cerr << "error: " << e.what() << "\ncycle:";
        for (const auto& id : e.cycle()) std::cerr << ' ' << id;
        std::cerr << "\n";
        return kExitInput;
    } catch (const SnapshotConflict& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitAssert;
    }
    return kExitAssert;
}
