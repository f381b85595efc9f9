#include "sheafdb/demo.hpp"

#include "sheafdb/errors.hpp"
#include "sheafdb/io.hpp"

namespace sheafdb {

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::Noncontextual: return "noncontextual";
        case Verdict::Contextual: return "contextual";
        case Verdict::Incompatible: return "incompatible family";
    }
    return "?";
}

namespace {

Verdict verdict_of(const FeasibilityResult& r) {
    return r.status == Feasibility::GlobalSectionExists ? Verdict::Noncontextual : Verdict::Contextual;
}

bool equal_totals(const RelationFamily& f) {
    const SemiringValue t = f.section(0).total();
    if (t.is_zero()) return false;
    for (const auto& r : f.sections()) {
        if (!(r.total() == t)) return false;
    }
    return true;
}

void add(DemoReport& report, std::string name, bool passed, std::string detail = {}) {
    report.checks.push_back({std::move(name), passed, std::move(detail)});
}

std::string dense_text(const Relation& r) {
    std::string out = "[";
    auto cells = r.dense();
    for (std::size_t k = 0; k < cells.size(); ++k) out += (k ? "," : "") + cells[k].to_string();
    return out + "]";
}

}  // namespace

CheckReport check_family(const RelationFamily& family, bool normalize) {
    const Kind kind = family.kind();
    if (kind != Kind::Natural && kind != Kind::NonnegRational) {
        throw KindError("families must be natural or nonnegative-rational valued, got " + std::string(to_string(kind)));
    }
    CheckReport report;
    report.compatibility = check_compatible_relation_family(family, normalize);
    if (!report.compatibility.compatible) return report;

    if (kind == Kind::Natural && !normalize) {
        report.natural = global_section_nat(family);
        report.rational =
            global_section_nonneg(equal_totals(family) ? normalize_family(family) : as_rational_family(family));
        report.verdict = verdict_of(*report.natural);
    } else {
        RelationFamily q = normalize ? normalize_family(family) : family;
        report.rational = global_section_nonneg(q.kind() == Kind::Natural ? as_rational_family(q) : q);
        report.verdict = verdict_of(*report.rational);
    }
    return report;
}

bool DemoReport::ok() const {
    for (const auto& c : checks) {
        if (!c.passed) return false;
    }
    return true;
}

DemoReport run_demo_bell_missing() {
    DemoReport report;
    report.name = "bell-missing";
    const Table table = bell::missing_data_table();
    const MeasurementScenario sc = bell::scenario();
    const RelationFamily expected = bell::count_family();
    const auto names = bell::context_names();
    const auto phi = SemiringMorphism::bool_indicator();

    std::vector<Relation> sections;
    nlohmann::json summaries = nlohmann::json::array();
    for (std::size_t k = 0; k < sc.size(); ++k) {
        Summary s = summarize_with_stats(restrict_table(table, sc.contexts()[k]), phi);
        const bool match = s.relation == expected.section(k);
        add(report, "m_" + names[k].substr(2) + " = " + dense_text(expected.section(k)), match,
            "got " + dense_text(s.relation) + ", " + std::to_string(s.skipped) + " rows skipped");
        if (k == 0) add(report, "{A,B} summary skips 8 rows", s.skipped == 8, std::to_string(s.skipped));
        summaries.push_back({{"context", names[k]}, {"counts", dense_text(s.relation)}, {"skipped", s.skipped}});
        sections.push_back(std::move(s.relation));
    }
    RelationFamily family(sc, std::move(sections));

    CheckReport check = check_family(family);
    add(report, "family is compatible", check.compatibility.compatible);
    add(report, "natural-number solver: contextual",
        check.natural && check.natural->status == Feasibility::Contextual);
    add(report, "rational solver on the normalized family: contextual",
        check.rational && check.rational->status == Feasibility::Contextual);
    if (check.rational && check.rational->certificate) {
        add(report, "Farkas certificate verifies", verify_farkas(normalize_family(family),
                                                                  check.rational->certificate->multipliers));
    }
    const Rational chsh = chsh_value(family);
    add(report, "CHSH value = 5/2", chsh == Rational(5, 2), format_rational(chsh));
    report.verdict = check.verdict;

    report.details = {{"summaries", summaries}, {"chsh", format_rational(chsh)}};
    if (check.natural) report.details["natural"] = io::result_to_json(*check.natural);
    if (check.rational) report.details["rational"] = io::result_to_json(*check.rational);
    return report;
}

DemoReport run_demo_bell_versioned(std::optional<VersionAssignment> omega) {
    DemoReport report;
    report.name = "bell-versioned";
    const bool reference = !omega || *omega == bell::reference_omega();
    bell::VersionedBell vb = bell::reproduce_bell_versioned(omega);
    const auto names = bell::context_names();

    nlohmann::json snapshots = nlohmann::json::array();
    const auto expected_text = bell::expected_snapshots();
    const RelationFamily expected = bell::count_family();
    for (std::size_t k = 0; k < vb.scenario.size(); ++k) {
        const std::string text = bell::render_table(vb.snapshots.tables[k]);
        snapshots.push_back({{"context", names[k]}, {"version", vb.omega.versions[k]}, {"rows", text}});
        if (reference) {
            add(report, "snapshot " + names[k] + " at version " + vb.omega.versions[k] + " matches", text == expected_text[k],
                text);
            add(report, "summary " + names[k] + " = " + dense_text(expected.section(k)),
                vb.family.section(k) == expected.section(k), dense_text(vb.family.section(k)));
        }
    }

    PiCompatibilityReport pi = is_pi_compatible(vb.snapshots, SemiringMorphism::bool_indicator());
    CheckReport check = check_family(vb.family);
    report.verdict = check.verdict;
    if (reference) {
        add(report, "concurrent snapshot is pi-compatible", pi.compatible);
        add(report, "verdict: contextual", check.verdict == Verdict::Contextual);
        if (check.rational && check.rational->certificate) {
            add(report, "Farkas certificate verifies",
                verify_farkas(normalize_family(vb.family), check.rational->certificate->multipliers));
        }
    }

    // Each single-version view is one table, hence its own global section.
    nlohmann::json per_version = nlohmann::json::object();
    for (const auto& v : vb.table.poset()->elements()) {
        Table snap = snapshot(vb.table, v);
        std::vector<Relation> sections;
        for (const auto& ctx : vb.scenario.contexts()) {
            sections.push_back(summarize(restrict_table(snap, ctx), SemiringMorphism::bool_indicator()));
        }
        CheckReport local = check_family(RelationFamily(vb.scenario, std::move(sections)));
        per_version[v] = std::string(to_string(local.verdict));
        if (reference) add(report, "version " + v + " summary is noncontextual", local.verdict == Verdict::Noncontextual);
    }

    bool glued = true;
    std::string glue_detail;
    try {
        TablePresheaf sheaf = sheafify_rows(vb.snapshots.as_presheaf());
        glued = sheafify_rows(sheaf) == sheaf;
    } catch (const CompatibilityError& e) {
        glued = false;
        glue_detail = e.what();
    }
    if (reference) add(report, "row sheafification succeeds and is idempotent", glued, glue_detail);

    std::vector<std::string> omega_text;
    for (std::size_t k = 0; k < names.size(); ++k) omega_text.push_back(names[k] + "=" + vb.omega.versions[k]);
    report.details = {{"omega", omega_text},
                      {"snapshots", snapshots},
                      {"pi_compatible", pi.compatible},
                      {"sheafified", glued},
                      {"per_version", per_version}};
    if (check.natural) report.details["natural"] = io::result_to_json(*check.natural);
    if (check.rational) report.details["rational"] = io::result_to_json(*check.rational);
    return report;
}

}  // namespace sheafdb
