#pragma once

// End-to-end pipelines shared by the CLI and the bindings: checking a family
// with every applicable solver, and the two embedded Bell demonstrations.

#include "sheafdb/bell.hpp"
#include "sheafdb/contextuality.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace sheafdb {

enum class Verdict { Noncontextual, Contextual, Incompatible };

std::string_view to_string(Verdict v);

struct CheckReport {
    FamilyReport compatibility;
    std::optional<FeasibilityResult> natural;
    std::optional<FeasibilityResult> rational;
    /// The natural-number verdict when that solver ran, else the rational one.
    Verdict verdict = Verdict::Incompatible;
};

/// Compatibility first, then the ℕ solver for count families (skipped under
/// normalization) and the ℚ≥0 solver on the normalized family. Boolean and
/// integer families throw KindError.
CheckReport check_family(const RelationFamily& family, bool normalize = false);

struct DemoCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct DemoReport {
    std::string name;
    std::vector<DemoCheck> checks;
    Verdict verdict = Verdict::Incompatible;
    nlohmann::json details;

    bool ok() const;
};

DemoReport run_demo_bell_missing();
/// Under the default ω every expected value is asserted; any other ω just
/// runs the pipeline and reports the verdict.
DemoReport run_demo_bell_versioned(std::optional<VersionAssignment> omega = {});

}  // namespace sheafdb
