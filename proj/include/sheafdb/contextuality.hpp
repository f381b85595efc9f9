#pragma once

// Global-section existence for relation families. Both solvers are exact:
// the natural-number solver is a depth-first search over global cell counts,
// the rational solver a phase-one simplex on rationals with Bland's rule.

#include "sheafdb/scenario.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sheafdb {

enum class Feasibility { GlobalSectionExists, Contextual };

std::string_view to_string(Feasibility status);

struct SolverStats {
    std::uint64_t nodes = 0;
    std::uint64_t pivots = 0;
    double time_ms = 0.0;
};

/// One marginal constraint: the cells of Σ_[n] restricting to `state` on
/// context `context` sum to `target`.
struct MarginalConstraint {
    std::size_t context;
    State state;
    Rational target;
    std::string label;  // e.g. "{A,B}:(0,1)"
};

struct Certificate {
    enum class Type { ExhaustiveSearch, Farkas };

    Type type;
    std::string summary;
    /// Farkas multipliers, one per constraint in marginal_constraints order,
    /// scaled to coprime integers. Empty for exhaustive search.
    std::vector<Rational> multipliers;
    /// Human-readable obstruction derived by eliminating rows in the
    /// A, B, B', A' order, when the family has the four-cycle Bell shape.
    std::optional<std::string> row_elimination;
};

struct FeasibilityResult {
    Feasibility status;
    std::optional<Relation> witness;
    std::optional<Certificate> certificate;
    SolverStats stats;
};

/// The marginal constraints of a family, contexts in order, states in
/// lexicographic order.
std::vector<MarginalConstraint> marginal_constraints(const RelationFamily& family);

/// Decides whether a nonnegative-integer relation on all variables has the
/// family's relations as marginals. Throws KindError unless the family is
/// natural-valued, IncompatibleFamily if overlaps disagree.
FeasibilityResult global_section_nat(const RelationFamily& family);

/// Same question over nonnegative rationals, by exact linear feasibility.
/// Throws KindError unless the family is nonneg-rational valued.
FeasibilityResult global_section_nonneg(const RelationFamily& family);

/// Views a natural family as nonneg-rational without rescaling.
RelationFamily as_rational_family(const RelationFamily& family);

/// True iff ρ of `witness` onto each context reproduces the family.
bool verify_witness(const RelationFamily& family, const Relation& witness);

/// Checks y·A <= 0 cell-wise and y·b > 0 for the family's constraints.
bool verify_farkas(const RelationFamily& family, const std::vector<Rational>& multipliers);

/// True when the schema is four binary variables (A, B, A', B' in that order)
/// and the contexts are exactly {A,B}, {A',B}, {A,B'}, {A',B'} in any order.
bool has_bell_shape(const RelationFamily& family);

/// E(AB) + E(A'B) + E(AB') - E(A'B'), correlations taken on the normalized
/// context relations with state 0 -> +1 and state 1 -> -1. Throws ShapeError
/// on any other shape.
Rational chsh_value(const RelationFamily& family);

/// Fixes rows from {A,B}, assigns B' from {A,B'} (majority value first
/// within each A block), then looks for two of the resulting 0/1 constraints
/// on the A' column whose difference has no 0/1 solution. Returns the
/// obstruction text, or nullopt when none is found or the construction does
/// not apply.
std::optional<std::string> row_elimination_obstruction(const RelationFamily& family);

}  // namespace sheafdb
