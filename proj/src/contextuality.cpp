#include "sheafdb/contextuality.hpp"

#include "sheafdb/errors.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

namespace sheafdb {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string state_label(const Schema& schema, const Columns& cols, const State& s) {
    std::string out = "(";
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (k) out += ",";
        out += schema.label_of(cols[k], s[k]);
    }
    return out + ")";
}

/// Global cells with, for each cell, the constraint it feeds in every
/// context.
struct ConstraintSystem {
    std::vector<State> cells;
    std::vector<MarginalConstraint> constraints;
    std::vector<std::vector<std::size_t>> cell_constraints;  // [cell][context]
    std::vector<std::vector<std::size_t>> constraint_cells;  // [constraint]
};

ConstraintSystem build_system(const RelationFamily& family) {
    ConstraintSystem sys;
    const Schema& schema = *family.scenario().schema();
    const auto& contexts = family.scenario().contexts();
    sys.constraints = marginal_constraints(family);

    std::vector<std::size_t> offset;
    std::size_t running = 0;
    for (const auto& c : contexts) {
        offset.push_back(running);
        running += schema.state_count(c);
    }
    const Columns all = schema.all_columns();
    for_each_state(schema, all, [&](const State& s) { sys.cells.push_back(s); });
    sys.constraint_cells.resize(sys.constraints.size());
    sys.cell_constraints.resize(sys.cells.size());
    for (std::size_t g = 0; g < sys.cells.size(); ++g) {
        for (std::size_t k = 0; k < contexts.size(); ++k) {
            // Mixed-radix rank of the restricted state, matching for_each_state.
            std::size_t rank = 0;
            for (VariableId v : contexts[k]) rank = rank * schema.variable(v).states.size() + sys.cells[g][v];
            std::size_t id = offset[k] + rank;
            sys.cell_constraints[g].push_back(id);
            sys.constraint_cells[id].push_back(g);
        }
    }
    return sys;
}

void require_compatible(const RelationFamily& family) {
    auto report = check_compatible_relation_family(family);
    if (!report.compatible) {
        const auto& d = report.disagreements.front();
        const Schema& schema = *family.scenario().schema();
        throw IncompatibleFamily("contexts " + schema.describe(family.scenario().contexts()[d.first]) + " and " +
                                 schema.describe(family.scenario().contexts()[d.second]) + " disagree on " +
                                 schema.describe(d.overlap));
    }
}

void scale_to_integers(std::vector<Rational>& v) {
    BigInt l = 1;
    for (const auto& q : v) l = boost::multiprecision::lcm(l, BigInt(boost::multiprecision::denominator(q)));
    BigInt g = 0;
    for (auto& q : v) {
        q *= Rational(l);
        g = boost::multiprecision::gcd(g, BigInt(boost::multiprecision::abs(boost::multiprecision::numerator(q))));
    }
    if (g > 1) {
        for (auto& q : v) q /= Rational(g);
    }
}

}  // namespace

std::string_view to_string(Feasibility status) {
    return status == Feasibility::GlobalSectionExists ? "GlobalSectionExists" : "Contextual";
}

std::vector<MarginalConstraint> marginal_constraints(const RelationFamily& family) {
    std::vector<MarginalConstraint> out;
    const Schema& schema = *family.scenario().schema();
    const auto& contexts = family.scenario().contexts();
    for (std::size_t k = 0; k < contexts.size(); ++k) {
        const Relation& r = family.section(k);
        for_each_state(schema, contexts[k], [&](const State& s) {
            out.push_back({k, s, r.at(s).as_rational(),
                           schema.describe(contexts[k]) + ":" + state_label(schema, contexts[k], s)});
        });
    }
    return out;
}

// Natural-number search

FeasibilityResult global_section_nat(const RelationFamily& family) {
    auto start = Clock::now();
    if (family.kind() != Kind::Natural) {
        throw KindError("global_section_nat needs a natural-valued family, got " + std::string(to_string(family.kind())));
    }
    require_compatible(family);

    ConstraintSystem sys = build_system(family);
    const std::size_t n_cells = sys.cells.size();
    const std::size_t n_cons = sys.constraints.size();
    std::vector<std::int64_t> residual(n_cons);
    std::vector<std::size_t> remaining(n_cons);
    for (std::size_t c = 0; c < n_cons; ++c) {
        residual[c] = static_cast<std::int64_t>(boost::multiprecision::numerator(sys.constraints[c].target));
        remaining[c] = sys.constraint_cells[c].size();
    }
    std::vector<std::int64_t> value(n_cells, 0);
    SolverStats stats;

    auto cap = [&](std::size_t g) {
        std::int64_t c = std::numeric_limits<std::int64_t>::max();
        for (std::size_t id : sys.cell_constraints[g]) c = std::min(c, residual[id]);
        return c;
    };
    // Every open constraint must still be reachable by its unassigned cells.
    auto reachable = [&](std::size_t next) {
        std::vector<std::int64_t> caps(n_cells, 0);
        for (std::size_t g = next; g < n_cells; ++g) caps[g] = cap(g);
        for (std::size_t id = 0; id < n_cons; ++id) {
            if (remaining[id] == 0) {
                if (residual[id] != 0) return false;
                continue;
            }
            std::int64_t reach = 0;
            for (std::size_t g : sys.constraint_cells[id]) {
                if (g >= next) reach += caps[g];
            }
            if (reach < residual[id]) return false;
        }
        return true;
    };

    std::function<bool(std::size_t)> search = [&](std::size_t g) -> bool {
        if (g == n_cells) return true;
        std::int64_t hi = cap(g);
        std::int64_t lo = 0;
        for (std::size_t id : sys.cell_constraints[g]) {
            if (remaining[id] == 1) lo = std::max(lo, residual[id]);
        }
        for (std::int64_t v = hi; v >= lo; --v) {
            ++stats.nodes;
            value[g] = v;
            for (std::size_t id : sys.cell_constraints[g]) {
                residual[id] -= v;
                --remaining[id];
            }
            if (reachable(g + 1) && search(g + 1)) return true;
            for (std::size_t id : sys.cell_constraints[g]) {
                residual[id] += v;
                ++remaining[id];
            }
        }
        value[g] = 0;
        return false;
    };

    bool found = reachable(0) && search(0);
    FeasibilityResult result{found ? Feasibility::GlobalSectionExists : Feasibility::Contextual, std::nullopt,
                             std::nullopt, stats};
    const auto& schema = family.scenario().schema();
    if (found) {
        Relation w(schema, schema->all_columns(), Kind::Natural);
        for (std::size_t g = 0; g < n_cells; ++g) {
            if (value[g]) w.set(sys.cells[g], SemiringValue::natural(value[g]));
        }
        result.witness = std::move(w);
    } else {
        std::int64_t rows = 0;
        if (!family.sections().empty()) rows = family.section(0).total().as_int();
        Certificate cert{Certificate::Type::ExhaustiveSearch,
                         "exhaustive search over " + std::to_string(rows) + "-row tables: no nonnegative integer " +
                             "assignment of the " + std::to_string(n_cells) + " global cells meets all " +
                             std::to_string(n_cons) + " marginal constraints (" + std::to_string(stats.nodes) +
                             " nodes)",
                         {},
                         std::nullopt};
        if (has_bell_shape(family)) cert.row_elimination = row_elimination_obstruction(family);
        result.certificate = std::move(cert);
    }
    result.stats.time_ms = elapsed_ms(start);
    return result;
}

// Rational feasibility

FeasibilityResult global_section_nonneg(const RelationFamily& family) {
    auto start = Clock::now();
    if (family.kind() != Kind::NonnegRational) {
        throw KindError("global_section_nonneg needs a nonneg-rational family, got " +
                        std::string(to_string(family.kind())));
    }
    require_compatible(family);

    ConstraintSystem sys = build_system(family);
    const std::size_t m = sys.constraints.size();
    const std::size_t n = sys.cells.size();
    const std::size_t width = n + m + 1;  // cells | artificials | rhs
    const std::size_t rhs = n + m;

    // Targets are nonnegative, so the artificial basis starts feasible.
    std::vector<std::vector<Rational>> tab(m, std::vector<Rational>(width, Rational(0)));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t g : sys.constraint_cells[i]) tab[i][g] = 1;
        tab[i][n + i] = 1;
        tab[i][rhs] = sys.constraints[i].target;
    }
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;
    auto cost = [&](std::size_t j) { return j >= n && j < n + m ? Rational(1) : Rational(0); };

    SolverStats stats;
    while (true) {
        // Bland: lowest-index column with negative reduced cost.
        std::optional<std::size_t> entering;
        for (std::size_t j = 0; j < n + m && !entering; ++j) {
            Rational reduced = cost(j);
            for (std::size_t i = 0; i < m; ++i) {
                if (tab[i][j] != 0) reduced -= cost(basis[i]) * tab[i][j];
            }
            if (reduced < 0) entering = j;
        }
        if (!entering) break;
        const std::size_t e = *entering;
        std::optional<std::size_t> leave;
        Rational best;
        for (std::size_t i = 0; i < m; ++i) {
            if (tab[i][e] <= 0) continue;
            Rational ratio = tab[i][rhs] / tab[i][e];
            if (!leave || ratio < best || (ratio == best && basis[i] < basis[*leave])) {
                leave = i;
                best = ratio;
            }
        }
        // Phase one is bounded below by zero, so a leaving row always exists.
        if (!leave) throw Error("simplex: unbounded phase-one problem");
        const std::size_t r = *leave;
        Rational pivot = tab[r][e];
        for (auto& x : tab[r]) x /= pivot;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == r || tab[i][e] == 0) continue;
            Rational factor = tab[i][e];
            for (std::size_t j = 0; j < width; ++j) {
                if (tab[r][j] != 0) tab[i][j] -= factor * tab[r][j];
            }
        }
        basis[r] = e;
        ++stats.pivots;
    }

    Rational infeasibility = 0;
    for (std::size_t i = 0; i < m; ++i) infeasibility += cost(basis[i]) * tab[i][rhs];

    FeasibilityResult result{infeasibility == 0 ? Feasibility::GlobalSectionExists : Feasibility::Contextual,
                             std::nullopt, std::nullopt, stats};
    const auto& schema = family.scenario().schema();
    if (infeasibility == 0) {
        Relation w(schema, schema->all_columns(), Kind::NonnegRational);
        for (std::size_t i = 0; i < m; ++i) {
            if (basis[i] < n && tab[i][rhs] != 0) w.set(sys.cells[basis[i]], SemiringValue::rational(tab[i][rhs]));
        }
        result.witness = std::move(w);
    } else {
        // y = c_B B^{-1}, read from the artificial block of the final tableau.
        std::vector<Rational> y(m, Rational(0));
        for (std::size_t k = 0; k < m; ++k) {
            for (std::size_t i = 0; i < m; ++i) y[k] += cost(basis[i]) * tab[i][n + k];
        }
        scale_to_integers(y);
        std::ostringstream text;
        text << "Farkas combination of marginal constraints: every global cell gets a nonpositive coefficient"
             << " while the combined right-hand side is positive;";
        Rational lhs_rhs = 0;
        for (std::size_t i = 0; i < m; ++i) {
            if (y[i] == 0) continue;
            text << " " << (y[i] > 0 ? "+" : "-") << format_rational(boost::multiprecision::abs(y[i])) << "*"
                 << sys.constraints[i].label;
            lhs_rhs += y[i] * sys.constraints[i].target;
        }
        text << " with right-hand side " << format_rational(lhs_rhs);
        result.certificate = Certificate{Certificate::Type::Farkas, text.str(), std::move(y), std::nullopt};
    }
    result.stats.time_ms = elapsed_ms(start);
    return result;
}

RelationFamily as_rational_family(const RelationFamily& family) {
    std::vector<Relation> out;
    for (const auto& r : family.sections()) {
        Relation q(r.schema(), r.columns(), Kind::NonnegRational);
        for (const auto& [s, v] : r.support()) q.set(s, SemiringValue::rational(v.as_rational()));
        out.push_back(std::move(q));
    }
    return RelationFamily(family.scenario(), std::move(out));
}

bool verify_witness(const RelationFamily& family, const Relation& witness) {
    const auto& schema = family.scenario().schema();
    if (witness.kind() != family.kind()) return false;
    if (witness.columns() != schema->all_columns() || !(*witness.schema() == *schema)) return false;
    for (std::size_t k = 0; k < family.scenario().size(); ++k) {
        if (!(restrict_relation(witness, family.scenario().contexts()[k]) == family.section(k))) return false;
    }
    return true;
}

bool verify_farkas(const RelationFamily& family, const std::vector<Rational>& multipliers) {
    ConstraintSystem sys = build_system(family);
    if (multipliers.size() != sys.constraints.size()) return false;
    for (std::size_t g = 0; g < sys.cells.size(); ++g) {
        Rational coeff = 0;
        for (std::size_t id : sys.cell_constraints[g]) coeff += multipliers[id];
        if (coeff > 0) return false;
    }
    Rational rhs = 0;
    for (std::size_t i = 0; i < sys.constraints.size(); ++i) rhs += multipliers[i] * sys.constraints[i].target;
    return rhs > 0;
}

// Bell-shaped families

bool has_bell_shape(const RelationFamily& family) {
    const auto& scenario = family.scenario();
    const Schema& schema = *scenario.schema();
    if (schema.size() != 4) return false;
    for (const auto& v : schema.variables()) {
        if (v.states.size() != 2) return false;
    }
    std::set<Columns> expected{{0, 1}, {1, 2}, {0, 3}, {2, 3}};
    std::set<Columns> actual(scenario.contexts().begin(), scenario.contexts().end());
    return scenario.size() == 4 && actual == expected;
}

Rational chsh_value(const RelationFamily& family) {
    if (!has_bell_shape(family)) {
        throw ShapeError("chsh_value needs four binary variables A, B, A', B' with contexts {A,B}, {A',B}, {A,B'}, "
                         "{A',B'}");
    }
    const auto& scenario = family.scenario();
    auto correlation = [&](const Columns& ctx) -> Rational {
        const Relation& r = family.section(*scenario.find(ctx));
        Rational total = 0, signed_sum = 0;
        for (const auto& [s, v] : r.support()) {
            Rational q = v.as_rational();
            total += q;
            signed_sum += (s[0] == s[1]) ? q : Rational(-q);
        }
        if (total == 0) throw DegenerateTotal("context with zero total has no correlation");
        return signed_sum / total;
    };
    // Columns are sorted by variable id: {B, A'} is {1,2}.
    return correlation({0, 1}) + correlation({1, 2}) + correlation({0, 3}) - correlation({2, 3});
}

std::optional<std::string> row_elimination_obstruction(const RelationFamily& family) {
    if (!has_bell_shape(family) || (family.kind() != Kind::Natural && family.kind() != Kind::Integer)) {
        return std::nullopt;
    }
    const auto& scenario = family.scenario();
    const Schema& schema = *scenario.schema();
    auto rel = [&](const Columns& c) -> const Relation& { return family.section(*scenario.find(c)); };
    const Relation& ab = rel({0, 1});
    const Relation& ab2 = rel({0, 3});
    const Relation& a2b = rel({1, 2});
    const Relation& a2b2 = rel({2, 3});

    struct Row {
        StateCode a, b, b2;
    };
    std::vector<Row> rows;
    for (StateCode a = 0; a < 2; ++a) {
        std::vector<StateCode> bs;
        std::int64_t block = 0;
        for (StateCode b = 0; b < 2; ++b) {
            std::int64_t count = ab.at({a, b}).as_int();
            if (count > 0) bs.push_back(b);
            block += count;
        }
        // B' can be assigned without loss of generality only when B is
        // constant on the A block.
        if (bs.size() > 1) return std::nullopt;
        if (block == 0) continue;
        std::vector<std::pair<std::int64_t, StateCode>> b2_counts;
        std::int64_t assigned = 0;
        for (StateCode b2 = 0; b2 < 2; ++b2) {
            std::int64_t c = ab2.at({a, b2}).as_int();
            b2_counts.emplace_back(c, b2);
            assigned += c;
        }
        if (assigned != block) return std::nullopt;
        std::stable_sort(b2_counts.begin(), b2_counts.end(),
                         [](const auto& x, const auto& y) { return x.first > y.first; });
        for (const auto& [count, b2] : b2_counts) {
            for (std::int64_t k = 0; k < count; ++k) rows.push_back({a, bs.front(), b2});
        }
    }

    struct Linear {
        std::string name;
        std::vector<int> coeff;  // per row
        std::int64_t rhs;
    };
    std::vector<Linear> cons;
    const std::string& one_a2 = schema.label_of(2, 1);
    for (StateCode b = 0; b < 2; ++b) {
        Linear l{"", std::vector<int>(rows.size(), 0), a2b.at({b, 1}).as_int()};
        for (std::size_t r = 0; r < rows.size(); ++r) l.coeff[r] = rows[r].b == b ? 1 : 0;
        cons.push_back(std::move(l));
    }
    for (StateCode b2 = 0; b2 < 2; ++b2) {
        Linear l{"", std::vector<int>(rows.size(), 0), a2b2.at({1, b2}).as_int()};
        for (std::size_t r = 0; r < rows.size(); ++r) l.coeff[r] = rows[r].b2 == b2 ? 1 : 0;
        cons.push_back(std::move(l));
    }
    for (std::size_t k = 0; k < cons.size(); ++k) cons[k].name = "(C" + std::to_string(k + 1) + ")";

    auto render = [](const std::vector<int>& coeff, std::int64_t rhs) {
        std::string lhs;
        for (int sign : {1, -1}) {
            for (std::size_t r = 0; r < coeff.size(); ++r) {
                if (coeff[r] != sign) continue;
                std::string term = "x_" + std::to_string(r + 1);
                if (lhs.empty()) {
                    lhs = sign > 0 ? term : "-" + term;
                } else {
                    lhs += (sign > 0 ? " + " : " - ") + term;
                }
            }
        }
        return (lhs.empty() ? "0" : lhs) + " = " + std::to_string(rhs);
    };
    auto infeasible = [](const std::vector<int>& coeff, std::int64_t rhs) {
        std::int64_t lo = 0, hi = 0;
        for (int c : coeff) (c > 0 ? hi : lo) += c;
        return rhs < lo || rhs > hi;
    };

    std::string preamble = "rows fixed by " + schema.describe({0, 1}) + " and " + schema.describe({0, 3}) +
                           "; x_r = [" + schema.variable(2).name + "=" + one_a2 + "] in row r; ";
    for (const auto& c : cons) preamble += c.name + " " + render(c.coeff, c.rhs) + "; ";

    for (const auto& c : cons) {
        if (infeasible(c.coeff, c.rhs)) {
            return preamble + c.name + " " + render(c.coeff, c.rhs) + " is impossible because each x_r is 0 or 1";
        }
    }
    for (std::size_t j = 0; j < cons.size(); ++j) {
        for (std::size_t i = 0; i < j; ++i) {
            std::vector<int> diff(rows.size());
            for (std::size_t r = 0; r < rows.size(); ++r) diff[r] = cons[j].coeff[r] - cons[i].coeff[r];
            std::int64_t rhs = cons[j].rhs - cons[i].rhs;
            if (infeasible(diff, rhs)) {
                return preamble + "subtracting " + cons[j].name + " - " + cons[i].name + " gives " +
                       render(diff, rhs) + ", which is impossible because each x_r is 0 or 1";
            }
        }
    }
    return std::nullopt;
}

}  // namespace sheafdb
