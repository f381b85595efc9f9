#pragma once

// Helpers shared by the unit, property and acceptance tests: random
// generators and brute-force oracles that use none of the library's
// marginalization or search code.

#include "sheafdb/bell.hpp"
#include "sheafdb/contextuality.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace testing {

using namespace sheafdb;

inline SchemaPtr binary_schema(std::size_t n) {
    std::vector<Variable> vars;
    for (std::size_t k = 0; k < n; ++k) vars.push_back({"X" + std::to_string(k), {"0", "1"}});
    return std::make_shared<const Schema>(std::move(vars));
}

/// Random NA-free (or NA-sprinkled) table over all columns of `schema`.
inline Table random_table(std::mt19937_64& rng, const SchemaPtr& schema, std::size_t rows, double na_rate = 0.0,
                          Kind kind = Kind::Natural) {
    std::bernoulli_distribution na(na_rate);
    std::vector<Record> out;
    for (std::size_t i = 0; i < rows; ++i) {
        State s;
        for (VariableId v = 0; v < schema->size(); ++v) {
            std::uniform_int_distribution<int> pick(0, static_cast<int>(schema->variable(v).states.size()) - 1);
            s.push_back(na(rng) ? kNA : pick(rng));
        }
        SemiringValue value = kind == Kind::Boolean
                                  ? SemiringValue::boolean(true)
                                  : SemiringValue::natural(std::uniform_int_distribution<int>(1, 3)(rng));
        if (kind == Kind::NonnegRational) {
            value = SemiringValue::rational(std::uniform_int_distribution<int>(0, 5)(rng),
                                            std::uniform_int_distribution<int>(1, 4)(rng));
        }
        out.push_back({std::nullopt, static_cast<Index>(i + 1), s, value});
    }
    return Table(schema, schema->all_columns(), kind, std::move(out));
}

/// Marginal of a dense global count vector over n binary variables, computed
/// by bit arithmetic. Cell g has variable v's state in bit (n - 1 - v).
inline std::vector<std::int64_t> oracle_marginal(const std::vector<std::int64_t>& global, std::size_t n,
                                                 const std::vector<std::size_t>& context) {
    std::vector<std::int64_t> out(std::size_t{1} << context.size(), 0);
    for (std::size_t g = 0; g < global.size(); ++g) {
        std::size_t idx = 0;
        for (std::size_t v : context) idx = (idx << 1) | ((g >> (n - 1 - v)) & 1);
        out[idx] += global[g];
    }
    return out;
}

/// Calls fn on every vector of `cells` nonnegative integers summing to total;
/// stops early when fn returns true. Returns whether it stopped.
inline bool for_each_composition(std::size_t cells, std::int64_t total,
                                 const std::function<bool(const std::vector<std::int64_t>&)>& fn) {
    std::vector<std::int64_t> v(cells, 0);
    std::function<bool(std::size_t, std::int64_t)> rec = [&](std::size_t k, std::int64_t left) -> bool {
        if (k + 1 == cells) {
            v[k] = left;
            return fn(v);
        }
        for (std::int64_t x = 0; x <= left; ++x) {
            v[k] = x;
            if (rec(k + 1, left - x)) return true;
        }
        return false;
    };
    return rec(0, total);
}

/// Brute force: does some global count table over n binary variables with
/// the given total reproduce every target marginal?
inline bool oracle_global_exists(std::size_t n, const std::vector<std::vector<std::size_t>>& contexts,
                                 const std::vector<std::vector<std::int64_t>>& targets, std::int64_t total,
                                 std::uint64_t* visited = nullptr) {
    std::uint64_t count = 0;
    bool found = for_each_composition(std::size_t{1} << n, total, [&](const std::vector<std::int64_t>& g) {
        ++count;
        for (std::size_t k = 0; k < contexts.size(); ++k) {
            if (oracle_marginal(g, n, contexts[k]) != targets[k]) return false;
        }
        return true;
    });
    if (visited) *visited = count;
    return found;
}

/// The library's dense order over sorted binary columns matches the oracle's
/// bit order, so relations convert directly.
inline std::vector<std::int64_t> dense_counts(const Relation& r) {
    std::vector<std::int64_t> out;
    for (const auto& v : r.dense()) out.push_back(v.as_int());
    return out;
}

inline Relation relation_from_global(const SchemaPtr& schema, const std::vector<std::int64_t>& global) {
    return Relation::counts(schema, schema->all_columns(), global);
}

/// Family of oracle marginals of a dense global table.
inline RelationFamily marginal_family(const MeasurementScenario& sc, const std::vector<std::int64_t>& global) {
    const std::size_t n = sc.schema()->size();
    std::vector<Relation> sections;
    for (const auto& ctx : sc.contexts()) {
        std::vector<std::size_t> c(ctx.begin(), ctx.end());
        sections.push_back(Relation::counts(sc.schema(), ctx, oracle_marginal(global, n, c)));
    }
    return RelationFamily(sc, std::move(sections));
}

/// Cyclic pair cover {0,1},{1,2},...,{n-1,0} of n binary variables (the
/// four-cycle for n = 4; a single pair for n = 2).
inline MeasurementScenario cyclic_scenario(std::size_t n) {
    auto schema = binary_schema(n);
    if (n == 2) return MeasurementScenario(schema, {{0, 1}});
    std::vector<Columns> contexts;
    for (std::size_t k = 0; k < n; ++k) {
        Columns c{static_cast<VariableId>(k), static_cast<VariableId>((k + 1) % n)};
        std::sort(c.begin(), c.end());
        contexts.push_back(c);
    }
    return MeasurementScenario(schema, std::move(contexts));
}

inline std::vector<std::int64_t> random_global(std::mt19937_64& rng, std::size_t cells, std::int64_t max_total) {
    std::vector<std::int64_t> g(cells, 0);
    std::int64_t total = std::uniform_int_distribution<std::int64_t>(1, max_total)(rng);
    std::uniform_int_distribution<std::size_t> pick(0, cells - 1);
    for (std::int64_t t = 0; t < total; ++t) ++g[pick(rng)];
    return g;
}

/// Random interval patch on up to `max_agents` agents.
struct RandomPatch {
    SpaceGraph graph;
    std::vector<Eventstamp> events;
};

inline RandomPatch random_patch(std::mt19937_64& rng, std::size_t max_agents, std::size_t max_events) {
    std::size_t agents = std::uniform_int_distribution<std::size_t>(1, max_agents)(rng);
    std::size_t events = std::uniform_int_distribution<std::size_t>(0, max_events)(rng);
    std::vector<AgentId> ids;
    for (std::size_t a = 0; a < agents; ++a) ids.push_back("a" + std::to_string(a));
    std::vector<Link> links;
    std::bernoulli_distribution connect(0.5);
    std::uniform_int_distribution<int> delay(0, 4);
    for (std::size_t a = 0; a < agents; ++a) {
        for (std::size_t b = 0; b < agents; ++b) {
            if (a != b && connect(rng)) links.push_back({ids[a], ids[b], Rational(delay(rng), 2)});
        }
    }
    std::vector<Eventstamp> out;
    std::uniform_int_distribution<int> start(0, 40), width(0, 4);
    std::uniform_int_distribution<std::size_t> agent(0, agents - 1);
    for (std::size_t e = 0; e < events; ++e) {
        Rational s(start(rng), 2);
        out.push_back({"e" + std::to_string(e), ids[agent(rng)], s, s + Rational(width(rng), 2)});
    }
    return {SpaceGraph(ids, std::move(links)), std::move(out)};
}

}  // namespace testing
