#include "sheafdb/contextuality.hpp"
#include "sheafdb/errors.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace sheafdb;

namespace {

Columns random_subset(std::mt19937_64& rng, const Columns& of) {
    Columns out;
    for (VariableId v : of) {
        if (std::bernoulli_distribution(0.5)(rng)) out.push_back(v);
    }
    return out;
}

Relation random_relation(std::mt19937_64& rng, const SchemaPtr& s, const Columns& cols, Kind kind) {
    Relation r(s, cols, kind);
    for_each_state(*s, cols, [&](const State& st) {
        int x = std::uniform_int_distribution<int>(0, 4)(rng);
        if (kind == Kind::NonnegRational) {
            r.set(st, SemiringValue::rational(x, std::uniform_int_distribution<int>(1, 5)(rng)));
        } else {
            r.set(st, SemiringValue::natural(x));
        }
    });
    return r;
}

Relation scale(const Relation& r, const Rational& a) {
    Relation out(r.schema(), r.columns(), Kind::NonnegRational);
    for (const auto& [s, v] : r.support()) out.set(s, SemiringValue::rational(v.as_rational() * a));
    return out;
}

Relation plus(const Relation& a, const Relation& b) {
    Relation out = a;
    for (const auto& [s, v] : b.support()) out.accumulate(s, v);
    return out;
}

}  // namespace

TEST_CASE("restriction is functorial") {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
        auto s = testing::binary_schema(n);
        Table t = testing::random_table(rng, s, 8, 0.25);
        Columns u = random_subset(rng, s->all_columns());
        Columns w = random_subset(rng, u);
        CHECK(restrict_table(restrict_table(t, u), w) == restrict_table(t, w));
        CHECK(restrict_table(t, t.columns()) == t);

        Relation r = random_relation(rng, s, s->all_columns(), Kind::Natural);
        CHECK(restrict_relation(restrict_relation(r, u), w) == restrict_relation(r, w));
        CHECK(restrict_relation(r, r.columns()) == r);
        CHECK(forget(lift(r)) == r);
    }
}

TEST_CASE("summaries commute with the semiring morphism") {
    // Summing then normalizing equals normalizing each row value then summing.
    std::mt19937_64 rng(102);
    const auto id = SemiringMorphism::identity(Kind::Natural);
    for (int trial = 0; trial < 200; ++trial) {
        auto s = testing::binary_schema(3);
        Table t = testing::random_table(rng, s, std::uniform_int_distribution<std::size_t>(1, 10)(rng), 0.2);
        Relation counts = summarize(t, id);
        if (counts.total().is_zero()) continue;
        const auto phi = SemiringMorphism::normalize_by_total(counts.total().as_int());
        Relation mapped(s, s->all_columns(), Kind::NonnegRational);
        for (const auto& [st, v] : counts.support()) mapped.set(st, apply_morphism(phi, v));
        CHECK(summarize(t, phi) == mapped);
    }
}

TEST_CASE("restriction is linear over the rationals") {
    std::mt19937_64 rng(103);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
        auto s = testing::binary_schema(n);
        Relation a = random_relation(rng, s, s->all_columns(), Kind::NonnegRational);
        Relation b = random_relation(rng, s, s->all_columns(), Kind::NonnegRational);
        Rational k(std::uniform_int_distribution<int>(0, 6)(rng), std::uniform_int_distribution<int>(1, 6)(rng));
        Columns u = random_subset(rng, s->all_columns());
        CHECK(restrict_relation(plus(scale(a, k), b), u) ==
              plus(scale(restrict_relation(a, u), k), restrict_relation(b, u)));
        if (!a.total().is_zero()) {
            CHECK(restrict_relation(normalize_relation(a), u) == normalize_relation(restrict_relation(a, u)));
        }
    }
}

TEST_CASE("without NA, summary commutes with restriction") {
    std::mt19937_64 rng(104);
    const auto id = SemiringMorphism::identity(Kind::Natural);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
        auto s = testing::binary_schema(n);
        Table t = testing::random_table(rng, s, std::uniform_int_distribution<std::size_t>(0, 12)(rng));
        Columns u = random_subset(rng, s->all_columns());
        CHECK(summarize(restrict_table(t, u), id) == restrict_relation(summarize(t, id), u));
    }
}

TEST_CASE("natural solver is complete at desk scale") {
    std::mt19937_64 rng(105);
    for (int trial = 0; trial < 150; ++trial) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 5)(rng);
        MeasurementScenario sc = testing::cyclic_scenario(n);
        auto g = testing::random_global(rng, std::size_t{1} << n, 10);
        RelationFamily f = testing::marginal_family(sc, g);
        FeasibilityResult r = global_section_nat(f);
        REQUIRE(r.status == Feasibility::GlobalSectionExists);
        CHECK(verify_witness(f, *r.witness));
    }
}

TEST_CASE("natural solver agrees with enumeration on compatible cyclic families") {
    // Compatible by construction: singleton counts are fixed first, then each
    // pair table is chosen freely subject to them.
    std::mt19937_64 rng(106);
    std::size_t infeasible = 0;
    for (int trial = 0; trial < 120; ++trial) {
        const std::size_t n = trial % 2 == 0 ? 3 : 4;
        const std::int64_t total = std::uniform_int_distribution<std::int64_t>(1, n == 3 ? 10 : 6)(rng);
        MeasurementScenario sc = testing::cyclic_scenario(n);
        std::vector<std::int64_t> p(n);
        for (auto& x : p) x = std::uniform_int_distribution<std::int64_t>(0, total)(rng);
        std::vector<std::vector<std::int64_t>> targets;
        std::vector<Relation> sections;
        std::vector<std::vector<std::size_t>> contexts;
        for (const auto& ctx : sc.contexts()) {
            const std::int64_t px = p[ctx[0]], py = p[ctx[1]];
            const std::int64_t c00 = std::uniform_int_distribution<std::int64_t>(
                std::max<std::int64_t>(0, px + py - total), std::min(px, py))(rng);
            std::vector<std::int64_t> m{c00, px - c00, py - c00, total - px - py + c00};
            targets.push_back(m);
            sections.push_back(Relation::counts(sc.schema(), ctx, m));
            contexts.emplace_back(ctx.begin(), ctx.end());
        }
        RelationFamily f(sc, sections);
        REQUIRE(check_compatible_relation_family(f).compatible);
        const bool oracle = testing::oracle_global_exists(n, contexts, targets, total);
        FeasibilityResult r = global_section_nat(f);
        CHECK(oracle == (r.status == Feasibility::GlobalSectionExists));
        if (r.witness) CHECK(verify_witness(f, *r.witness));
        if (!oracle) ++infeasible;
    }
    CHECK(infeasible > 0);
}
