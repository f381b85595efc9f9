#include "sheafdb/bell.hpp"
#include "sheafdb/contextuality.hpp"
#include "sheafdb/errors.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace sheafdb;

namespace {

RelationFamily bell_counts(std::vector<std::vector<std::int64_t>> m) {
    auto s = bell::schema();
    return RelationFamily(bell::scenario(), {Relation::counts(s, {0, 1}, m[0]), Relation::counts(s, {1, 2}, m[1]),
                                             Relation::counts(s, {0, 3}, m[2]), Relation::counts(s, {2, 3}, m[3])});
}

std::vector<std::vector<std::size_t>> bell_contexts() { return {{0, 1}, {1, 2}, {0, 3}, {2, 3}}; }

}  // namespace

TEST_CASE("the Bell family has no global section") {
    RelationFamily f = bell::count_family();
    FeasibilityResult nat = global_section_nat(f);
    CHECK(nat.status == Feasibility::Contextual);
    REQUIRE(nat.certificate);
    CHECK(nat.certificate->type == Certificate::Type::ExhaustiveSearch);
    REQUIRE(nat.certificate->row_elimination);
    CHECK(nat.certificate->row_elimination->find("x_8 - x_4 = 2") != std::string::npos);

    FeasibilityResult q = global_section_nonneg(normalize_family(f));
    CHECK(q.status == Feasibility::Contextual);
    REQUIRE(q.certificate);
    CHECK(q.certificate->type == Certificate::Type::Farkas);
    CHECK(verify_farkas(normalize_family(f), q.certificate->multipliers));
    CHECK(verify_farkas(as_rational_family(f), q.certificate->multipliers));
}

TEST_CASE("brute force agrees on the Bell family") {
    RelationFamily f = bell::count_family();
    std::vector<std::vector<std::int64_t>> targets;
    for (const auto& r : f.sections()) targets.push_back(testing::dense_counts(r));
    std::uint64_t visited = 0;
    CHECK_FALSE(testing::oracle_global_exists(4, bell_contexts(), targets, 8, &visited));
    CHECK(visited == 490314);  // C(23, 15)
}

TEST_CASE("uniform marginals are noncontextual") {
    RelationFamily f = bell_counts({{2, 2, 2, 2}, {2, 2, 2, 2}, {2, 2, 2, 2}, {2, 2, 2, 2}});
    std::vector<std::vector<std::int64_t>> targets(4, {2, 2, 2, 2});
    CHECK(testing::oracle_global_exists(4, bell_contexts(), targets, 8));

    FeasibilityResult nat = global_section_nat(f);
    CHECK(nat.status == Feasibility::GlobalSectionExists);
    REQUIRE(nat.witness);
    CHECK(verify_witness(f, *nat.witness));
    CHECK(nat.witness->total() == SemiringValue::natural(8));

    FeasibilityResult q = global_section_nonneg(normalize_family(f));
    CHECK(q.status == Feasibility::GlobalSectionExists);
    REQUIRE(q.witness);
    CHECK(verify_witness(normalize_family(f), *q.witness));

    // Hand-built witness: one row for each even-parity state.
    std::vector<std::int64_t> global(16, 0);
    for (std::size_t g = 0; g < 16; ++g) global[g] = __builtin_popcount(static_cast<unsigned>(g)) % 2 == 0;
    CHECK(verify_witness(f, testing::relation_from_global(bell::schema(), global)));
}

TEST_CASE("single context families glue to themselves") {
    auto s = testing::binary_schema(2);
    MeasurementScenario sc(s, {{0, 1}});
    Relation r = Relation::counts(s, {0, 1}, {1, 0, 2, 5});
    RelationFamily f(sc, {r});
    FeasibilityResult nat = global_section_nat(f);
    REQUIRE(nat.status == Feasibility::GlobalSectionExists);
    CHECK(*nat.witness == r);
}

TEST_CASE("product families are noncontextual") {
    auto s = bell::schema();
    const MeasurementScenario sc = bell::scenario();
    std::vector<Relation> sections;
    for (const auto& ctx : sc.contexts()) {
        Relation r(s, ctx, Kind::NonnegRational);
        for_each_state(*s, ctx, [&](const State& st) { r.set(st, SemiringValue::rational(1, 4)); });
        sections.push_back(r);
    }
    RelationFamily f(sc, sections);
    FeasibilityResult q = global_section_nonneg(f);
    CHECK(q.status == Feasibility::GlobalSectionExists);
    CHECK(verify_witness(f, *q.witness));
}

TEST_CASE("marginals of a random global distribution are noncontextual") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        auto g = testing::random_global(rng, 16, 12);
        RelationFamily f = testing::marginal_family(bell::scenario(), g);
        FeasibilityResult q = global_section_nonneg(normalize_family(f));
        CHECK(q.status == Feasibility::GlobalSectionExists);
        CHECK(verify_witness(normalize_family(f), *q.witness));
        FeasibilityResult nat = global_section_nat(f);
        CHECK(nat.status == Feasibility::GlobalSectionExists);
        CHECK(verify_witness(f, *nat.witness));
    }
}

TEST_CASE("solver preconditions") {
    auto sections = bell::count_family().sections();
    sections[0] = Relation::counts(bell::schema(), {0, 1}, {5, 0, 0, 3});
    RelationFamily bad(bell::scenario(), sections);
    CHECK_THROWS_AS(global_section_nat(bad), IncompatibleFamily);
    CHECK_THROWS_AS(global_section_nonneg(normalize_family(bad)), IncompatibleFamily);
    CHECK_THROWS_AS(global_section_nat(normalize_family(bell::count_family())), KindError);
    CHECK_THROWS_AS(global_section_nonneg(bell::count_family()), KindError);
}

TEST_CASE("CHSH values") {
    CHECK(chsh_value(bell::count_family()) == Rational(5, 2));
    CHECK(chsh_value(normalize_family(bell::count_family())) == Rational(5, 2));
    CHECK(chsh_value(bell_counts({{1, 0, 0, 0}, {1, 0, 0, 0}, {1, 0, 0, 0}, {1, 0, 0, 0}})) == Rational(2));
    CHECK_THROWS_AS(chsh_value(bell_counts({{0, 0, 0, 0}, {1, 0, 0, 0}, {1, 0, 0, 0}, {1, 0, 0, 0}})),
                    DegenerateTotal);

    auto s = testing::binary_schema(3);
    RelationFamily other(MeasurementScenario(s, {{0, 1}, {1, 2}}),
                         {Relation::counts(s, {0, 1}, {1, 1, 1, 1}), Relation::counts(s, {1, 2}, {1, 1, 1, 1})});
    CHECK_FALSE(has_bell_shape(other));
    CHECK_THROWS_AS(chsh_value(other), ShapeError);
    CHECK(has_bell_shape(bell::count_family()));
}

TEST_CASE("witness verification") {
    RelationFamily f = bell_counts({{2, 2, 2, 2}, {2, 2, 2, 2}, {2, 2, 2, 2}, {2, 2, 2, 2}});
    auto s = bell::schema();
    CHECK_FALSE(verify_witness(f, Relation(s, s->all_columns(), Kind::Natural)));
    CHECK_FALSE(verify_witness(f, Relation(s, s->all_columns(), Kind::NonnegRational)));
}

TEST_CASE("rational infeasibility implies natural infeasibility") {
    // Every compatible Bell-shaped family: fix single-variable marginals,
    // then pick the free cell of each 2x2 table.
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 80; ++trial) {
        const std::int64_t total = std::uniform_int_distribution<std::int64_t>(1, 6)(rng);
        std::vector<std::int64_t> p(4);
        for (auto& x : p) x = std::uniform_int_distribution<std::int64_t>(0, total)(rng);
        std::vector<std::vector<std::int64_t>> m;
        for (const auto& c : bell_contexts()) {
            const std::int64_t px = p[c[0]], py = p[c[1]];
            const std::int64_t c00 = std::uniform_int_distribution<std::int64_t>(std::max<std::int64_t>(0, px + py - total),
                                                                                  std::min(px, py))(rng);
            m.push_back({c00, px - c00, py - c00, total - px - py + c00});
        }
        RelationFamily f = bell_counts(m);
        REQUIRE(check_compatible_relation_family(f).compatible);
        FeasibilityResult nat = global_section_nat(f);
        FeasibilityResult q = global_section_nonneg(normalize_family(f));
        if (q.status == Feasibility::Contextual) CHECK(nat.status == Feasibility::Contextual);
        if (nat.status == Feasibility::GlobalSectionExists) {
            CHECK(q.status == Feasibility::GlobalSectionExists);
            CHECK(verify_witness(f, *nat.witness));
        }
        if (q.status == Feasibility::Contextual) CHECK(verify_farkas(normalize_family(f), q.certificate->multipliers));
        CHECK(testing::oracle_global_exists(4, bell_contexts(), m, total) ==
              (nat.status == Feasibility::GlobalSectionExists));
    }
}
