#include "sheafdb/causet.hpp"
#include "sheafdb/errors.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace sheafdb;

namespace {

Eventstamp ev(const std::string& id, const std::string& agent, Rational s, Rational e) { return {id, agent, s, e}; }

DelayMatrix two_agents(Rational ab) {
    DelayMatrix d({"A", "B"});
    d.set("A", "B", ab);
    d.set("B", "A", ab);
    return d;
}

// Agents X, Y, Z, pairwise delay 10; stamps realize (1 (2 (5)) (3) (4)).
Patch tree_patch() {
    SpaceGraph g({"X", "Y", "Z"}, {{"X", "Y", 10}, {"Y", "X", 10}, {"X", "Z", 10},
                                   {"Z", "X", 10}, {"Y", "Z", 10}, {"Z", "Y", 10}});
    return build_patch(g, {ev("1", "X", 0, 1), ev("2", "X", 12, 13), ev("3", "Y", 12, 13), ev("4", "Z", 12, 13),
                           ev("5", "X", 14, 15)});
}

}  // namespace

TEST_CASE("delay derivation") {
    SUBCASE("single node") {
        SpaceGraph g = derive_delays(SpaceGraph({"A"}, {}));
        CHECK(g.delays()("A", "A") == Rational(0));
    }
    SUBCASE("path sum") {
        SpaceGraph g = derive_delays(SpaceGraph({"A", "B", "C"}, {{"A", "B", 1}, {"B", "C", 2}}));
        CHECK(g.delays()("A", "C") == Rational(3));
        CHECK_FALSE(g.delays()("C", "A").has_value());
    }
    SUBCASE("shorter detour wins") {
        SpaceGraph g = derive_delays(SpaceGraph({"A", "B", "X"}, {{"A", "B", 5}, {"A", "X", 1}, {"X", "B", 1}}));
        CHECK(g.delays()("A", "B") == Rational(2));
    }
    SUBCASE("triangle inequality after derivation") {
        std::mt19937_64 rng(3);
        for (int trial = 0; trial < 100; ++trial) {
            auto p = testing::random_patch(rng, 5, 0);
            SpaceGraph g = derive_delays(p.graph);
            const auto& ids = g.agents();
            for (const auto& a : ids) {
                CHECK(g.delays()(a, a) == Rational(0));
                for (const auto& b : ids) {
                    for (const auto& c : ids) {
                        auto ab = g.delays()(a, b), bc = g.delays()(b, c), ac = g.delays()(a, c);
                        if (ab && bc) {
                            REQUIRE(ac.has_value());
                            CHECK(*ac <= *ab + *bc);
                        }
                    }
                }
            }
        }
    }
    SUBCASE("invalid inputs") {
        CHECK_THROWS_AS(SpaceGraph({"A", "B"}, {{"A", "B", -1}}), InvalidDelay);
        CHECK_THROWS_AS(SpaceGraph({"A"}, {{"A", "Q", 1}}), SchemaError);
        CHECK_THROWS_AS(SpaceGraph({"A", "B"}, {}).delays(), Error);
    }
}

TEST_CASE("strict causality") {
    CHECK(strictly_causal(ev("e", "A", 0, 1), ev("f", "B", 3, 4), two_agents(1)));
    CHECK_FALSE(strictly_causal(ev("e", "A", 0, 1), ev("f", "A", 1, 2), two_agents(1)));
    CHECK(strictly_causal(ev("e", "A", 0, 1), ev("f", "A", Rational(3, 2), 2), two_agents(1)));
    CHECK_FALSE(strictly_causal(ev("e", "A", 0, 1), ev("f", "B", 0, 1), two_agents(0)));
    CHECK_FALSE(strictly_causal(ev("f", "B", 0, 1), ev("e", "A", 0, 1), two_agents(0)));
    // gap equal to the delay is not enough
    CHECK_FALSE(strictly_causal(ev("e", "A", 0, 1), ev("f", "B", 2, 3), two_agents(1)));
    DelayMatrix apart({"A", "B"});
    CHECK_FALSE(strictly_causal(ev("e", "A", 0, 1), ev("f", "B", 100, 101), apart));
}

TEST_CASE("possible causality") {
    CHECK(possibly_causal(ev("e", "A", 0, 2), ev("f", "B", 1, 5), two_agents(1)));
    CHECK_FALSE(possibly_causal(ev("e", "A", 3, 4), ev("f", "B", 0, 1), two_agents(0)));
    CHECK(possibly_causal(ev("e", "A", 0, 1), ev("f", "B", 3, 4), two_agents(1)));
}

TEST_CASE("patch orders") {
    SUBCASE("empty") {
        Patch p = build_patch(SpaceGraph({"A"}, {}), {});
        CHECK(p.strict_order().size() == 0);
        CHECK(p.covers().empty());
    }
    SUBCASE("one agent is a chain") {
        Patch p = build_patch(SpaceGraph({"A"}, {}), {ev("a", "A", 0, 1), ev("b", "A", 2, 3), ev("c", "A", 4, 5)});
        CHECK(p.strict_order().less("a", "b"));
        CHECK(p.strict_order().less("b", "c"));
        CHECK(p.strict_order().less("a", "c"));
        CHECK(p.covers() == std::vector<std::pair<EventId, EventId>>{{"a", "b"}, {"b", "c"}});
    }
    SUBCASE("tree-realizing stamps") {
        Patch p = tree_patch();
        // Expected reachability of (1 (2 (5)) (3) (4)).
        std::set<std::pair<std::string, std::string>> tree = {{"1", "2"}, {"1", "3"}, {"1", "4"}, {"1", "5"},
                                                              {"2", "5"}};
        for (const auto& a : p.events()) {
            for (const auto& b : p.events()) {
                CHECK(p.strict_order().less(a.id, b.id) == (tree.count({a.id, b.id}) == 1));
            }
        }
        auto covers = p.covers();
        std::sort(covers.begin(), covers.end());
        CHECK(covers == std::vector<std::pair<EventId, EventId>>{{"1", "2"}, {"1", "3"}, {"1", "4"}, {"2", "5"}});
        CHECK(p.past_light_cone("5") == std::vector<EventId>{"1", "2", "5"});
        CHECK(p.is_antichain({"2", "3", "4"}));
        CHECK_FALSE(p.is_antichain({"1", "2"}));
        CHECK(p.is_antichain({"3"}));
        CHECK(is_antichain({"3", "5"}, p));
        CHECK_THROWS_AS(p.is_antichain({"9"}), UnknownEvent);
    }
    SUBCASE("chains compose") {
        SpaceGraph g({"A", "B"}, {{"A", "B", 1}, {"B", "A", 1}});
        Patch p = build_patch(g, {ev("a", "A", 0, 1), ev("b", "B", 3, 4), ev("c", "B", 5, 6)});
        CHECK(p.strict_order().less("a", "c"));
        CHECK(p.possibly_before("a", "c"));
    }
    SUBCASE("malformed events") {
        SpaceGraph g({"A"}, {});
        CHECK_THROWS_AS(build_patch(g, {ev("a", "A", 2, 1)}), SchemaError);
        CHECK_THROWS_AS(build_patch(g, {ev("a", "A", 0, 1), ev("a", "A", 2, 3)}), SchemaError);
        CHECK_THROWS_AS(build_patch(g, {ev("a", "Q", 0, 1)}), UnknownEvent);
    }
}

TEST_CASE("explicit version posets") {
    Poset p = Poset::from_relations({"1", "2", "3", "4", "5"}, {{"1", "2"}, {"1", "3"}, {"1", "4"}, {"2", "5"}});
    CHECK(p.is_antichain({"2", "3", "4"}));
    CHECK_FALSE(p.is_antichain({"1", "2"}));
    CHECK(p.is_antichain({"5"}));
    CHECK(p.less("1", "5"));
    CHECK(p.past("5") == std::vector<std::string>{"1", "2", "5"});
    CHECK(p.interval_size("1", "5") == 3);
    CHECK_THROWS_AS(p.is_antichain({"9"}), UnknownVersion);
    Poset q = p.with_element("6", {"2", "3"});
    CHECK(q.less("3", "6"));
    CHECK(q.less("1", "6"));
    CHECK_FALSE(q.less("4", "6"));
}

TEST_CASE("cycles are rejected with the offending cycle") {
    try {
        Poset::from_relations({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}, {"c", "a"}});
        FAIL("expected CausalityViolation");
    } catch (const CausalityViolation& e) {
        CHECK(e.cycle().size() >= 3);
    }
    CHECK_THROWS_AS(Poset::from_relations({"a"}, {{"a", "a"}}), CausalityViolation);
    CHECK_THROWS_AS(Poset::from_relations({"a"}, {{"a", "z"}}), UnknownVersion);
}

TEST_CASE("random patches give strict partial orders") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        auto rp = testing::random_patch(rng, 4, 10);
        Patch p = build_patch(rp.graph, rp.events);
        const Poset& order = p.strict_order();
        for (const auto& a : p.events()) {
            CHECK_FALSE(order.less(a.id, a.id));
            for (const auto& b : p.events()) {
                if (order.less(a.id, b.id)) {
                    CHECK_FALSE(order.less(b.id, a.id));
                    CHECK(p.possibly_before(a.id, b.id));
                }
                for (const auto& c : p.events()) {
                    if (order.less(a.id, b.id) && order.less(b.id, c.id)) CHECK(order.less(a.id, c.id));
                }
            }
        }
    }
}
