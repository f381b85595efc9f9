#pragma once

// Partially ordered events: an explicit finite poset type (used as the
// version order of versioned tables) and the interval-timestamp model that
// derives one from eventstamps and a communication-delay graph.

#include "sheafdb/semiring.hpp"

#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace sheafdb {

using EventId = std::string;
using AgentId = std::string;

/// Finite strict partial order on string-labelled elements, stored as its
/// transitive closure. Element order is insertion order.
class Poset {
public:
    Poset() = default;

    /// Builds the order generated by `relations` (pairs u < v). Throws
    /// CausalityViolation naming a cycle if the relation is not acyclic and
    /// UnknownVersion for endpoints outside `elements`.
    static Poset from_relations(std::vector<std::string> elements,
                                const std::vector<std::pair<std::string, std::string>>& relations);

    std::size_t size() const noexcept { return ids_.size(); }
    const std::vector<std::string>& elements() const noexcept { return ids_; }
    bool contains(const std::string& id) const { return pos_.count(id) != 0; }

    bool less(const std::string& u, const std::string& v) const;
    bool leq(const std::string& u, const std::string& v) const;
    bool comparable(const std::string& u, const std::string& v) const { return leq(u, v) || leq(v, u); }

    /// Inclusive order ideal {u : u <= v}, in element order.
    std::vector<std::string> past(const std::string& v) const;
    /// Hasse diagram edges (u, v) with u < v and nothing strictly between.
    std::vector<std::pair<std::string, std::string>> covers() const;
    /// Throws UnknownVersion on ids outside the poset.
    bool is_antichain(const std::vector<std::string>& ids) const;
    /// Size of the interval {z : u <= z <= v}; finite by construction.
    std::size_t interval_size(const std::string& u, const std::string& v) const;

    /// Copy with a fresh element placed directly above `parents`.
    Poset with_element(const std::string& id, const std::vector<std::string>& parents) const;

    friend bool operator==(const Poset& a, const Poset& b);

private:
    std::size_t index_of(const std::string& id) const;

    std::vector<std::string> ids_;
    std::unordered_map<std::string, std::size_t> pos_;
    std::vector<std::vector<char>> less_;
};

struct Eventstamp {
    EventId id;
    AgentId agent;
    Rational start;  // t_s
    Rational end;    // t_e
};

/// Directed communication link; delays are seconds >= 0.
struct Link {
    AgentId from;
    AgentId to;
    Rational delay;
};

/// All-pairs information travel times; std::nullopt encodes +infinity.
class DelayMatrix {
public:
    DelayMatrix() = default;
    explicit DelayMatrix(std::vector<AgentId> agents);

    const std::vector<AgentId>& agents() const noexcept { return agents_; }
    std::optional<Rational> operator()(const AgentId& from, const AgentId& to) const;
    void set(const AgentId& from, const AgentId& to, std::optional<Rational> delay);

private:
    std::size_t index_of(const AgentId& a) const;

    std::vector<AgentId> agents_;
    std::unordered_map<AgentId, std::size_t> pos_;
    std::vector<std::vector<std::optional<Rational>>> d_;
};

class SpaceGraph {
public:
    SpaceGraph() = default;
    /// Throws InvalidDelay on negative delays and SchemaError on links that
    /// reference unknown agents.
    SpaceGraph(std::vector<AgentId> agents, std::vector<Link> links);

    const std::vector<AgentId>& agents() const noexcept { return agents_; }
    const std::vector<Link>& links() const noexcept { return links_; }
    bool has_delays() const noexcept { return delays_.has_value(); }
    /// Throws Error when derive_delays has not been applied.
    const DelayMatrix& delays() const;

    friend SpaceGraph derive_delays(SpaceGraph graph);

private:
    std::vector<AgentId> agents_;
    std::vector<Link> links_;
    std::optional<DelayMatrix> delays_;
};

/// Fills the delay matrix with all-pairs shortest paths.
SpaceGraph derive_delays(SpaceGraph graph);

/// e's latest end precedes f's earliest start by more than the travel time.
bool strictly_causal(const Eventstamp& e, const Eventstamp& f, const DelayMatrix& d);
/// e's earliest start precedes f's latest end by more than the travel time.
bool possibly_causal(const Eventstamp& e, const Eventstamp& f, const DelayMatrix& d);

/// A graph plus eventstamps and the orders they induce. Immutable.
class Patch {
public:
    const SpaceGraph& graph() const noexcept { return graph_; }
    const std::vector<Eventstamp>& events() const noexcept { return events_; }
    const Eventstamp& event(const EventId& id) const;

    /// Transitively closed strict causality.
    const Poset& strict_order() const noexcept { return strict_; }
    /// Transitively closed possible causality (not necessarily antisymmetric).
    bool possibly_before(const EventId& e, const EventId& f) const;

    /// Throws UnknownEvent on ids outside the patch.
    bool is_antichain(const std::vector<EventId>& ids) const;
    std::vector<EventId> past_light_cone(const EventId& id) const;
    std::vector<std::pair<EventId, EventId>> covers() const { return strict_.covers(); }

    friend Patch build_patch(SpaceGraph graph, std::vector<Eventstamp> events);

private:
    SpaceGraph graph_;
    std::vector<Eventstamp> events_;
    std::unordered_map<EventId, std::size_t> pos_;
    Poset strict_;
    std::vector<std::vector<char>> possible_;
};

/// Derives delays if needed, evaluates both causality tests pairwise and
/// closes them transitively. Throws SchemaError on duplicate ids or
/// malformed intervals, UnknownEvent for events on unknown agents.
Patch build_patch(SpaceGraph graph, std::vector<Eventstamp> events);

bool is_antichain(const std::vector<EventId>& ids, const Patch& patch);

}  // namespace sheafdb
