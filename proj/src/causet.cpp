#include "sheafdb/causet.hpp"

#include "sheafdb/errors.hpp"

#include <algorithm>
#include <functional>

namespace sheafdb {

namespace {

// Returns a cycle as a list of node indices (first == last) or empty.
std::vector<std::size_t> find_cycle(const std::vector<std::vector<std::size_t>>& adj) {
    enum Color : char { White, Grey, Black };
    std::vector<Color> color(adj.size(), White);
    std::vector<std::size_t> stack;
    std::vector<std::size_t> cycle;
    std::function<bool(std::size_t)> visit = [&](std::size_t u) {
        color[u] = Grey;
        stack.push_back(u);
        for (std::size_t v : adj[u]) {
            if (color[v] == Grey) {
                auto it = std::find(stack.begin(), stack.end(), v);
                cycle.assign(it, stack.end());
                cycle.push_back(v);
                return true;
            }
            if (color[v] == White && visit(v)) return true;
        }
        stack.pop_back();
        color[u] = Black;
        return false;
    };
    for (std::size_t u = 0; u < adj.size(); ++u) {
        if (color[u] == White && visit(u)) return cycle;
    }
    return {};
}

std::vector<std::vector<char>> transitive_closure(const std::vector<std::vector<std::size_t>>& adj) {
    const std::size_t n = adj.size();
    std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<std::size_t> frontier(adj[s].begin(), adj[s].end());
        while (!frontier.empty()) {
            std::size_t u = frontier.back();
            frontier.pop_back();
            if (reach[s][u]) continue;
            reach[s][u] = 1;
            for (std::size_t v : adj[u]) {
                if (!reach[s][v]) frontier.push_back(v);
            }
        }
    }
    return reach;
}

}  // namespace

// Poset

Poset Poset::from_relations(std::vector<std::string> elements,
                            const std::vector<std::pair<std::string, std::string>>& relations) {
    Poset p;
    p.ids_ = std::move(elements);
    for (std::size_t i = 0; i < p.ids_.size(); ++i) {
        if (!p.pos_.emplace(p.ids_[i], i).second) throw SchemaError("duplicate poset element '" + p.ids_[i] + "'");
    }
    std::vector<std::vector<std::size_t>> adj(p.ids_.size());
    for (const auto& [u, v] : relations) {
        adj[p.index_of(u)].push_back(p.index_of(v));
    }
    if (auto cycle = find_cycle(adj); !cycle.empty()) {
        std::vector<std::string> names;
        std::string text;
        for (std::size_t i : cycle) {
            names.push_back(p.ids_[i]);
            text += (text.empty() ? "" : " -> ") + p.ids_[i];
        }
        throw CausalityViolation("order contains a cycle: " + text, std::move(names));
    }
    p.less_ = transitive_closure(adj);
    return p;
}

std::size_t Poset::index_of(const std::string& id) const {
    auto it = pos_.find(id);
    if (it == pos_.end()) throw UnknownVersion("unknown version '" + id + "'");
    return it->second;
}

bool Poset::less(const std::string& u, const std::string& v) const { return less_[index_of(u)][index_of(v)] != 0; }

bool Poset::leq(const std::string& u, const std::string& v) const {
    std::size_t a = index_of(u), b = index_of(v);
    return a == b || less_[a][b] != 0;
}

std::vector<std::string> Poset::past(const std::string& v) const {
    std::size_t b = index_of(v);
    std::vector<std::string> out;
    for (std::size_t a = 0; a < ids_.size(); ++a) {
        if (a == b || less_[a][b]) out.push_back(ids_[a]);
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> Poset::covers() const {
    std::vector<std::pair<std::string, std::string>> out;
    const std::size_t n = ids_.size();
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            if (!less_[a][b]) continue;
            bool between = false;
            for (std::size_t z = 0; z < n && !between; ++z) between = less_[a][z] && less_[z][b];
            if (!between) out.emplace_back(ids_[a], ids_[b]);
        }
    }
    return out;
}

bool Poset::is_antichain(const std::vector<std::string>& ids) const {
    std::vector<std::size_t> idx;
    for (const auto& id : ids) idx.push_back(index_of(id));
    for (std::size_t i = 0; i < idx.size(); ++i) {
        for (std::size_t j = 0; j < idx.size(); ++j) {
            if (less_[idx[i]][idx[j]]) return false;
        }
    }
    return true;
}

std::size_t Poset::interval_size(const std::string& u, const std::string& v) const {
    std::size_t a = index_of(u), b = index_of(v);
    std::size_t count = 0;
    for (std::size_t z = 0; z < ids_.size(); ++z) {
        bool lower = z == a || less_[a][z];
        bool upper = z == b || less_[z][b];
        if (lower && upper) ++count;
    }
    return count;
}

Poset Poset::with_element(const std::string& id, const std::vector<std::string>& parents) const {
    if (contains(id)) throw SchemaError("version '" + id + "' already exists");
    Poset p = *this;
    std::size_t n = p.ids_.size();
    p.ids_.push_back(id);
    p.pos_.emplace(id, n);
    for (auto& row : p.less_) row.push_back(0);
    p.less_.emplace_back(n + 1, 0);
    for (const auto& parent : parents) {
        std::size_t q = index_of(parent);
        p.less_[q][n] = 1;
        for (std::size_t a = 0; a < n; ++a) {
            if (less_[a][q]) p.less_[a][n] = 1;
        }
    }
    return p;
}

bool operator==(const Poset& a, const Poset& b) {
    if (a.size() != b.size()) return false;
    for (const auto& u : a.ids_) {
        if (!b.contains(u)) return false;
        for (const auto& v : a.ids_) {
            if (a.less(u, v) != b.less(u, v)) return false;
        }
    }
    return true;
}

// DelayMatrix

DelayMatrix::DelayMatrix(std::vector<AgentId> agents) : agents_(std::move(agents)) {
    const std::size_t n = agents_.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (!pos_.emplace(agents_[i], i).second) throw SchemaError("duplicate agent '" + agents_[i] + "'");
    }
    d_.assign(n, std::vector<std::optional<Rational>>(n));
    for (std::size_t i = 0; i < n; ++i) d_[i][i] = Rational(0);
}

std::size_t DelayMatrix::index_of(const AgentId& a) const {
    auto it = pos_.find(a);
    if (it == pos_.end()) throw UnknownEvent("unknown agent '" + a + "'");
    return it->second;
}

std::optional<Rational> DelayMatrix::operator()(const AgentId& from, const AgentId& to) const {
    return d_[index_of(from)][index_of(to)];
}

void DelayMatrix::set(const AgentId& from, const AgentId& to, std::optional<Rational> delay) {
    if (delay && *delay < 0) throw InvalidDelay("negative delay " + format_rational(*delay));
    d_[index_of(from)][index_of(to)] = std::move(delay);
}

// SpaceGraph

SpaceGraph::SpaceGraph(std::vector<AgentId> agents, std::vector<Link> links)
    : agents_(std::move(agents)), links_(std::move(links)) {
    std::unordered_map<AgentId, int> seen;
    for (const auto& a : agents_) {
        if (seen[a]++) throw SchemaError("duplicate agent '" + a + "'");
    }
    for (const auto& l : links_) {
        if (!seen.count(l.from) || !seen.count(l.to)) {
            throw SchemaError("link " + l.from + "->" + l.to + " references an unknown agent");
        }
        if (l.delay < 0) {
            throw InvalidDelay("negative delay " + format_rational(l.delay) + " on link " + l.from + "->" + l.to);
        }
    }
}

const DelayMatrix& SpaceGraph::delays() const {
    if (!delays_) throw Error("delay matrix not derived; call derive_delays first");
    return *delays_;
}

SpaceGraph derive_delays(SpaceGraph graph) {
    const std::size_t n = graph.agents_.size();
    std::unordered_map<AgentId, std::size_t> pos;
    for (std::size_t i = 0; i < n; ++i) pos.emplace(graph.agents_[i], i);

    std::vector<std::vector<std::optional<Rational>>> d(n, std::vector<std::optional<Rational>>(n));
    for (std::size_t i = 0; i < n; ++i) d[i][i] = Rational(0);
    for (const auto& l : graph.links_) {
        if (l.delay < 0) throw InvalidDelay("negative delay on link " + l.from + "->" + l.to);
        auto& cell = d[pos.at(l.from)][pos.at(l.to)];
        if (!cell || l.delay < *cell) cell = l.delay;
    }
    // Floyd-Warshall with nullopt as +infinity.
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            if (!d[i][k]) continue;
            for (std::size_t j = 0; j < n; ++j) {
                if (!d[k][j]) continue;
                Rational via = *d[i][k] + *d[k][j];
                if (!d[i][j] || via < *d[i][j]) d[i][j] = via;
            }
        }
    }
    DelayMatrix m(graph.agents_);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) m.set(graph.agents_[i], graph.agents_[j], d[i][j]);
    }
    graph.delays_ = std::move(m);
    return graph;
}

bool strictly_causal(const Eventstamp& e, const Eventstamp& f, const DelayMatrix& d) {
    auto delay = d(e.agent, f.agent);
    if (!delay) return false;
    return e.end < f.start && (f.start - e.end) > *delay;
}

bool possibly_causal(const Eventstamp& e, const Eventstamp& f, const DelayMatrix& d) {
    auto delay = d(e.agent, f.agent);
    if (!delay) return false;
    return e.start < f.end && (f.end - e.start) > *delay;
}

// Patch

const Eventstamp& Patch::event(const EventId& id) const {
    auto it = pos_.find(id);
    if (it == pos_.end()) throw UnknownEvent("unknown event '" + id + "'");
    return events_[it->second];
}

bool Patch::possibly_before(const EventId& e, const EventId& f) const {
    auto a = pos_.find(e), b = pos_.find(f);
    if (a == pos_.end()) throw UnknownEvent("unknown event '" + e + "'");
    if (b == pos_.end()) throw UnknownEvent("unknown event '" + f + "'");
    return possible_[a->second][b->second] != 0;
}

bool Patch::is_antichain(const std::vector<EventId>& ids) const {
    for (const auto& id : ids) {
        if (!pos_.count(id)) throw UnknownEvent("unknown event '" + id + "'");
    }
    return strict_.is_antichain(ids);
}

std::vector<EventId> Patch::past_light_cone(const EventId& id) const {
    if (!pos_.count(id)) throw UnknownEvent("unknown event '" + id + "'");
    return strict_.past(id);
}

Patch build_patch(SpaceGraph graph, std::vector<Eventstamp> events) {
    if (!graph.has_delays()) graph = derive_delays(std::move(graph));
    Patch p;
    p.graph_ = std::move(graph);
    p.events_ = std::move(events);
    const auto& d = p.graph_.delays();
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < p.events_.size(); ++i) {
        const auto& e = p.events_[i];
        if (e.start > e.end) {
            throw SchemaError("event '" + e.id + "' has t_s > t_e");
        }
        if (!p.pos_.emplace(e.id, i).second) throw SchemaError("duplicate event id '" + e.id + "'");
        (void)d(e.agent, e.agent);  // validates the agent
        ids.push_back(e.id);
    }

    const std::size_t n = p.events_.size();
    std::vector<std::pair<std::string, std::string>> strict_pairs;
    std::vector<std::vector<std::size_t>> possible_adj(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            if (strictly_causal(p.events_[i], p.events_[j], d)) strict_pairs.emplace_back(ids[i], ids[j]);
            if (possibly_causal(p.events_[i], p.events_[j], d)) possible_adj[i].push_back(j);
        }
    }
    p.strict_ = Poset::from_relations(ids, strict_pairs);
    p.possible_ = transitive_closure(possible_adj);
    return p;
}

bool is_antichain(const std::vector<EventId>& ids, const Patch& patch) { return patch.is_antichain(ids); }

}  // namespace sheafdb
