#include "ssg/game.hpp"

#include <algorithm>
#include <fmt/format.h>

namespace ssg {

std::string_view to_string(NodeKind kind)
{
    switch (kind) {
    case NodeKind::Max: return "max";
    case NodeKind::Min: return "min";
    case NodeKind::Average: return "avg";
    case NodeKind::Terminal0: return "t0";
    case NodeKind::Terminal1: return "t1";
    }
    return "?";
}

std::vector<NodeId> Game::nodes_of(NodeKind k) const
{
    std::vector<NodeId> out;
    for (NodeId v = 1; v <= size(); ++v) {
        if (kind(v) == k) out.push_back(v);
    }
    return out;
}

int Game::count(NodeKind k) const
{
    return static_cast<int>(std::count_if(nodes_.begin(), nodes_.end(),
                                          [k](const Node& nd) { return nd.kind == k; }));
}

std::vector<std::vector<NodeId>> Game::parents() const
{
    std::vector<std::vector<NodeId>> par(size() + 1);
    for (NodeId v = 1; v <= size(); ++v) {
        for (NodeId w : arcs(v)) {
            if (w >= 1 && w <= size()) par[w].push_back(v);
        }
    }
    return par;
}

std::vector<int> Game::in_degrees() const
{
    std::vector<int> deg(size() + 1, 0);
    for (NodeId v = 1; v <= size(); ++v) {
        for (NodeId w : arcs(v)) {
            if (w >= 1 && w <= size()) ++deg[w];
        }
    }
    return deg;
}

std::vector<std::string> validate_structure(const Game& g)
{
    std::vector<std::string> out;
    const int n = g.size();
    if (n < 2) {
        out.emplace_back(fmt::format("game has {} node(s); at least the two terminals are required", n));
        return out;
    }
    if (g.kind(n - 1) != NodeKind::Terminal0) out.emplace_back(fmt::format("node {} must be terminal-0", n - 1));
    if (g.kind(n) != NodeKind::Terminal1) out.emplace_back(fmt::format("node {} must be terminal-1", n));
    for (NodeId v = 1; v <= n - 2; ++v) {
        if (is_terminal(g.kind(v))) out.emplace_back(fmt::format("node {} is a terminal outside positions n-1, n", v));
    }
    for (NodeId v = 1; v <= n; ++v) {
        const int deg = g.out_degree(v);
        const int want = is_terminal(g.kind(v)) ? 0 : 2;
        if (deg != want) out.emplace_back(fmt::format("node {} has out-degree {}", v, deg));
        for (NodeId w : g.arcs(v)) {
            if (w < 1 || w > n) out.emplace_back(fmt::format("arc target out of range ({} -> {})", v, w));
        }
    }
    return out;
}

BadCore find_bad_core(const Game& g)
{
    const int n = g.size();
    const auto par = g.parents();

    std::vector<char> in_set(n + 1, 0);
    std::vector<int> inside(n + 1, 0);  // arcs pointing into the current set
    for (NodeId v = 1; v <= n; ++v) in_set[v] = !is_terminal(g.kind(v));
    for (NodeId v = 1; v <= n; ++v) {
        if (!in_set[v]) continue;
        for (NodeId w : g.arcs(v)) {
            if (in_set[w]) ++inside[v];
        }
    }

    auto must_leave = [&](NodeId v) {
        if (g.kind(v) == NodeKind::Average) return inside[v] < 2;
        return inside[v] == 0;
    };

    std::vector<NodeId> queue;
    for (NodeId v = 1; v <= n; ++v) {
        if (in_set[v] && must_leave(v)) {
            in_set[v] = 0;
            queue.push_back(v);
        }
    }
    while (!queue.empty()) {
        const NodeId u = queue.back();
        queue.pop_back();
        for (NodeId p : par[u]) {
            if (!in_set[p]) continue;
            --inside[p];
            if (must_leave(p)) {
                in_set[p] = 0;
                queue.push_back(p);
            }
        }
    }

    BadCore core;
    for (NodeId v = 1; v <= n; ++v) {
        if (in_set[v]) core.members.push_back(v);
    }
    return core;
}

bool is_stopping(const Game& g) { return find_bad_core(g).empty(); }

Game induced_subgame(const Game& g, const std::vector<NodeId>& members)
{
    std::vector<NodeId> remap(g.size() + 1, 0);
    const int k = static_cast<int>(members.size());
    for (int i = 0; i < k; ++i) remap[members[i]] = i + 1;
    const NodeId t0 = k + 1;

    std::vector<Node> nodes;
    nodes.reserve(k + 2);
    for (NodeId v : members) {
        Node nd{g.kind(v), {}};
        for (NodeId w : g.arcs(v)) nd.arcs.push_back(remap[w] ? remap[w] : t0);
        nodes.push_back(std::move(nd));
    }
    nodes.push_back({NodeKind::Terminal0, {}});
    nodes.push_back({NodeKind::Terminal1, {}});
    return Game(std::move(nodes));
}

}  // namespace ssg
