#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oracle {

using ssg::NodeKind;

namespace {

std::vector<NodeId> decision_nodes(const Game& g)
{
    std::vector<NodeId> out;
    for (NodeId v = 1; v <= g.size(); ++v) {
        if (g.kind(v) == NodeKind::Max || g.kind(v) == NodeKind::Min) out.push_back(v);
    }
    return out;
}

// Successor lists of the strategy subgraph.
std::vector<std::vector<NodeId>> pair_graph(const Game& g, const std::vector<int>& choice)
{
    std::vector<std::vector<NodeId>> succ(g.size() + 1);
    for (NodeId v = 1; v <= g.size(); ++v) {
        switch (g.kind(v)) {
        case NodeKind::Average: succ[v] = g.arcs(v); break;
        case NodeKind::Max:
        case NodeKind::Min: succ[v] = {g.arcs(v)[choice[v]]}; break;
        default: break;
        }
    }
    return succ;
}

bool all_reach_terminal(const Game& g, const std::vector<int>& choice)
{
    const auto succ = pair_graph(g, choice);
    for (NodeId s = 1; s <= g.size(); ++s) {
        std::vector<char> seen(g.size() + 1, 0);
        std::vector<NodeId> stack{s};
        seen[s] = 1;
        bool hit = false;
        while (!stack.empty() && !hit) {
            const NodeId u = stack.back();
            stack.pop_back();
            if (ssg::is_terminal(g.kind(u))) hit = true;
            for (NodeId w : succ[u]) {
                if (!seen[w]) {
                    seen[w] = 1;
                    stack.push_back(w);
                }
            }
        }
        if (!hit) return false;
    }
    return true;
}

template <class T>
std::vector<std::vector<T>> pair_matrix(const Game& g, const std::vector<int>& choice)
{
    const int n = g.size();
    std::vector<std::vector<T>> a(n, std::vector<T>(n + 1, T(0)));
    for (NodeId v = 1; v <= n; ++v) {
        auto& row = a[v - 1];
        switch (g.kind(v)) {
        case NodeKind::Terminal0: row[v - 1] = 1; break;
        case NodeKind::Terminal1:
            row[v - 1] = 1;
            row[n] = 1;
            break;
        case NodeKind::Average:
            row[v - 1] += 2;
            row[g.arcs(v)[0] - 1] -= 1;
            row[g.arcs(v)[1] - 1] -= 1;
            break;
        default:
            row[v - 1] += 1;
            row[g.arcs(v)[choice[v]] - 1] -= 1;
            break;
        }
    }
    return a;
}

// Gauss-Jordan with partial pivoting for doubles and first-nonzero pivoting
// for rationals. Returns false if singular.
template <class T>
bool gauss_jordan(std::vector<std::vector<T>>& a, std::vector<T>& x)
{
    const int n = static_cast<int>(a.size());
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        if constexpr (std::is_same_v<T, double>) {
            double best = 1e-12;
            for (int r = c; r < n; ++r) {
                if (std::abs(a[r][c]) > best) {
                    best = std::abs(a[r][c]);
                    piv = r;
                }
            }
        } else {
            for (int r = c; r < n && piv < 0; ++r) {
                if (a[r][c] != 0) piv = r;
            }
        }
        if (piv < 0) return false;
        std::swap(a[piv], a[c]);
        const T inv = T(1) / a[c][c];
        for (int k = c; k <= n; ++k) a[c][k] *= inv;
        for (int r = 0; r < n; ++r) {
            if (r == c || a[r][c] == 0) continue;
            const T f = a[r][c];
            for (int k = c; k <= n; ++k) a[r][k] -= f * a[c][k];
        }
    }
    x.assign(n, T(0));
    for (int i = 0; i < n; ++i) x[i] = a[i][n];
    return true;
}

bool float_stable(const Game& g, const std::vector<double>& x)
{
    constexpr double eps = 1e-9;
    for (NodeId v = 1; v <= g.size(); ++v) {
        if (g.kind(v) != NodeKind::Max && g.kind(v) != NodeKind::Min) continue;
        const double a = x[g.arcs(v)[0] - 1], b = x[g.arcs(v)[1] - 1], s = x[v - 1];
        const double want = g.kind(v) == NodeKind::Max ? std::max(a, b) : std::min(a, b);
        if (std::abs(s - want) > eps) return false;
    }
    return true;
}

}  // namespace

Game random_game(ssg::Rng& rng, int averages, int mins, int maxes, double forward)
{
    const int n = averages + mins + maxes + 2;
    std::vector<NodeKind> kinds;
    kinds.insert(kinds.end(), averages, NodeKind::Average);
    kinds.insert(kinds.end(), mins, NodeKind::Min);
    kinds.insert(kinds.end(), maxes, NodeKind::Max);
    rng.shuffle(kinds);
    std::vector<ssg::Node> nodes(n);
    for (int i = 0; i < n - 2; ++i) {
        nodes[i].kind = kinds[i];
        const NodeId v = i + 1;
        const bool fwd = static_cast<double>(rng.below(1000)) < forward * 1000.0;
        nodes[i].arcs.push_back(fwd ? static_cast<NodeId>(rng.between(v + 1, n)) : static_cast<NodeId>(rng.between(1, n)));
        nodes[i].arcs.push_back(static_cast<NodeId>(rng.between(1, n)));
    }
    nodes[n - 2].kind = NodeKind::Terminal0;
    nodes[n - 1].kind = NodeKind::Terminal1;
    return Game(std::move(nodes));
}

Game random_stopping_game(ssg::Rng& rng, int max_decision, int max_avg)
{
    for (;;) {
        const int a = static_cast<int>(rng.between(1, max_avg));
        const int b = static_cast<int>(rng.between(0, max_decision / 2));
        const int c = static_cast<int>(rng.between(0, max_decision - b));
        Game g = random_game(rng, a, b, c);
        if (stopping_by_pairs(g)) return g;
    }
}

Game random_layered_game(ssg::Rng& rng)
{
    for (;;) {
        const int blocks = static_cast<int>(rng.between(2, 4));
        std::vector<int> start{0};
        for (int b = 0; b < blocks; ++b) start.push_back(start.back() + static_cast<int>(rng.between(1, 4)));
        const int k = start.back();
        std::vector<ssg::Node> nodes(k + 2);
        nodes[k].kind = NodeKind::Terminal0;
        nodes[k + 1].kind = NodeKind::Terminal1;
        for (int b = 0; b < blocks; ++b) {
            for (int i = start[b]; i < start[b + 1]; ++i) {
                const auto r = rng.below(3);
                nodes[i].kind = r == 0 ? NodeKind::Average : r == 1 ? NodeKind::Max : NodeKind::Min;
                const int next = i + 1 < start[b + 1] ? i + 1 : start[b];
                nodes[i].arcs = {static_cast<NodeId>(next + 1), static_cast<NodeId>(rng.between(start[b] + 1, k + 2))};
            }
        }
        Game g(std::move(nodes));
        if (!stopping_by_pairs(g)) continue;
        // Count mutually reachable classes among the non-terminal nodes.
        std::vector<std::vector<char>> reach(k + 1, std::vector<char>(k + 3, 0));
        for (NodeId s = 1; s <= k; ++s) {
            std::vector<NodeId> stack{s};
            reach[s][s] = 1;
            while (!stack.empty()) {
                const NodeId u = stack.back();
                stack.pop_back();
                if (u > k) continue;
                for (NodeId w : g.arcs(u)) {
                    if (!reach[s][w]) {
                        reach[s][w] = 1;
                        stack.push_back(w);
                    }
                }
            }
        }
        bool split = false;
        for (NodeId u = 1; u <= k && !split; ++u) {
            for (NodeId w = 1; w <= k && !split; ++w) split = !(reach[u][w] && reach[w][u]);
        }
        if (split) return g;
    }
}

bool stopping_by_pairs(const Game& g)
{
    const auto dec = decision_nodes(g);
    if (dec.size() > 16) throw std::invalid_argument("stopping_by_pairs: too many decision nodes");
    std::vector<int> choice(g.size() + 1, 0);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << dec.size()); ++mask) {
        for (std::size_t i = 0; i < dec.size(); ++i) choice[dec[i]] = (mask >> i) & 1;
        if (!all_reach_terminal(g, choice)) return false;
    }
    return true;
}

std::set<NodeId> naive_bad_core(const Game& g)
{
    std::set<NodeId> s;
    for (NodeId v = 1; v <= g.size(); ++v) {
        if (!ssg::is_terminal(g.kind(v))) s.insert(v);
    }
    for (bool changed = true; changed;) {
        changed = false;
        for (auto it = s.begin(); it != s.end();) {
            int inside = 0;
            for (NodeId w : g.arcs(*it)) inside += s.count(w) ? 1 : 0;
            const bool keep = g.kind(*it) == NodeKind::Average ? inside == 2 : inside >= 1;
            if (keep) {
                ++it;
            } else {
                it = s.erase(it);
                changed = true;
            }
        }
    }
    return s;
}

std::set<NodeId> valid_arcs_by_trial(const Game& g, NodeId m)
{
    std::set<NodeId> out;
    const NodeId p = g.arcs(m).at(0);
    for (NodeId q = 1; q <= g.size(); ++q) {
        if (q == m || q == p || ssg::is_terminal(g.kind(q))) continue;
        Game h = g;
        h.add_arc(m, q);
        if (naive_bad_core(h).empty()) out.insert(q);
    }
    return out;
}

std::optional<Values> pair_values(const Game& g, const std::vector<int>& choice)
{
    auto a = pair_matrix<mpq_class>(g, choice);
    std::vector<mpq_class> x;
    if (!gauss_jordan(a, x)) return std::nullopt;
    Values out(g.size() + 1);
    for (NodeId v = 1; v <= g.size(); ++v) out[v] = x[v - 1];
    return out;
}

bool exactly_stable(const Game& g, const Values& v)
{
    for (NodeId i = 1; i <= g.size(); ++i) {
        const NodeKind k = g.kind(i);
        if (k == NodeKind::Terminal0) {
            if (v[i] != 0) return false;
            continue;
        }
        if (k == NodeKind::Terminal1) {
            if (v[i] != 1) return false;
            continue;
        }
        const mpq_class& a = v[g.arcs(i)[0]];
        const mpq_class& b = v[g.arcs(i)[1]];
        mpq_class want = k == NodeKind::Max ? std::max(a, b) : k == NodeKind::Min ? std::min(a, b) : mpq_class((a + b) / 2);
        if (v[i] != want) return false;
    }
    return true;
}

Values values(const Game& g)
{
    const auto dec = decision_nodes(g);
    if (dec.size() > 14) throw std::invalid_argument("oracle::values: too many decision nodes");
    std::vector<int> choice(g.size() + 1, 0);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << dec.size()); ++mask) {
        for (std::size_t i = 0; i < dec.size(); ++i) choice[dec[i]] = (mask >> i) & 1;
        auto a = pair_matrix<double>(g, choice);
        std::vector<double> x;
        if (!gauss_jordan(a, x) || !float_stable(g, x)) continue;
        auto exact = pair_values(g, choice);
        if (exact && exactly_stable(g, *exact)) return *exact;
    }
    throw std::runtime_error("oracle::values: no stable strategy pair");
}

}  // namespace oracle
