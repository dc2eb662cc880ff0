#include "ssg/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace ssg {

namespace {

bool is_pinned(const Game& g, const FixedValues* fixed, NodeId v)
{
    return is_terminal(g.kind(v)) || (fixed && static_cast<std::size_t>(v) < fixed->size() && (*fixed)[v]);
}

Rational pinned_value(const Game& g, const FixedValues* fixed, NodeId v)
{
    if (g.kind(v) == NodeKind::Terminal0) return 0;
    if (g.kind(v) == NodeKind::Terminal1) return 1;
    return *(*fixed)[v];
}

// Successor of a max/min node under the pair.
NodeId chosen(const Game& g, const StrategyPair& sp, NodeId v)
{
    const Strategy& s = g.kind(v) == NodeKind::Max ? sp.sigma : sp.tau;
    return g.arcs(v)[s[v]];
}

}  // namespace

void check_strategy(const Game& g, const Strategy& s)
{
    if (static_cast<int>(s.choice.size()) != g.size() + 1)
        throw PreconditionError("strategy does not match the game size");
    const NodeKind k = owner_kind(s.player);
    for (NodeId v = 1; v <= g.size(); ++v) {
        if (g.kind(v) != k) continue;
        if (s.choice[v] > 1 || s.choice[v] >= g.out_degree(v))
            throw PreconditionError(fmt::format("strategy picks a missing arc at node {}", v));
    }
}

std::vector<char> reachable_to_terminal(const Game& g, const StrategyPair& sp, const FixedValues* fixed)
{
    const int n = g.size();
    std::vector<std::vector<NodeId>> rev(n + 1);
    for (NodeId v = 1; v <= n; ++v) {
        if (is_pinned(g, fixed, v)) continue;
        if (g.kind(v) == NodeKind::Average) {
            for (NodeId w : g.arcs(v)) rev[w].push_back(v);
        } else {
            rev[chosen(g, sp, v)].push_back(v);
        }
    }
    std::vector<char> seen(n + 1, 0);
    std::vector<NodeId> stack;
    for (NodeId v = 1; v <= n; ++v) {
        if (is_pinned(g, fixed, v)) {
            seen[v] = 1;
            stack.push_back(v);
        }
    }
    while (!stack.empty()) {
        const NodeId u = stack.back();
        stack.pop_back();
        for (NodeId p : rev[u]) {
            if (!seen[p]) {
                seen[p] = 1;
                stack.push_back(p);
            }
        }
    }
    return seen;
}

ValueVector evaluate_strategy_pair(const Game& g, const StrategyPair& sp, Mode mode, const FixedValues* fixed)
{
    const int n = g.size();
    const auto reach = reachable_to_terminal(g, sp, fixed);

    // Collapse max/min chains onto the average or pinned node they end in.
    std::vector<NodeId> target(n + 1, 0);
    std::vector<NodeId> path;
    for (NodeId v = 1; v <= n; ++v) {
        if (!reach[v] || target[v]) continue;
        NodeId u = v;
        path.clear();
        while (!target[u] && !is_pinned(g, fixed, u) && g.kind(u) != NodeKind::Average) {
            path.push_back(u);
            u = chosen(g, sp, u);
            if (static_cast<int>(path.size()) > n) throw std::logic_error("cycle in a reachable max/min chain");
        }
        const NodeId end = target[u] ? target[u] : u;
        target[u] = end;
        for (NodeId x : path) target[x] = end;
    }

    std::vector<int> index(n + 1, -1);
    std::vector<NodeId> unknowns;
    for (NodeId v = 1; v <= n; ++v) {
        if (reach[v] && !is_pinned(g, fixed, v) && g.kind(v) == NodeKind::Average) {
            index[v] = static_cast<int>(unknowns.size());
            unknowns.push_back(v);
        }
    }

    SparseSystem sys;
    sys.rows.resize(unknowns.size());
    sys.rhs.assign(unknowns.size(), 0);
    for (std::size_t i = 0; i < unknowns.size(); ++i) {
        const NodeId v = unknowns[i];
        auto& row = sys.rows[i];
        row.push_back({static_cast<int>(i), 2});
        for (NodeId c : g.arcs(v)) {
            if (!reach[c]) continue;
            const NodeId t = target[c];
            if (index[t] < 0) {
                sys.rhs[i] += pinned_value(g, fixed, t);
                continue;
            }
            auto it = std::find_if(row.begin(), row.end(), [&](const auto& e) { return e.col == index[t]; });
            if (it != row.end()) it->coef -= 1;
            else row.push_back({index[t], -1});
        }
    }

    ValueVector out;
    out.mode = mode;
    out.approx.assign(n + 1, 0.0);
    if (mode == Mode::Exact) {
        out.exact.assign(n + 1, 0);
        const auto x = solve_exact_modular(sys);
        for (NodeId v = 1; v <= n; ++v) {
            if (!reach[v]) continue;
            const NodeId t = is_pinned(g, fixed, v) ? v : target[v];
            out.exact[v] = index[t] >= 0 ? x[index[t]] : pinned_value(g, fixed, t);
            out.approx[v] = out.exact[v].get_d();
        }
    } else {
        const auto x = solve_float(sys);
        const double res = max_residual(sys, x);
        if (!(res <= 1e-9)) throw std::runtime_error(fmt::format("float evaluation residual {} exceeds 1e-9", res));
        for (NodeId v = 1; v <= n; ++v) {
            if (!reach[v]) continue;
            const NodeId t = is_pinned(g, fixed, v) ? v : target[v];
            out.approx[v] = index[t] >= 0 ? x[index[t]] : pinned_value(g, fixed, t).get_d();
        }
    }
    return out;
}

bool is_satisfied(const Game& g, const ValueVector& v, NodeKind kind, double tol)
{
    const bool exact = v.mode == Mode::Exact;
    for (NodeId i = 1; i <= g.size(); ++i) {
        if (g.kind(i) != kind || is_terminal(kind)) continue;
        const NodeId j = g.arcs(i)[0], k = g.arcs(i)[1];
        if (exact) {
            const Rational& a = v.exact[j];
            const Rational& b = v.exact[k];
            Rational want = kind == NodeKind::Max ? std::max(a, b)
                          : kind == NodeKind::Min ? std::min(a, b)
                                                  : Rational((a + b) / 2);
            if (v.exact[i] != want) return false;
        } else {
            const double a = v.approx[j], b = v.approx[k];
            const double want = kind == NodeKind::Max ? std::max(a, b)
                              : kind == NodeKind::Min ? std::min(a, b)
                                                      : 0.5 * (a + b);
            if (!(std::abs(v.approx[i] - want) <= tol)) return false;
        }
    }
    return true;
}

bool is_stable(const Game& g, const ValueVector& v, double tol)
{
    if (v.size() != g.size()) return false;
    if (v.mode == Mode::Exact) {
        if (v.exact[g.terminal0()] != 0 || v.exact[g.terminal1()] != 1) return false;
    } else if (v.approx[g.terminal0()] != 0.0 || v.approx[g.terminal1()] != 1.0) {
        return false;
    }
    return is_satisfied(g, v, NodeKind::Max, tol) && is_satisfied(g, v, NodeKind::Min, tol) &&
           is_satisfied(g, v, NodeKind::Average, tol);
}

std::vector<NodeId> switchable_set(const Game& g, const ValueVector& v, const Strategy& s, double margin)
{
    std::vector<NodeId> out;
    const NodeKind k = owner_kind(s.player);
    const bool want_higher = s.player == Player::Max;
    for (NodeId i = 1; i <= g.size(); ++i) {
        if (g.kind(i) != k) continue;
        const NodeId cur = g.arcs(i)[s[i]];
        const NodeId alt = g.arcs(i)[1 - s[i]];
        bool better;
        if (v.mode == Mode::Exact) {
            better = want_higher ? v.exact[alt] > v.exact[cur] : v.exact[alt] < v.exact[cur];
        } else {
            better = want_higher ? v.approx[alt] > v.approx[cur] + margin : v.approx[alt] < v.approx[cur] - margin;
        }
        if (better) out.push_back(i);
    }
    return out;
}

Response best_response_unchecked(const Game& g, const Strategy& fixed, Mode mode, const Strategy* start,
                                 const FixedValues* pinned)
{
    const Player responder = opponent(fixed.player);
    Response r;
    r.strategy = start ? *start : Strategy(g, responder);
    r.strategy.player = responder;
    const int cap = 10 * g.size() + 10;
    for (;;) {
        StrategyPair sp = fixed.player == Player::Max ? StrategyPair(fixed, r.strategy) : StrategyPair(r.strategy, fixed);
        r.values = evaluate_strategy_pair(g, sp, mode, pinned);
        ++r.rounds;
        const auto improving = switchable_set(g, r.values, r.strategy);
        if (improving.empty()) return r;
        for (NodeId v : improving) r.strategy.choice[v] ^= 1;
        if (r.rounds > cap) throw std::runtime_error("best response exceeded its iteration cap");
    }
}

Response best_response(const Game& g, const Strategy& fixed, Mode mode, const Strategy* start)
{
    check_strategy(g, fixed);
    if (start) check_strategy(g, *start);
    if (!is_stopping(g)) throw PreconditionError("best_response requires a stopping game");
    return best_response_unchecked(g, fixed, mode, start);
}

}  // namespace ssg
