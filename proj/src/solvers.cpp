#include "ssg/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

#include "ssg/reducer.hpp"
#include "ssg/rng.hpp"

namespace ssg {

namespace {

int default_cap(const Game& g, const SolveOptions& opt) { return opt.iteration_cap > 0 ? opt.iteration_cap : 10 * g.size() + 10; }

void require_stopping(const Game& g, const char* who)
{
    const auto problems = validate_structure(g);
    if (!problems.empty()) throw PreconditionError(fmt::format("{}: malformed game: {}", who, problems.front()));
    if (!is_stopping(g)) throw PreconditionError(fmt::format("{}: game is not stopping", who));
}

bool value_less(const ValueVector& v, NodeId a, NodeId b)
{
    return v.mode == Mode::Exact ? v.exact[a] < v.exact[b] : v.approx[a] < v.approx[b];
}

}  // namespace

SolveResult solve_hoffman_karp(const Game& g, std::uint64_t seed, Mode mode, const SolveOptions& opt)
{
    require_stopping(g, "solve_hoffman_karp");
    SolveResult r;
    r.algorithm = "hk";
    r.seed = seed;

    Rng rng(seed);
    Strategy sigma(g, Player::Max);
    for (NodeId v : g.nodes_of(NodeKind::Max)) sigma.choice[v] = static_cast<std::uint8_t>(rng.below(2));
    Strategy tau(g, Player::Min);

    const int cap = default_cap(g, opt);
    for (;;) {
        ++r.iterations;
        Response resp = best_response_unchecked(g, sigma, mode, &tau);
        tau = std::move(resp.strategy);
        if (opt.record_trace) r.trace.push_back(resp.values);
        const auto improving = switchable_set(g, resp.values, sigma);
        if (improving.empty()) {
            r.values = std::move(resp.values);
            break;
        }
        if (r.iterations >= cap)
            throw std::runtime_error(fmt::format("solve_hoffman_karp: iteration cap {} reached (seed {})", cap, seed));
        for (NodeId v : improving) sigma.choice[v] ^= 1;
    }
    r.strategies = StrategyPair(std::move(sigma), std::move(tau));
    return r;
}

StrategyPair permutation_strategies(const Game& g, const std::vector<NodeId>& order)
{
    const int n = g.size();
    constexpr int kUnset = -2;
    std::vector<int> rank(n + 1, kUnset);
    rank[g.terminal0()] = -1;
    rank[g.terminal1()] = static_cast<int>(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = static_cast<int>(i);

    StrategyPair sp(g);
    std::vector<char> state(n + 1, 0);  // 0 new, 1 open, 2 done
    std::vector<NodeId> stack;
    for (NodeId root = 1; root <= n; ++root) {
        if (!is_decision(g.kind(root)) || state[root] == 2) continue;
        stack.push_back(root);
        while (!stack.empty()) {
            const NodeId v = stack.back();
            if (state[v] == 2) {
                stack.pop_back();
                continue;
            }
            state[v] = 1;
            bool ready = true;
            for (NodeId w : g.arcs(v)) {
                if (rank[w] != kUnset || !is_decision(g.kind(w))) continue;
                if (state[w] == 1) throw PreconditionError("permutation_strategies: max/min cycle");
                stack.push_back(w);
                ready = false;
            }
            if (!ready) continue;
            const auto& arcs = g.arcs(v);
            const int r0 = rank[arcs[0]], r1 = rank[arcs[1]];
            const bool second = g.kind(v) == NodeKind::Max ? r1 > r0 : r1 < r0;
            sp.of(g.kind(v) == NodeKind::Max ? Player::Max : Player::Min).choice[v] = second ? 1 : 0;
            rank[v] = second ? r1 : r0;
            state[v] = 2;
            stack.pop_back();
        }
    }
    return sp;
}

SolveResult solve_permutation_improvement(const Game& g, std::uint64_t seed, Mode mode, const SolveOptions& opt)
{
    require_stopping(g, "solve_permutation_improvement");
    std::vector<NodeId> order = g.nodes_of(NodeKind::Average);
    if (order.empty()) throw PreconditionError("solve_permutation_improvement: game has no average node");

    SolveResult r;
    r.algorithm = "perm";
    r.seed = seed;
    Rng rng(seed);
    rng.shuffle(order);

    auto play = [&](StrategyPair& sp) {
        sp = permutation_strategies(g, order);
        if (opt.perm_induced_min) return evaluate_strategy_pair(g, sp, mode);
        Response resp = best_response_unchecked(g, sp.sigma, mode, &sp.tau);
        sp.tau = std::move(resp.strategy);
        return std::move(resp.values);
    };
    auto settled = [&](const StrategyPair& sp, const ValueVector& v) {
        for (std::size_t i = 1; i < order.size(); ++i) {
            const bool ok = mode == Mode::Exact ? v.exact[order[i - 1]] <= v.exact[order[i]]
                                                : v.approx[order[i - 1]] <= v.approx[order[i]] + kSwitchMargin;
            if (!ok) return false;
        }
        return switchable_set(g, v, sp.sigma).empty() && switchable_set(g, v, sp.tau).empty();
    };

    // The random start is evaluated once; every later round re-sorts the
    // averages by the latest values (one update) and re-evaluates.
    StrategyPair sp;
    ValueVector v = play(sp);
    const int cap = default_cap(g, opt);
    do {
        if (r.iterations >= cap)
            throw std::runtime_error(
                fmt::format("solve_permutation_improvement: iteration cap {} reached (seed {})", cap, seed));
        std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return value_less(v, a, b); });
        ++r.iterations;
        v = play(sp);
    } while (!settled(sp, v));

    r.values = std::move(v);
    r.strategies = std::move(sp);
    r.permutation = std::move(order);
    return r;
}

SolveResult solve_brute_force(const Game& g, int cap, const FixedValues* fixed)
{
    const auto problems = validate_structure(g);
    if (!problems.empty()) throw PreconditionError("solve_brute_force: malformed game: " + problems.front());

    auto pinned = [&](NodeId v) { return fixed && static_cast<std::size_t>(v) < fixed->size() && (*fixed)[v]; };
    std::vector<NodeId> free_nodes;
    for (NodeId v = 1; v <= g.size(); ++v) {
        if (is_decision(g.kind(v)) && !pinned(v)) free_nodes.push_back(v);
    }
    if (static_cast<int>(free_nodes.size()) > cap)
        throw PreconditionError(fmt::format("solve_brute_force: {} max/min nodes exceed the cap of {}",
                                            free_nodes.size(), cap));

    SolveResult r;
    r.algorithm = "bf";
    const std::uint64_t total = std::uint64_t{1} << free_nodes.size();
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        StrategyPair sp(g);
        for (std::size_t i = 0; i < free_nodes.size(); ++i) {
            const NodeId v = free_nodes[i];
            sp.of(g.kind(v) == NodeKind::Max ? Player::Max : Player::Min).choice[v] = (mask >> i) & 1;
        }
        ValueVector val = evaluate_strategy_pair(g, sp, Mode::Exact, fixed);
        bool optimal = true;
        for (NodeId v : free_nodes) {
            const Rational& a = val.exact[g.arcs(v)[0]];
            const Rational& b = val.exact[g.arcs(v)[1]];
            const Rational& best = g.kind(v) == NodeKind::Max ? std::max(a, b) : std::min(a, b);
            if (val.exact[v] != best) {
                optimal = false;
                break;
            }
        }
        ++r.iterations;
        if (optimal) {
            r.values = std::move(val);
            r.strategies = std::move(sp);
            return r;
        }
    }
    throw std::runtime_error("solve_brute_force: no mutually optimal pair (game is not stopping?)");
}

ValueVector solve_value_iteration(const Game& g, double tol, long max_sweeps, int* sweeps)
{
    require_stopping(g, "solve_value_iteration");
    const int n = g.size();
    std::vector<double> cur(n + 1, 0.0), next(n + 1, 0.0);
    cur[g.terminal1()] = next[g.terminal1()] = 1.0;
    for (long sweep = 1; sweep <= max_sweeps; ++sweep) {
        double change = 0.0;
        for (NodeId v = 1; v <= n; ++v) {
            const NodeKind k = g.kind(v);
            if (is_terminal(k)) continue;
            const double a = cur[g.arcs(v)[0]], b = cur[g.arcs(v)[1]];
            next[v] = k == NodeKind::Max ? std::max(a, b) : k == NodeKind::Min ? std::min(a, b) : 0.5 * (a + b);
            change = std::max(change, std::abs(next[v] - cur[v]));
        }
        cur.swap(next);
        if (change < tol) {
            if (sweeps) *sweeps = static_cast<int>(sweep);
            ValueVector out;
            out.mode = Mode::Float;
            out.approx = std::move(cur);
            return out;
        }
    }
    throw std::runtime_error(fmt::format("solve_value_iteration: no convergence to {} within {} sweeps", tol, max_sweeps));
}

SolveResult solve_value_iteration_result(const Game& g, double tol)
{
    SolveResult r;
    r.algorithm = "vi";
    r.values = solve_value_iteration(g, tol, 10'000'000, &r.iterations);
    r.strategies = StrategyPair(g);
    for (NodeId v = 1; v <= g.size(); ++v) {
        if (!is_decision(g.kind(v))) continue;
        const double a = r.values[g.arcs(v)[0]], b = r.values[g.arcs(v)[1]];
        const bool second = g.kind(v) == NodeKind::Max ? b > a : b < a;
        r.strategies.of(g.kind(v) == NodeKind::Max ? Player::Max : Player::Min).choice[v] = second ? 1 : 0;
    }
    return r;
}

ValueVector solve_by_components(const Game& g, int cap)
{
    const int n = g.size();
    const auto comps = scc_condense(g);
    std::vector<int> comp_of(n + 1, -1);
    for (std::size_t i = 0; i < comps.size(); ++i) {
        for (NodeId v : comps[i].nodes) comp_of[v] = static_cast<int>(i);
    }

    ValueVector out;
    out.mode = Mode::Exact;
    out.exact.assign(n + 1, 0);
    out.exact[g.terminal1()] = 1;
    std::vector<char> solved(n + 1, 0);
    for (std::size_t i = 0; i < comps.size(); ++i) {
        // Everything outside the component is pinned; nodes of later
        // components are unreachable from it, so their placeholder is unused.
        FixedValues fixed(n + 1);
        for (NodeId v = 1; v <= n; ++v) {
            if (is_terminal(g.kind(v)) || comp_of[v] == static_cast<int>(i)) continue;
            fixed[v] = solved[v] ? out.exact[v] : Rational(0);
        }
        const SolveResult part = solve_brute_force(g, cap, &fixed);
        for (NodeId v : comps[i].nodes) {
            out.exact[v] = part.values.exact[v];
            solved[v] = 1;
        }
    }
    out.approx.assign(n + 1, 0.0);
    for (NodeId v = 1; v <= n; ++v) out.approx[v] = out.exact[v].get_d();
    return out;
}

SolveResult solve_with(const std::string& algorithm, const Game& g, std::uint64_t seed, Mode mode)
{
    SolveResult r;
    if (algorithm == "hk") return solve_hoffman_karp(g, seed, mode);
    if (algorithm == "perm") return solve_permutation_improvement(g, seed, mode);
    if (algorithm == "bf") r = solve_brute_force(g);
    else if (algorithm == "vi") r = solve_value_iteration_result(g, 1e-12);
    else throw std::invalid_argument("unknown algorithm '" + algorithm + "'");
    r.seed = seed;
    return r;
}

std::string result_to_json(const Game& g, const SolveResult& r)
{
    nlohmann::ordered_json j;
    j["algorithm"] = r.algorithm;
    j["seed"] = r.seed;
    j["iterations"] = r.iterations;
    j["mode"] = r.values.mode == Mode::Exact ? "exact" : "float";
    auto values = nlohmann::ordered_json::array();
    for (NodeId v = 1; v <= g.size(); ++v) {
        if (r.values.mode == Mode::Exact) values.push_back(to_fraction_string(r.values.exact[v]));
        else values.push_back(r.values.approx[v]);
    }
    j["values"] = std::move(values);
    auto choices = [&](Player p) {
        nlohmann::ordered_json o = nlohmann::ordered_json::object();
        for (NodeId v : g.nodes_of(owner_kind(p))) o[std::to_string(v)] = g.arcs(v)[r.strategies.of(p)[v]];
        return o;
    };
    j["sigma"] = choices(Player::Max);
    j["tau"] = choices(Player::Min);
    if (!r.permutation.empty()) j["permutation"] = r.permutation;
    return j.dump(2) + "\n";
}

}  // namespace ssg
