#include "ssg/generator.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

#include "ssg/reducer.hpp"
#include "ssg/rng.hpp"

namespace ssg {

void validate(const GenParams& p)
{
    if (p.n != p.a + p.b + p.c + 2)
        throw std::invalid_argument(fmt::format("n={} but a+b+c+2={}", p.n, p.a + p.b + p.c + 2));
    const int min_avg = p.variant == Variant::Modified ? 2 : 1;
    if (p.a < min_avg || p.b < 1 || p.c < 1)
        throw std::invalid_argument(fmt::format("need a>={}, b>=1, c>=1 (got a={}, b={}, c={})", min_avg, p.a, p.b, p.c));
}

NodeCounts ratio_counts(const RatioSpec& r)
{
    if (r.ratio_num < 1 || r.ratio_num > 8) throw std::invalid_argument("ratio_num must be in 1..8");
    if (r.size < 6) throw std::invalid_argument("size too small");
    const int den = r.ratio_num + 8;
    NodeCounts out;
    out.c = (8 * (r.size - 2) + den) / (2 * den);
    out.b = out.c;
    out.a = std::max(2, (2 * r.ratio_num * out.c + 4) / 8);
    return out;
}

namespace {

// Uniform node in 1..n other than the (at most two) excluded ids.
NodeId draw_excluding(Rng& rng, int n, NodeId x, NodeId y)
{
    if (x > y) std::swap(x, y);
    const int slots = n - (x == y ? 1 : 2);
    NodeId q = static_cast<NodeId>(rng.below(slots)) + 1;
    if (q >= x) ++q;
    if (x != y && q >= y) ++q;
    return q;
}

NodeId take_random(Rng& rng, std::vector<NodeId>& pending)
{
    const auto i = rng.below(pending.size());
    const NodeId m = pending[i];
    pending[i] = pending.back();
    pending.pop_back();
    return m;
}

std::vector<NodeKind> shuffled_labels(Rng& rng, int avg, int min, int max)
{
    std::vector<NodeKind> pool;
    pool.insert(pool.end(), avg, NodeKind::Average);
    pool.insert(pool.end(), min, NodeKind::Min);
    pool.insert(pool.end(), max, NodeKind::Max);
    rng.shuffle(pool);
    return pool;
}

std::vector<NodeId> pending_of(const Game& g, bool averages)
{
    std::vector<NodeId> out;
    for (NodeId v = 1; v <= g.size(); ++v) {
        const bool avg = g.kind(v) == NodeKind::Average;
        if (avg == averages && !is_terminal(g.kind(v)) && g.out_degree(v) == 1) out.push_back(v);
    }
    return out;
}

std::vector<NodeId> valid_arcs(const PartialGame& g, NodeId m, const std::vector<std::vector<NodeId>>& par)
{
    const int n = g.size();
    // Terminals count as members of Q; m never does.
    auto outside_q = [&](const std::vector<char>& in_q, NodeId w) { return !in_q[w] && !is_terminal(g.kind(w)); };

    std::vector<char> in_q(n + 1, 1);
    in_q[0] = 0;
    in_q[m] = 0;
    in_q[g.terminal0()] = 0;
    in_q[g.terminal1()] = 0;

    // Strip every ancestor of m.
    std::vector<NodeId> work{m};
    while (!work.empty()) {
        const NodeId u = work.back();
        work.pop_back();
        for (NodeId p : par[u]) {
            if (in_q[p]) {
                in_q[p] = 0;
                work.push_back(p);
            }
        }
    }

    // Seed: stripped average nodes with an arc into Q or a terminal.
    for (NodeId v = 1; v <= n; ++v) {
        if (in_q[v] || v == m || g.kind(v) != NodeKind::Average) continue;
        const auto& arcs = g.arcs(v);
        if (std::any_of(arcs.begin(), arcs.end(), [&](NodeId w) { return !outside_q(in_q, w); })) {
            in_q[v] = 1;
            work.push_back(v);
        }
    }
    // Restore parents that can no longer sit in a bad subgraph: averages with
    // an arc into Q, max/min nodes whose every present arc leads into Q.
    while (!work.empty()) {
        const NodeId u = work.back();
        work.pop_back();
        for (NodeId p : par[u]) {
            if (in_q[p] || p == m) continue;
            bool restore = g.kind(p) == NodeKind::Average;
            if (!restore) {
                const auto& arcs = g.arcs(p);
                restore = std::none_of(arcs.begin(), arcs.end(), [&](NodeId w) { return outside_q(in_q, w); });
            }
            if (restore) {
                in_q[p] = 1;
                work.push_back(p);
            }
        }
    }

    const NodeId existing = g.arcs(m)[0];
    std::vector<NodeId> out;
    for (NodeId v = 1; v <= n; ++v) {
        if (in_q[v] && v != m && v != existing && !is_terminal(g.kind(v))) out.push_back(v);
    }
    return out;
}

void check_find_valid_arcs_input(const PartialGame& g, NodeId m)
{
    if (m < 1 || m > g.size() || !is_decision(g.kind(m)))
        throw PreconditionError(fmt::format("find_valid_arcs: node {} is not a max or min node", m));
    if (g.out_degree(m) != 1)
        throw PreconditionError(fmt::format("find_valid_arcs: node {} has {} arcs, expected 1", m, g.out_degree(m)));
}

// Shared tail of the basic generator. Returns false if it stopped early.
bool add_basic_second_arcs(PartialGame& g, Rng& rng, int decision_arc_limit)
{
    const int n = g.size();
    auto avg_pending = pending_of(g, true);
    while (!avg_pending.empty()) {
        const NodeId m = take_random(rng, avg_pending);
        g.add_arc(m, draw_excluding(rng, n, m, g.arcs(m)[0]));
    }
    auto dec_pending = pending_of(g, false);
    int placed = 0;
    while (!dec_pending.empty()) {
        if (decision_arc_limit >= 0 && placed >= decision_arc_limit) return false;
        const NodeId m = take_random(rng, dec_pending);
        auto q = valid_arcs(g, m, g.parents());
        // Only possible when m already points at the sole terminal-adjacent
        // average node; terminal targets are always safe.
        if (q.empty()) q = {g.terminal0(), g.terminal1()};
        g.add_arc(m, rng.pick(q));
        ++placed;
    }
    return true;
}

PartialGame basic_first_phase(const GenParams& p, Rng& rng)
{
    validate(p);
    if (p.variant != Variant::Basic) throw std::invalid_argument("generate_basic needs the Basic variant");
    const int n = p.n;
    std::vector<Node> nodes(n);
    const auto labels = shuffled_labels(rng, p.a - 1, p.b, p.c);
    for (int i = 0; i < n - 3; ++i) nodes[i].kind = labels[i];
    nodes[n - 3].kind = NodeKind::Average;
    nodes[n - 2].kind = NodeKind::Terminal0;
    nodes[n - 1].kind = NodeKind::Terminal1;
    PartialGame g(std::move(nodes));
    for (NodeId v = 1; v <= n - 2; ++v) g.add_arc(v, static_cast<NodeId>(rng.between(v + 1, n)));
    return g;
}

}  // namespace

std::vector<NodeId> find_valid_arcs(const PartialGame& g, NodeId m)
{
    check_find_valid_arcs_input(g, m);
    return valid_arcs(g, m, g.parents());
}

Game generate_basic(const GenParams& p)
{
    Rng rng(p.seed);
    PartialGame g = basic_first_phase(p, rng);
    add_basic_second_arcs(g, rng, -1);
    return g;
}

PartialGame generate_basic_partial(const GenParams& p, int decision_arcs)
{
    Rng rng(p.seed);
    PartialGame g = basic_first_phase(p, rng);
    add_basic_second_arcs(g, rng, decision_arcs);
    return g;
}

Game generate_reduced(const GenParams& p)
{
    validate(p);
    if (p.variant != Variant::Modified) throw std::invalid_argument("generate_reduced needs the Modified variant");
    Rng rng(p.seed);
    const int n = p.n;
    const NodeId t0 = n - 1, t1 = n;

    std::vector<Node> nodes(n);
    const auto labels = shuffled_labels(rng, p.a - 2, p.b, p.c);
    for (int i = 0; i < n - 4; ++i) nodes[i].kind = labels[i];
    nodes[n - 4] = {NodeKind::Average, {t1}};  // node n-3
    nodes[n - 3] = {NodeKind::Average, {t0}};  // node n-2
    nodes[n - 2].kind = NodeKind::Terminal0;
    nodes[n - 1].kind = NodeKind::Terminal1;
    PartialGame g(std::move(nodes));

    for (NodeId v = 1; v <= n - 4; ++v) {
        const NodeId hi = g.kind(v) == NodeKind::Average ? n : n - 2;
        g.add_arc(v, static_cast<NodeId>(rng.between(v + 1, hi)));
    }

    auto indeg = g.in_degrees();
    auto zero_indegree = [&](NodeId exclude_a, NodeId exclude_b) {
        std::vector<NodeId> out;
        for (NodeId v = 1; v <= n; ++v) {
            if (indeg[v] == 0 && v != exclude_a && v != exclude_b) out.push_back(v);
        }
        return out;
    };

    const int z = static_cast<int>(zero_indegree(0, 0).size());
    const int r = static_cast<int>(rng.between(std::max(z - (p.b + p.c), 0), std::min(p.a, z)));

    auto avg_pending = pending_of(g, true);
    for (int i = 0; i < r && !avg_pending.empty(); ++i) {
        const NodeId m = take_random(rng, avg_pending);
        const NodeId first = g.arcs(m)[0];
        const auto cand = zero_indegree(m, first);
        const NodeId q = cand.empty() ? draw_excluding(rng, n, m, first) : rng.pick(cand);
        g.add_arc(m, q);
        ++indeg[q];
    }
    while (!avg_pending.empty()) {
        const NodeId m = take_random(rng, avg_pending);
        const NodeId q = draw_excluding(rng, n, m, g.arcs(m)[0]);
        g.add_arc(m, q);
        ++indeg[q];
    }

    auto dec_pending = pending_of(g, false);
    while (!dec_pending.empty()) {
        const NodeId m = take_random(rng, dec_pending);
        const auto valid = valid_arcs(g, m, g.parents());
        if (valid.empty()) throw std::logic_error(fmt::format("no valid second arc for node {}", m));
        std::vector<NodeId> fresh;
        for (NodeId q : valid) {
            if (indeg[q] == 0) fresh.push_back(q);
        }
        const NodeId q = fresh.empty() ? rng.pick(valid) : rng.pick(fresh);
        g.add_arc(m, q);
        ++indeg[q];
    }

    return merge_terminal_valued(g).first;
}

GeneratedInstance generate_fully_reduced(const RatioSpec& r, std::uint64_t seed, int retry_cap)
{
    const NodeCounts counts = ratio_counts(r);
    for (int attempt = 0; attempt < retry_cap; ++attempt) {
        const GenParams p = GenParams::make(counts.a, counts.b, counts.c, derive_seed(seed, attempt), Variant::Modified);
        Game g = generate_reduced(p);
        if (g.size() != p.n) continue;
        if (!check_assumptions(g).benchmark_ready()) continue;
        return {std::move(g), p, seed, attempt};
    }
    throw std::runtime_error(fmt::format("no fully reduced instance for size {} ratio {}:4 after {} attempts (seed {})",
                                         r.size, r.ratio_num, retry_cap, seed));
}

std::string metadata_json(const GeneratedInstance& inst, const RatioSpec& r)
{
    nlohmann::ordered_json j;
    j["seed"] = inst.seed;
    j["variant"] = inst.params.variant == Variant::Basic ? "basic" : "modified";
    j["a"] = inst.params.a;
    j["b"] = inst.params.b;
    j["c"] = inst.params.c;
    j["retries"] = inst.retries;
    j["attempt_seed"] = inst.params.seed;
    j["size"] = r.size;
    j["ratio"] = fmt::format("{}:4", r.ratio_num);
    return j.dump(2) + "\n";
}

}  // namespace ssg
