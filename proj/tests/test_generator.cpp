#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include <json.hpp>

#include "ssg/game_io.hpp"
#include "ssg/generator.hpp"
#include "ssg/reducer.hpp"
#include "support/builders.hpp"
#include "support/oracles.hpp"

using namespace ssg;
using namespace testing_support;

namespace {

// Every non-terminal node reaches every other one without passing a terminal.
bool strongly_connected_core(const Game& g)
{
    const int k = g.size() - 2;
    for (NodeId s = 1; s <= k; ++s) {
        std::vector<char> seen(g.size() + 1, 0);
        std::vector<NodeId> stack{s};
        seen[s] = 1;
        int count = 1;
        while (!stack.empty()) {
            const NodeId u = stack.back();
            stack.pop_back();
            for (NodeId w : g.arcs(u)) {
                if (w > k || seen[w]) continue;
                seen[w] = 1;
                ++count;
                stack.push_back(w);
            }
        }
        if (count != k) return false;
    }
    return true;
}

// Same game up to a renumbering of the non-terminal nodes, arcs compared as
// unordered pairs.
bool isomorphic(const Game& a, const Game& b)
{
    if (a.size() != b.size()) return false;
    const int k = a.size() - 2;
    std::vector<NodeId> perm(k);
    std::iota(perm.begin(), perm.end(), 1);
    do {
        auto map = [&](NodeId v) { return v > k ? v : perm[v - 1]; };
        bool ok = true;
        for (NodeId v = 1; v <= k && ok; ++v) {
            const NodeId w = map(v);
            if (a.kind(v) != b.kind(w)) ok = false;
            else {
                std::multiset<NodeId> x{map(a.arcs(v)[0]), map(a.arcs(v)[1])};
                std::multiset<NodeId> y(b.arcs(w).begin(), b.arcs(w).end());
                ok = x == y;
            }
        }
        if (ok) return true;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
}

}  // namespace

TEST_SUITE("generator")
{
TEST_CASE("parameter validation")
{
    CHECK_NOTHROW(validate(GenParams::make(1, 1, 1, 0, Variant::Basic)));
    CHECK_THROWS_AS(validate(GenParams::make(0, 1, 1, 0, Variant::Basic)), std::invalid_argument);
    CHECK_THROWS_AS(validate(GenParams::make(1, 1, 1, 0, Variant::Modified)), std::invalid_argument);
    GenParams bad = GenParams::make(2, 2, 2, 0, Variant::Basic);
    bad.n = 9;
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
    CHECK_THROWS_AS(generate_basic(GenParams::make(2, 1, 1, 0, Variant::Modified)), std::invalid_argument);
}

TEST_CASE("ratio counts")
{
    const NodeCounts big = ratio_counts({4096, 1});
    CHECK(big.a == 455);
    CHECK(big.b == 1820);
    CHECK(big.c == 1820);
    CHECK(big.total() == 4097);

    const NodeCounts r1 = ratio_counts({128, 1});
    CHECK(r1.a == 14);
    CHECK(r1.c == 56);
    const NodeCounts r8 = ratio_counts({128, 8});
    CHECK(r8.a == 64);
    CHECK(r8.b == 32);
    CHECK(r8.c == 32);
    for (int size : {32, 64, 128, 256, 512, 1024, 2048, 4096}) {
        for (int r = 1; r <= 8; ++r) {
            const NodeCounts c = ratio_counts({size, r});
            CHECK(c.b == c.c);
            CHECK(c.a >= 2);
            CHECK(std::abs(c.total() - size) <= 3);
        }
    }
    CHECK_THROWS_AS(ratio_counts({128, 9}), std::invalid_argument);
}

TEST_CASE("basic generator: smallest games are stopping")
{
    for (std::uint64_t s = 0; s < 100; ++s) {
        const Game g = generate_basic(GenParams::make(1, 1, 1, s, Variant::Basic));
        CHECK(g.size() == 5);
        CHECK(validate_structure(g).empty());
        CHECK(oracle::stopping_by_pairs(g));
        CHECK(is_stopping(g));
    }
}

TEST_CASE("basic generator: construction rules")
{
    Rng rng(31);
    for (int t = 0; t < 200; ++t) {
        const int a = static_cast<int>(rng.between(1, 30));
        const int b = static_cast<int>(rng.between(1, 30));
        const int c = static_cast<int>(rng.between(1, 30));
        const auto p = GenParams::make(a, b, c, rng.next(), Variant::Basic);
        const Game g = generate_basic(p);
        REQUIRE(validate_structure(g).empty());
        CHECK(g.count(NodeKind::Average) == a);
        CHECK(g.count(NodeKind::Min) == b);
        CHECK(g.count(NodeKind::Max) == c);
        CHECK(g.kind(g.size() - 2) == NodeKind::Average);
        for (NodeId v = 1; v <= g.size() - 2; ++v) {
            CHECK(g.arcs(v)[0] > v);
            CHECK(g.arcs(v)[1] != v);
            CHECK(g.arcs(v)[1] != g.arcs(v)[0]);
        }
        CHECK(is_stopping(g));
        CHECK(oracle::naive_bad_core(g).empty());
        CHECK(serialize_game(generate_basic(p)) == serialize_game(g));
    }
}

TEST_CASE("find_valid_arcs: hand examples")
{
    // Max node 1 has one arc to terminal-1; min node 2 points back at it.
    const Game pre({{MAX, {4}}, {MIN, {1, 4}}, {NodeKind::Terminal0, {}}, {NodeKind::Terminal1, {}}});
    CHECK(find_valid_arcs(pre, 1).empty());
    Game with = pre;
    with.add_arc(1, 2);
    CHECK(!find_bad_core(with).empty());

    // No ancestors: everything except m, p and the terminals.
    const Game free({{MAX, {2}}, {AVG, {5, 6}}, {MIN, {2, 6}}, {AVG, {3, 5}}, {NodeKind::Terminal0, {}},
                     {NodeKind::Terminal1, {}}});
    CHECK(find_valid_arcs(free, 1) == std::vector<NodeId>{3, 4});

    CHECK_THROWS_AS(find_valid_arcs(free, 2), PreconditionError);
    CHECK_THROWS_AS(find_valid_arcs(free, 3), PreconditionError);
}

TEST_CASE("find_valid_arcs matches add-and-check on generator partial games")
{
    Rng rng(32);
    int trials = 0;
    while (trials < 150) {
        const int a = static_cast<int>(rng.between(1, 4));
        const int b = static_cast<int>(rng.between(1, 3));
        const int c = static_cast<int>(rng.between(1, 3));
        const auto p = GenParams::make(a, b, c, rng.next(), Variant::Basic);
        const int placed = static_cast<int>(rng.below(b + c));
        const Game partial = generate_basic_partial(p, placed);
        std::vector<NodeId> open;
        for (NodeId v = 1; v <= partial.size(); ++v) {
            if (is_decision(partial.kind(v)) && partial.out_degree(v) == 1) open.push_back(v);
        }
        if (open.empty()) continue;
        const NodeId m = rng.pick(open);
        const auto got = find_valid_arcs(partial, m);
        const auto want = oracle::valid_arcs_by_trial(partial, m);
        CHECK(std::set<NodeId>(got.begin(), got.end()) == want);
        ++trials;
    }
}

TEST_CASE("find_valid_arcs matches add-and-check on arbitrary partial games")
{
    Rng rng(33);
    int trials = 0;
    while (trials < 300) {
        // Random kinds and arcs; max/min nodes keep one or two arcs.
        const int k = static_cast<int>(rng.between(3, 10));
        std::vector<Node> nodes(k + 2);
        for (int i = 0; i < k; ++i) {
            const auto r = rng.below(3);
            nodes[i].kind = r == 0 ? NodeKind::Average : r == 1 ? NodeKind::Max : NodeKind::Min;
            const int arcs = nodes[i].kind == NodeKind::Average ? 2 : static_cast<int>(rng.between(1, 2));
            for (int j = 0; j < arcs; ++j) nodes[i].arcs.push_back(static_cast<NodeId>(rng.between(1, k + 2)));
        }
        nodes[k].kind = NodeKind::Terminal0;
        nodes[k + 1].kind = NodeKind::Terminal1;
        const Game g(nodes);
        if (!oracle::naive_bad_core(g).empty()) continue;
        std::vector<NodeId> open;
        for (NodeId v = 1; v <= k; ++v) {
            if (is_decision(g.kind(v)) && g.out_degree(v) == 1) open.push_back(v);
        }
        if (open.empty()) continue;
        const NodeId m = rng.pick(open);
        const auto got = find_valid_arcs(g, m);
        CHECK(std::set<NodeId>(got.begin(), got.end()) == oracle::valid_arcs_by_trial(g, m));
        ++trials;
    }
}

TEST_CASE("modified generator: construction rules and stoppingness")
{
    Rng rng(34);
    int unmerged = 0;
    for (int t = 0; t < 200; ++t) {
        const int size = rng.pick(std::vector<int>{32, 64, 128});
        const NodeCounts c = ratio_counts({size, static_cast<int>(rng.between(1, 8))});
        const auto p = GenParams::make(c.a, c.b, c.c, rng.next(), Variant::Modified);
        const Game g = generate_reduced(p);
        REQUIRE(validate_structure(g).empty());
        CHECK(is_stopping(g));
        if (g.size() == p.n) {
            // Nothing merged: the construction is visible as generated.
            ++unmerged;
            for (NodeId v = 1; v <= g.size() - 2; ++v) {
                if (!is_decision(g.kind(v))) continue;
                CHECK(!is_terminal(g.kind(g.arcs(v)[0])));
                CHECK(!is_terminal(g.kind(g.arcs(v)[1])));
            }
            CHECK(g.kind(p.n - 2) == NodeKind::Average);
            CHECK(g.arcs(p.n - 2)[0] == g.terminal0());
            CHECK(g.kind(p.n - 3) == NodeKind::Average);
            CHECK(g.arcs(p.n - 3)[0] == g.terminal1());
            CHECK(g.count(NodeKind::Average) == p.a);
        }
        CHECK(serialize_game(generate_reduced(p)) == serialize_game(g));
    }
    CHECK(unmerged > 20);
}

TEST_CASE("fully reduced instances")
{
    for (int r : {1, 4, 8}) {
        const RatioSpec spec{64, r};
        const GeneratedInstance inst = generate_fully_reduced(spec, 500 + r);
        const NodeCounts c = ratio_counts(spec);
        CHECK(inst.game.size() == c.total());
        CHECK(inst.params.a == c.a);
        CHECK(check_assumptions(inst.game).benchmark_ready());
        CHECK(strongly_connected_core(inst.game));

        const auto meta = nlohmann::json::parse(metadata_json(inst, spec));
        CHECK(meta["seed"] == 500u + r);
        CHECK(meta["variant"] == "modified");
        CHECK(meta["a"] == c.a);
        CHECK(meta["retries"] == inst.retries);

        const GeneratedInstance again = generate_fully_reduced(spec, 500 + r);
        CHECK(again.game == inst.game);
        CHECK(again.retries == inst.retries);
    }
    CHECK_THROWS_AS(generate_fully_reduced({64, 1}, 1, 0), std::runtime_error);
}

TEST_CASE("a small stopping game is reachable by seed sweep")
{
    // 1 max, 1 min, 2 averages; no max/min arc touches a terminal.
    const Game target = make_game({{MAX, {2, 4}}, {MIN, {3, 4}}, {AVG, {5, 1}}, {AVG, {6, 2}}});
    REQUIRE(oracle::stopping_by_pairs(target));
    bool found = false;
    for (std::uint64_t s = 0; s < 400000 && !found; ++s) {
        const Game g = generate_basic(GenParams::make(2, 1, 1, s, Variant::Basic));
        found = isomorphic(g, target);
    }
    CHECK(found);
}
}
