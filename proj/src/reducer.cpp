#include "ssg/reducer.hpp"

#include <algorithm>
#include <stdexcept>

#include <json.hpp>

namespace ssg {

namespace {

/// Mutable copy of a game keyed by the original ids; removals are logged into
/// a ReductionReport and renumbering happens only in finish().
class WorkGraph {
 public:
  explicit WorkGraph(const Game& g)
      : n_(g.size()), kind_(n_ + 1), arcs_(n_ + 1), alive_(n_ + 1, 1), parents_(n_ + 1)
  {
      for (NodeId v = 1; v <= n_; ++v) {
          kind_[v] = g.kind(v);
          arcs_[v] = g.arcs(v);
          for (NodeId w : arcs_[v]) parents_[w].push_back(v);
      }
      report_.original_size = n_;
  }

  NodeId t0() const { return n_ - 1; }
  NodeId t1() const { return n_; }

  bool trivial_pass(unsigned mask)
  {
      bool any = false;
      for (bool changed = true; changed;) {
          changed = false;
          for (NodeId v = 1; v <= n_; ++v) {
              if (!alive_[v] || is_terminal(kind_[v])) continue;
              if (apply_local_rules(v, mask)) changed = true;
          }
          if (mask & rules::kZeroInDegree) {
              for (NodeId v = 1; v <= n_; ++v) {
                  if (alive_[v] && !is_terminal(kind_[v]) && parents_[v].empty()) {
                      remove(v);
                      changed = true;
                  }
              }
          }
          if ((mask & rules::kTerminalZeroInDegree) && collapse_if_terminal_unused()) changed = true;
          any = any || changed;
      }
      return any;
  }

  bool terminal_valued_pass()
  {
      std::vector<NodeId> ids;
      const Game g = snapshot(ids);
      const auto ones = find_terminal_valued(g, Polarity::One);
      const auto zeros = find_terminal_valued(g, Polarity::Zero);
      bool changed = false;
      for (NodeId v : ones) {
          if (is_terminal(g.kind(v))) continue;
          merge(ids[v - 1], t1(), "one-valued");
          changed = true;
      }
      for (NodeId v : zeros) {
          if (is_terminal(g.kind(v))) continue;
          merge(ids[v - 1], t0(), "zero-valued");
          changed = true;
      }
      return changed;
  }

  /// Current game with survivors renumbered; ids[i] is the original id of node i+1.
  Game snapshot(std::vector<NodeId>& ids) const
  {
      ids.clear();
      for (NodeId v = 1; v <= n_; ++v) {
          if (alive_[v] && !is_terminal(kind_[v])) ids.push_back(v);
      }
      ids.push_back(t0());
      ids.push_back(t1());
      std::vector<NodeId> remap(n_ + 1, 0);
      for (std::size_t i = 0; i < ids.size(); ++i) remap[ids[i]] = static_cast<NodeId>(i + 1);
      std::vector<Node> nodes;
      nodes.reserve(ids.size());
      for (NodeId v : ids) {
          Node nd{kind_[v], {}};
          for (NodeId w : arcs_[v]) nd.arcs.push_back(remap[w]);
          nodes.push_back(std::move(nd));
      }
      return Game(std::move(nodes));
  }

  std::pair<Game, ReductionReport> finish()
  {
      Game g = snapshot(report_.survivors);
      report_.degenerate_half = is_degenerate_half(g);
      return {std::move(g), std::move(report_)};
  }

 private:
  bool apply_local_rules(NodeId v, unsigned mask)
  {
      const NodeId a = arcs_[v][0], b = arcs_[v][1];
      if ((mask & rules::kIdenticalArcs) && a == b) {
          // Both arcs looping back: no path to a terminal, value 0.
          merge(v, a == v ? t0() : a, "identical-arcs");
          return true;
      }
      if ((mask & rules::kMaxMinTerminal) && is_decision(kind_[v]) &&
          (is_terminal(kind_[a]) || is_terminal(kind_[b]))) {
          // Max takes terminal-1 whenever offered; terminal-0 is never better
          // than the sibling. Mirrored for min.
          const NodeId winning = kind_[v] == NodeKind::Max ? t1() : t0();
          NodeId into;
          if (a == winning || b == winning) {
              into = winning;
          } else {
              into = is_terminal(kind_[a]) ? b : a;
              if (into == v) into = t0();  // sibling is a self-loop: value 0
          }
          merge(v, into, "max-min-terminal");
          return true;
      }
      if ((mask & rules::kAverageSelfArc) && kind_[v] == NodeKind::Average && (a == v || b == v) && a != b) {
          merge(v, a == v ? b : a, "average-self-arc");
          return true;
      }
      return false;
  }

  bool collapse_if_terminal_unused()
  {
      const bool t0_unused = parents_[t0()].empty();
      const bool t1_unused = parents_[t1()].empty();
      if (!t0_unused && !t1_unused) return false;
      std::vector<NodeId> live;
      for (NodeId v = 1; v <= n_; ++v) {
          if (alive_[v] && !is_terminal(kind_[v])) live.push_back(v);
      }
      if (live.empty()) return false;
      std::vector<NodeId> ids;
      if (!is_stopping(snapshot(ids))) return false;
      const NodeId into = t0_unused ? t1() : t0();
      const Rational value = t0_unused ? 1 : 0;
      for (NodeId v : live) {
          report_.constant_nodes[v] = value;
          merge(v, into, "terminal-zero-indegree");
      }
      return true;
  }

  void detach_outgoing(NodeId v)
  {
      for (NodeId w : arcs_[v]) {
          auto& ps = parents_[w];
          auto it = std::find(ps.begin(), ps.end(), v);
          if (it != ps.end()) ps.erase(it);
      }
  }

  void merge(NodeId v, NodeId w, const char* rule)
  {
      report_.merges.push_back({v, w, rule, kind_[v], arcs_[v]});
      detach_outgoing(v);
      auto ps = parents_[v];
      std::sort(ps.begin(), ps.end());
      ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
      for (NodeId p : ps) {
          if (p == v) continue;
          for (NodeId& t : arcs_[p]) {
              if (t == v) {
                  t = w;
                  parents_[w].push_back(p);
              }
          }
      }
      parents_[v].clear();
      alive_[v] = 0;
  }

  void remove(NodeId v)
  {
      report_.merges.push_back({v, 0, "zero-indegree", kind_[v], arcs_[v]});
      report_.removed_zero_indegree.push_back(v);
      detach_outgoing(v);
      alive_[v] = 0;
  }

  static bool is_degenerate_half(const Game& g)
  {
      if (g.size() <= 2) return false;
      std::vector<NodeId> to0, to1;
      for (NodeId v = 1; v <= g.size() - 2; ++v) {
          if (g.kind(v) != NodeKind::Average) continue;
          for (NodeId w : g.arcs(v)) {
              if (w == g.terminal0()) to0.push_back(v);
              if (w == g.terminal1()) to1.push_back(v);
          }
      }
      if (to0.empty() || to1.empty()) return false;
      for (NodeId x : to0) {
          for (NodeId y : to1) {
              if (x != y) return false;
          }
      }
      return true;
  }

  int n_;
  std::vector<NodeKind> kind_;
  std::vector<std::vector<NodeId>> arcs_;
  std::vector<char> alive_;
  std::vector<std::vector<NodeId>> parents_;
  ReductionReport report_;
};

void require_stopping(const Game& g, const char* what)
{
    if (!is_stopping(g)) throw PreconditionError(std::string(what) + " requires a stopping game");
}

}  // namespace

std::pair<Game, ReductionReport> apply_trivial_reductions(const Game& g, unsigned rule_mask)
{
    WorkGraph wg(g);
    wg.trivial_pass(rule_mask);
    return wg.finish();
}

std::vector<NodeId> find_terminal_valued(const Game& g, Polarity polarity, std::size_t* parent_examinations)
{
    require_stopping(g, "find_terminal_valued");
    const int n = g.size();
    const auto par = g.parents();
    // For One: mark nodes proven < 1, seeded from terminal-0. Zero mirrors it
    // with the roles of max and min exchanged.
    const NodeId seed = polarity == Polarity::One ? g.terminal0() : g.terminal1();
    const NodeKind greedy = polarity == Polarity::One ? NodeKind::Min : NodeKind::Max;
    const NodeKind reluctant = polarity == Polarity::One ? NodeKind::Max : NodeKind::Min;

    std::vector<char> marked(n + 1, 0);
    marked[seed] = 1;
    std::vector<NodeId> queue{seed};
    std::size_t examined = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const NodeId u = queue[head];
        for (NodeId p : par[u]) {
            ++examined;
            if (marked[p]) continue;
            const NodeKind k = g.kind(p);
            bool mark = k == greedy || k == NodeKind::Average;
            if (k == reluctant) mark = marked[g.arcs(p)[0]] && marked[g.arcs(p)[1]];
            if (mark) {
                marked[p] = 1;
                queue.push_back(p);
            }
        }
    }
    if (parent_examinations) *parent_examinations = examined;

    std::vector<NodeId> out;
    for (NodeId v = 1; v <= n; ++v) {
        if (!marked[v] && v != g.terminal0() && v != g.terminal1()) out.push_back(v);
    }
    out.push_back(polarity == Polarity::One ? g.terminal1() : g.terminal0());
    return out;
}

std::pair<Game, ReductionReport> merge_terminal_valued(const Game& g)
{
    require_stopping(g, "merge_terminal_valued");
    WorkGraph wg(g);
    wg.terminal_valued_pass();
    return wg.finish();
}

std::vector<Component> scc_condense(const Game& g)
{
    const int n = g.size();
    std::vector<int> index(n + 1, -1), low(n + 1, 0), comp_of(n + 1, -1);
    std::vector<char> on_stack(n + 1, 0);
    std::vector<NodeId> stack;
    std::vector<Component> out;
    int counter = 0;

    auto skip = [&](NodeId v) { return is_terminal(g.kind(v)); };

    struct Frame {
      NodeId v;
      std::size_t next;
    };
    std::vector<Frame> dfs;
    for (NodeId root = 1; root <= n; ++root) {
        if (skip(root) || index[root] >= 0) continue;
        dfs.push_back({root, 0});
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!dfs.empty()) {
            Frame& f = dfs.back();
            const auto& arcs = g.arcs(f.v);
            if (f.next < arcs.size()) {
                const NodeId w = arcs[f.next++];
                if (skip(w)) continue;
                if (index[w] < 0) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    dfs.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
                continue;
            }
            const NodeId v = f.v;
            dfs.pop_back();
            if (!dfs.empty()) low[dfs.back().v] = std::min(low[dfs.back().v], low[v]);
            if (low[v] != index[v]) continue;
            Component c;
            NodeId w;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack[w] = 0;
                comp_of[w] = static_cast<int>(out.size());
                c.nodes.push_back(w);
            } while (w != v);
            std::sort(c.nodes.begin(), c.nodes.end());
            out.push_back(std::move(c));
        }
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        for (NodeId v : out[i].nodes) {
            for (NodeId w : g.arcs(v)) {
                if (comp_of[w] != static_cast<int>(i)) out[i].boundary.emplace_back(v, w);
            }
        }
    }
    return out;
}

std::array<bool, 7> AssumptionChecklist::items() const
{
    return {stopping, no_decision_terminal_arcs, no_identical_or_self_arcs, no_zero_indegree,
            terminal_average_pair, no_terminal_valued, scc_or_two_constants};
}

bool AssumptionChecklist::fully_reduced() const
{
    const auto it = items();
    return std::all_of(it.begin(), it.end(), [](bool b) { return b; });
}

AssumptionChecklist check_assumptions(const Game& g)
{
    AssumptionChecklist c;
    const int n = g.size();
    const NodeId t0 = g.terminal0(), t1 = g.terminal1();
    c.stopping = is_stopping(g);

    c.no_decision_terminal_arcs = true;
    c.no_identical_or_self_arcs = true;
    std::vector<NodeId> to0, to1;
    for (NodeId v = 1; v <= n; ++v) {
        if (is_terminal(g.kind(v))) continue;
        const auto& a = g.arcs(v);
        if (is_decision(g.kind(v)) && (is_terminal(g.kind(a[0])) || is_terminal(g.kind(a[1]))))
            c.no_decision_terminal_arcs = false;
        if (a[0] == a[1] || a[0] == v || a[1] == v) c.no_identical_or_self_arcs = false;
        if (g.kind(v) == NodeKind::Average) {
            if (a[0] == t0 || a[1] == t0) to0.push_back(v);
            if (a[0] == t1 || a[1] == t1) to1.push_back(v);
        }
    }
    for (NodeId x : to0) {
        for (NodeId y : to1) {
            if (x != y) c.terminal_average_pair = true;
        }
    }

    const auto indeg = g.in_degrees();
    c.no_zero_indegree = std::none_of(indeg.begin() + 1, indeg.end(), [](int d) { return d == 0; });

    if (c.stopping) {
        c.no_terminal_valued = find_terminal_valued(g, Polarity::One).size() == 1 &&
                               find_terminal_valued(g, Polarity::Zero).size() == 1;
    }

    const auto comps = scc_condense(g);
    c.single_scc = comps.size() == 1;
    // Only the two terminals carry constant values in this representation.
    const int constant_nodes = 2;
    c.scc_or_two_constants = c.single_scc || constant_nodes == 2;
    return c;
}

FullReduction reduce_fully(const Game& g)
{
    WorkGraph wg(g);
    for (;;) {
        bool changed = wg.trivial_pass(rules::kAll);
        std::vector<NodeId> ids;
        if (is_stopping(wg.snapshot(ids))) changed = wg.terminal_valued_pass() || changed;
        if (!changed) break;
    }
    FullReduction out;
    std::tie(out.game, out.report) = wg.finish();
    out.checklist = check_assumptions(out.game);
    return out;
}

ValueVector recover_values(const Game& original, const ReductionReport& report, const ValueVector& reduced)
{
    const int n = original.size();
    ValueVector out;
    out.mode = reduced.mode;
    const bool exact = reduced.mode == Mode::Exact;
    out.approx.assign(n + 1, 0.0);
    if (exact) out.exact.assign(n + 1, 0);
    for (std::size_t i = 0; i < report.survivors.size(); ++i) {
        const NodeId v = report.survivors[i];
        out.approx[v] = reduced.approx[i + 1];
        if (exact) out.exact[v] = reduced.exact[i + 1];
    }
    for (auto it = report.merges.rbegin(); it != report.merges.rend(); ++it) {
        const auto& s = *it;
        if (s.absorbed_into != 0) {
            out.approx[s.removed] = out.approx[s.absorbed_into];
            if (exact) out.exact[s.removed] = out.exact[s.absorbed_into];
            continue;
        }
        const NodeId a = s.arcs[0], b = s.arcs[1];
        switch (s.kind) {
        case NodeKind::Max:
            out.approx[s.removed] = std::max(out.approx[a], out.approx[b]);
            if (exact) out.exact[s.removed] = std::max(out.exact[a], out.exact[b]);
            break;
        case NodeKind::Min:
            out.approx[s.removed] = std::min(out.approx[a], out.approx[b]);
            if (exact) out.exact[s.removed] = std::min(out.exact[a], out.exact[b]);
            break;
        default:
            out.approx[s.removed] = 0.5 * (out.approx[a] + out.approx[b]);
            if (exact) out.exact[s.removed] = (out.exact[a] + out.exact[b]) / 2;
            break;
        }
    }
    return out;
}

std::string report_to_json(const ReductionReport& report)
{
    nlohmann::ordered_json j;
    j["original_size"] = report.original_size;
    auto& merges = j["merges"] = nlohmann::ordered_json::array();
    for (const auto& s : report.merges) {
        nlohmann::ordered_json m;
        m["removed"] = s.removed;
        m["absorbed_into"] = s.absorbed_into;
        m["rule"] = s.rule;
        m["kind"] = std::string(to_string(s.kind));
        m["arcs"] = s.arcs;
        merges.push_back(std::move(m));
    }
    j["removed_zero_indegree"] = report.removed_zero_indegree;
    auto& constants = j["constant_nodes"] = nlohmann::ordered_json::object();
    for (const auto& [v, q] : report.constant_nodes) constants[std::to_string(v)] = to_fraction_string(q);
    j["survivors"] = report.survivors;
    j["degenerate_half"] = report.degenerate_half;
    return j.dump(2) + "\n";
}

}  // namespace ssg
