#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ssg/evaluator.hpp"
#include "ssg/game.hpp"

namespace ssg {

/// Bit flags selecting which of the constant-time reductions to apply.
namespace rules {
constexpr unsigned kMaxMinTerminal = 1u << 0;       // max/min node with an arc to a terminal
constexpr unsigned kIdenticalArcs = 1u << 1;        // both arcs to the same node
constexpr unsigned kAverageSelfArc = 1u << 2;       // average node with a self-arc
constexpr unsigned kZeroInDegree = 1u << 3;         // non-terminal nobody points to
constexpr unsigned kTerminalZeroInDegree = 1u << 4; // a terminal nobody points to
constexpr unsigned kAll = 0x1f;
}  // namespace rules

/// One removal. `absorbed_into` is 0 when the node was deleted outright (its
/// value is then recovered from `arcs` through its local equation).
struct ReductionStep {
  NodeId removed = 0;
  NodeId absorbed_into = 0;
  std::string rule;
  NodeKind kind = NodeKind::Average;
  std::vector<NodeId> arcs;  // the node's arcs at removal time
};

/// All ids are ids of the game the reduction started from.
struct ReductionReport {
  int original_size = 0;
  std::vector<ReductionStep> merges;
  std::vector<NodeId> removed_zero_indegree;
  std::map<NodeId, Rational> constant_nodes;
  std::vector<NodeId> survivors;  // original id of reduced node i+1
  bool degenerate_half = false;   // one average node touches both terminals; every value is 1/2

  bool identity() const { return merges.empty(); }
};

std::string report_to_json(const ReductionReport& report);

/// Applies the selected constant-time reductions until none applies, then
/// renumbers the survivors stably (terminals stay last). The terminal rule
/// fires only on stopping games.
std::pair<Game, ReductionReport> apply_trivial_reductions(const Game& g, unsigned rule_mask = rules::kAll);

enum class Polarity { One, Zero };

/// Nodes whose value is exactly 1 (One) or exactly 0 (Zero), including the
/// matching terminal, in linear time. If `parent_examinations` is given it
/// receives the number of parent visits made. Requires a stopping game.
std::vector<NodeId> find_terminal_valued(const Game& g, Polarity polarity, std::size_t* parent_examinations = nullptr);

/// Merges every 1-valued node into terminal-1 and every 0-valued node into
/// terminal-0. Requires a stopping game.
std::pair<Game, ReductionReport> merge_terminal_valued(const Game& g);

struct Component {
  std::vector<NodeId> nodes;                          // ascending
  std::vector<std::pair<NodeId, NodeId>> boundary;    // arcs leaving the component
};

/// Strongly connected components of the non-terminal nodes, ordered so that
/// every component's arcs lead only to terminals or to earlier components.
std::vector<Component> scc_condense(const Game& g);

struct AssumptionChecklist {
  bool stopping = false;
  bool no_decision_terminal_arcs = false;
  bool no_identical_or_self_arcs = false;
  bool no_zero_indegree = false;
  bool terminal_average_pair = false;
  bool no_terminal_valued = false;
  bool scc_or_two_constants = false;
  /// Not one of the seven items: whether the non-terminal nodes form exactly
  /// one SCC (required of benchmark instances).
  bool single_scc = false;

  std::array<bool, 7> items() const;
  bool fully_reduced() const;
  bool benchmark_ready() const { return fully_reduced() && single_scc; }
};

AssumptionChecklist check_assumptions(const Game& g);

struct FullReduction {
  Game game;
  ReductionReport report;
  AssumptionChecklist checklist;
};

/// Trivial reductions and terminal-valued merges, alternated until neither
/// changes the game, followed by the assumption check.
FullReduction reduce_fully(const Game& g);

/// Expands values of the reduced game back onto the original node ids using
/// the report (merged nodes take their absorber's value, deleted nodes are
/// re-evaluated from their arcs).
ValueVector recover_values(const Game& original, const ReductionReport& report, const ValueVector& reduced);

}  // namespace ssg
