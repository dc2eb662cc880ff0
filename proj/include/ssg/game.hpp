#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ssg {

/// Node ids are 1-based everywhere in the public API. Per-node arrays returned
/// by this library are sized n+1 and leave slot 0 unused so they can be
/// indexed directly by NodeId.
using NodeId = std::int32_t;

enum class NodeKind : std::uint8_t { Max, Min, Average, Terminal0, Terminal1 };

std::string_view to_string(NodeKind kind);

inline bool is_terminal(NodeKind k) { return k == NodeKind::Terminal0 || k == NodeKind::Terminal1; }
inline bool is_decision(NodeKind k) { return k == NodeKind::Max || k == NodeKind::Min; }

/// Thrown when an operation's documented precondition does not hold.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct Node {
  NodeKind kind = NodeKind::Average;
  std::vector<NodeId> arcs;  // ordered: arcs[0] is the first out-arc

  bool operator==(const Node&) const = default;
};

/// A simple stochastic game graph. Terminal-0 is node n-1 and terminal-1 is
/// node n. The container does not enforce the structural rules: use
/// validate_structure() for that. During generation the same type holds a
/// partial game in which non-terminal nodes carry 0, 1 or 2 arcs.
class Game {
 public:
  Game() = default;
  explicit Game(std::vector<Node> nodes) : nodes_(std::move(nodes)) {}

  int size() const { return static_cast<int>(nodes_.size()); }
  NodeId terminal0() const { return size() - 1; }
  NodeId terminal1() const { return size(); }

  NodeKind kind(NodeId v) const { return nodes_[v - 1].kind; }
  const std::vector<NodeId>& arcs(NodeId v) const { return nodes_[v - 1].arcs; }
  int out_degree(NodeId v) const { return static_cast<int>(nodes_[v - 1].arcs.size()); }
  const Node& node(NodeId v) const { return nodes_[v - 1]; }
  const std::vector<Node>& nodes() const { return nodes_; }

  void add_arc(NodeId from, NodeId to) { nodes_[from - 1].arcs.push_back(to); }

  /// Ids of all nodes of the given kind, ascending.
  std::vector<NodeId> nodes_of(NodeKind k) const;
  int count(NodeKind k) const;

  /// Parent lists indexed by NodeId. A node whose two arcs share a target
  /// appears twice in that target's list.
  std::vector<std::vector<NodeId>> parents() const;
  std::vector<int> in_degrees() const;

  bool operator==(const Game&) const = default;

 private:
  std::vector<Node> nodes_;
};

/// Intermediate state of the generators; same storage as Game.
using PartialGame = Game;

/// Every violated structural rule, as a human-readable line. Empty iff `g` is
/// a well-formed SSG. Duplicate arcs are legal.
std::vector<std::string> validate_structure(const Game& g);

/// Maximal terminal-free node set in which every average member keeps both
/// arcs inside and every max/min member keeps at least one arc inside.
struct BadCore {
  std::vector<NodeId> members;  // ascending

  bool empty() const { return members.empty(); }
};

/// Greatest fixpoint of the bad-subgraph closure rules. Works on partial games:
/// missing arcs count as leaving every candidate set. Empty iff the game is a
/// stopping game.
BadCore find_bad_core(const Game& g);

bool is_stopping(const Game& g);

/// Subgame induced by `members` (ascending), renumbered 1..k, with two fresh
/// terminals appended. Arcs leaving the set are redirected to terminal-0.
Game induced_subgame(const Game& g, const std::vector<NodeId>& members);

}  // namespace ssg
