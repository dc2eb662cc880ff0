#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ssg/game.hpp"
#include "ssg/linear_system.hpp"

namespace ssg {

enum class Mode { Exact, Float };
enum class Player { Max, Min };

inline NodeKind owner_kind(Player p) { return p == Player::Max ? NodeKind::Max : NodeKind::Min; }
inline Player opponent(Player p) { return p == Player::Max ? Player::Min : Player::Max; }

/// One arc choice (0 = first arc, 1 = second arc) per node of `player`.
/// Stored densely by NodeId; entries of other players' nodes are ignored.
struct Strategy {
  Player player = Player::Max;
  std::vector<std::uint8_t> choice;

  Strategy() = default;
  Strategy(const Game& g, Player p) : player(p), choice(g.size() + 1, 0) {}

  int operator[](NodeId v) const { return choice[v]; }
  bool operator==(const Strategy&) const = default;
};

struct StrategyPair {
  Strategy sigma;  // max
  Strategy tau;    // min

  StrategyPair() = default;
  explicit StrategyPair(const Game& g) : sigma(g, Player::Max), tau(g, Player::Min) {}
  StrategyPair(Strategy s, Strategy t) : sigma(std::move(s)), tau(std::move(t)) {}

  const Strategy& of(Player p) const { return p == Player::Max ? sigma : tau; }
  Strategy& of(Player p) { return p == Player::Max ? sigma : tau; }
};

/// Node values indexed by NodeId (slot 0 unused). `approx` is always filled;
/// `exact` only in Mode::Exact.
struct ValueVector {
  Mode mode = Mode::Float;
  std::vector<Rational> exact;
  std::vector<double> approx;

  int size() const { return static_cast<int>(approx.size()) - 1; }
  double operator[](NodeId v) const { return approx[v]; }
};

/// Nodes whose value is pinned, indexed by NodeId. Terminals are always pinned
/// to 0 and 1 and need no entry. Pinned nodes behave like terminals: their
/// arcs are ignored.
using FixedValues = std::vector<std::optional<Rational>>;

/// Throws PreconditionError unless `s` covers exactly the nodes of its player
/// and every chosen arc exists.
void check_strategy(const Game& g, const Strategy& s);

/// Nodes with a path to a terminal (or pinned node) in the strategy subgraph,
/// as a per-node flag. Computed by backward search from the terminals.
std::vector<char> reachable_to_terminal(const Game& g, const StrategyPair& sp, const FixedValues* fixed = nullptr);

/// Values of the strategy subgraph: nodes with no path to a terminal get 0, the
/// rest solve v_i = v_choice(i) for max/min and v_i = (v_j + v_k)/2 for
/// average nodes. Float mode throws std::runtime_error if any equation's
/// residual exceeds 1e-9.
ValueVector evaluate_strategy_pair(const Game& g, const StrategyPair& sp, Mode mode,
                                   const FixedValues* fixed = nullptr);

constexpr double kStabilityTolerance = 1e-9;
constexpr double kSwitchMargin = 1e-12;

/// Whether every max/min/average node satisfies its local equation. Exact
/// vectors are compared exactly (tol ignored).
bool is_stable(const Game& g, const ValueVector& v, double tol = kStabilityTolerance);

/// Same check restricted to the given node kinds.
bool is_satisfied(const Game& g, const ValueVector& v, NodeKind kind, double tol = kStabilityTolerance);

/// Nodes of `s.player` whose other arc leads to a strictly better value
/// (greater for max, smaller for min). Float mode requires the gain to exceed
/// `margin`.
std::vector<NodeId> switchable_set(const Game& g, const ValueVector& v, const Strategy& s,
                                   double margin = kSwitchMargin);

struct Response {
  Strategy strategy;
  ValueVector values;
  int rounds = 0;  // evaluations performed
};

/// Optimal response of the opponent of `fixed.player`, by policy iteration that
/// switches every improving node each round and keeps the current arc on ties.
/// `start` seeds the responder's strategy (default: all first arcs).
/// Requires a stopping game (PreconditionError otherwise).
Response best_response(const Game& g, const Strategy& fixed, Mode mode, const Strategy* start = nullptr);

/// Variant used internally when stoppingness is already established.
Response best_response_unchecked(const Game& g, const Strategy& fixed, Mode mode, const Strategy* start = nullptr,
                                 const FixedValues* pinned = nullptr);

}  // namespace ssg
