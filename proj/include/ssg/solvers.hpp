#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ssg/evaluator.hpp"
#include "ssg/game.hpp"

namespace ssg {

struct SolveResult {
  ValueVector values;
  StrategyPair strategies;
  int iterations = 0;
  std::string algorithm;  // "hk", "perm", "bf", "vi"
  std::uint64_t seed = 0;
  std::vector<NodeId> permutation;  // final average-node order (perm only)
  std::vector<ValueVector> trace;   // per-iteration values (hk, when requested)
};

struct SolveOptions {
  bool record_trace = false;
  int iteration_cap = 0;  // 0: 10n + 10
  bool perm_induced_min = false;  // perm: min plays its induced strategy, not a best response
};

/// Strategy improvement for max: a uniformly random initial max strategy,
/// then per iteration an exact min best response followed by switching every
/// switchable max node. Stops when no max node is switchable.
SolveResult solve_hoffman_karp(const Game& g, std::uint64_t seed, Mode mode, const SolveOptions& opt = {});

/// Strategies induced by reading `order` (average ids, ascending value) as
/// the outcome ranking of a deterministic game: terminal-0 lowest, terminal-1
/// highest. Max heads for the highest-ranked reachable sink, min for the
/// lowest; ties keep the first arc. Requires an acyclic max/min subgraph.
StrategyPair permutation_strategies(const Game& g, const std::vector<NodeId>& order);

/// Permutation improvement over orderings of the average nodes. The random
/// starting order is evaluated with max on its induced strategy and min on a
/// best response (warm-started at min's induced strategy). Each iteration then
/// stable-sorts the averages by the latest values and re-evaluates, until the
/// order agrees with the values and neither player can switch. `iterations`
/// counts these updates, so it is at least 1.
SolveResult solve_permutation_improvement(const Game& g, std::uint64_t seed, Mode mode, const SolveOptions& opt = {});

constexpr int kBruteForceCap = 12;

/// Exhaustive search over all strategy pairs of the unpinned max/min nodes,
/// in exact arithmetic. Returns the first pair whose values satisfy every
/// local equation of an unpinned node. Throws PreconditionError above `cap`
/// decision nodes.
SolveResult solve_brute_force(const Game& g, int cap = kBruteForceCap, const FixedValues* fixed = nullptr);

/// Jacobi iteration of the local max/min/average operator from the all-zero
/// vector until the largest change drops below `tol`. Throws
/// std::runtime_error after `max_sweeps`.
ValueVector solve_value_iteration(const Game& g, double tol, long max_sweeps = 10'000'000, int* sweeps = nullptr);

/// Value iteration wrapped as a SolveResult; strategies read off the values.
SolveResult solve_value_iteration_result(const Game& g, double tol);

/// Solves each strongly connected component separately, sinks first, with the
/// values of already solved components substituted at the boundary. Each
/// component is solved by brute force (cap per component).
ValueVector solve_by_components(const Game& g, int cap = kBruteForceCap);

/// Dispatch by tag: "hk", "perm", "bf" (exact regardless of mode), "vi"
/// (tolerance 1e-12). Throws std::invalid_argument on an unknown tag.
SolveResult solve_with(const std::string& algorithm, const Game& g, std::uint64_t seed, Mode mode);

/// {"algorithm", "seed", "iterations", "mode", "values", "sigma", "tau"[, "permutation"]}.
/// Exact values are fraction strings, float values decimals.
std::string result_to_json(const Game& g, const SolveResult& r);

}  // namespace ssg
