#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ssg/game.hpp"

namespace ssg {

enum class Variant { Basic, Modified };

struct GenParams {
  int n = 0;  // must equal a + b + c + 2
  int a = 0;  // average nodes
  int b = 0;  // min nodes
  int c = 0;  // max nodes
  std::uint64_t seed = 0;
  Variant variant = Variant::Basic;

  static GenParams make(int a, int b, int c, std::uint64_t seed, Variant variant)
  {
      return {a + b + c + 2, a, b, c, seed, variant};
  }
};

/// Throws std::invalid_argument when the counts are inconsistent or too small
/// for the variant (Basic: a,b,c >= 1; Modified: a >= 2, b,c >= 1).
void validate(const GenParams& p);

/// Benchmark cell: a target size and an average-to-max ratio ratio_num:4.
struct RatioSpec {
  int size = 0;
  int ratio_num = 0;  // 1..8
};

struct NodeCounts {
  int a = 0, b = 0, c = 0;
  int total() const { return a + b + c + 2; }
};

/// c = b = round(4(size-2)/(ratio_num+8)), a = round(ratio_num*c/4) (at least
/// 2); halves round up. The total may differ slightly from `size`.
NodeCounts ratio_counts(const RatioSpec& r);

/// Basic stopping-game generator. Draw order: shuffle of the free labels,
/// first arcs for nodes 1..n-2 ascending, average second arcs, then max/min
/// second arcs restricted to valid non-terminal targets.
Game generate_basic(const GenParams& p);

/// Targets q such that adding arc (m, q) keeps the partial game free of bad
/// subgraphs, excluding m, m's existing target, and both terminals.
/// `m` must be a max or min node with exactly one arc.
std::vector<NodeId> find_valid_arcs(const PartialGame& g, NodeId m);

/// Basic generator stopped after `decision_arcs` max/min second arcs have been
/// placed. Exposed for testing find_valid_arcs on realistic partial games.
PartialGame generate_basic_partial(const GenParams& p, int decision_arcs);

/// Modified generator: fixes the terminal-adjacent average pair, keeps max/min
/// arcs off the terminals, steers second arcs toward in-degree-zero nodes and
/// finally merges 1- and 0-valued nodes into the terminals.
Game generate_reduced(const GenParams& p);

struct GeneratedInstance {
  Game game;
  GenParams params;      // parameters of the accepted attempt
  std::uint64_t seed = 0;  // seed handed to generate_fully_reduced
  int retries = 0;       // rejected attempts before this one
};

constexpr int kDefaultRetryCap = 10000;

/// Runs generate_reduced with derived sub-seeds until an instance keeps its
/// requested counts and passes every assumption check, including the
/// single-SCC form. Throws std::runtime_error after `retry_cap` attempts.
GeneratedInstance generate_fully_reduced(const RatioSpec& r, std::uint64_t seed, int retry_cap = kDefaultRetryCap);

/// Sidecar metadata: {"seed", "variant", "a", "b", "c", "retries", ...}.
std::string metadata_json(const GeneratedInstance& inst, const RatioSpec& r);

}  // namespace ssg
