#pragma once

// Exact small-case oracles: classical Ramsey arrows by exhaustive coloring
// search, and the online game value by budgeted AND-OR search.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vor/core.hpp"
#include "vor/engine.hpp"

namespace vor {

struct SearchCaps {
  std::int64_t max_nodes = 200'000'000;
  bool mandatory_edge_rule = true;
  /// Online search: largest budget tried before giving up (0 = automatic).
  int max_budget = 0;
  /// Online search without the mandatory rule: vertex limit (0 = automatic).
  int max_vertices = 0;
};

using Coloring = std::vector<std::pair<Edge, Color>>;

/// Colored hypergraph on vertices 1..n holding `coloring`.
ColoredHypergraph to_hypergraph(const GameParams& params, int n, const Coloring& coloring);

struct ArrowsResult {
  enum class Outcome { kArrows, kEscapes, kInconclusive };
  Outcome outcome = Outcome::kInconclusive;
  /// kEscapes: a complete coloring of K_n^{(k)} without a monochromatic target.
  std::optional<Coloring> counterexample;
  std::int64_t nodes = 0;
};

struct ArrowsOptions {
  SearchCaps caps;
  /// Restrict to colorings whose star at {1..k-1} is non-decreasing and whose
  /// first edge takes the lowest color of its target class.
  bool symmetry_pruning = true;
  /// OpenMP fan-out over search prefixes.
  bool parallel = false;
};

/// Does every q-coloring of K_n^{(k)} contain a monochromatic K_{t_c}^{(k)}?
ArrowsResult classical_arrows(const GameParams& params, int n, const ArrowsOptions& opt = {});

struct SolveResult {
  std::string mode;  // "classical" | "online"
  GameParams params;
  std::optional<std::int64_t> value;  // empty: inconclusive
  std::int64_t lower = 0;
  std::optional<std::int64_t> upper;
  nlohmann::ordered_json certificate;
  std::int64_t nodes = 0;

  bool exact() const { return value.has_value(); }
  nlohmann::ordered_json to_json() const;
};

/// Least n such that K_n^{(k)} arrows the targets; certificate is an escaping
/// coloring of K_{n-1}^{(k)}. caps.max_nodes bounds the whole scan over n.
SolveResult classical_ramsey_number(const GameParams& params, const ArrowsOptions& opt = {});

/// Budgeted AND-OR search for the online game. Keeps its transposition table
/// across queries, so one instance can answer many positions of one game.
class OnlineSolver {
 public:
  OnlineSolver(GameParams params, SearchCaps caps = {}, bool force_generic = false);
  ~OnlineSolver();
  OnlineSolver(const OnlineSolver&) = delete;
  OnlineSolver& operator=(const OnlineSolver&) = delete;

  const GameParams& params() const;
  bool uses_fast_path() const;

  /// Can builder force a win within `budget` more edges from a position with
  /// g.revealed() vertices, the last one being the current round's vertex?
  /// Empty when the node cap is hit.
  std::optional<bool> can_force(const ColoredHypergraph& g, bool built_this_round, int budget);

  /// Color maximizing the game value after `edge` is painted, ties to the
  /// lowest color. Empty when the node cap is hit.
  std::optional<Color> best_reply(const ColoredHypergraph& g, const Edge& edge);

  /// Game value from the empty board, with a principal line as certificate.
  SolveResult solve();

  std::int64_t nodes() const;
  /// Resets the node counter (the table is kept).
  void reset_nodes();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

inline SolveResult online_value(const GameParams& params, const SearchCaps& caps = {}) {
  return OnlineSolver(params, caps).solve();
}

}  // namespace vor
