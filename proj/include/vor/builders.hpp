#pragma once

// Builder strategies: the complete-clique builder, the 2-uniform color-tree
// walk, and the recursive stepping-down builder that plays a (k-1)-uniform
// strategy as a subroutine on label-matched vertex sets.

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "vor/core.hpp"
#include "vor/strategy.hpp"

namespace vor {

/// Builds every edge of K_n^{(k)} round by round, then concedes.
class CliqueBuilder final : public BuilderStrategy {
 public:
  CliqueBuilder(GameParams params, int n);

  std::string name() const override { return "clique:" + std::to_string(n_); }
  const GameParams& params() const override { return params_; }
  Budget budget() const override;
  void on_reveal(VertexId vertex) override;
  BuilderAction next_action() override;
  void on_color(const Edge&, Color) override {}
  std::unique_ptr<BuilderStrategy> fresh() const override;

 private:
  GameParams params_;
  int n_;
  VertexId current_ = 0;
  std::vector<Edge> pending_;
  std::size_t next_ = 0;
};

/// q-ary color tree for uniformity 2. Each new vertex walks down from the
/// root, building an edge to every node it passes and following the child of
/// the painted color. A node's path holds, per color c, at most t_c - 2 turns
/// into c; the walker whose c-turns reach t_c - 1 closes a K_{t_c} in color c
/// with the ancestors where it turned into c.
class TreeBuilder final : public BuilderStrategy {
 public:
  explicit TreeBuilder(GameParams params);

  std::string name() const override { return "tree"; }
  const GameParams& params() const override { return params_; }
  Budget budget() const override;
  void on_reveal(VertexId vertex) override;
  BuilderAction next_action() override;
  void on_color(const Edge& edge, Color color) override;
  std::optional<MonoClique> declared_win() const override { return win_; }
  std::unique_ptr<BuilderStrategy> fresh() const override;

  struct Node {
    VertexId vertex = 0;
    std::vector<int> turns;  // per color, along the root path
    std::vector<int> child;  // per color, -1 if empty
    int depth = 0;
  };
  const std::vector<Node>& nodes() const { return nodes_; }

 private:
  GameParams params_;
  std::vector<Node> nodes_;
  VertexId walker_ = 0;
  int cursor_ = -1;  // node the walker is at; -1 once placed
  std::vector<std::pair<VertexId, Color>> walk_;
  std::optional<MonoClique> win_;
};

class SubStrategyNondeterminism : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bookkeeping exported by the recursive builder: per-vertex labels (color
/// strings, one digit per color) and the vertex sets its auxiliary games
/// were played on.
struct LabelledState {
  int uniformity = 0;
  int colors = 0;
  TowerExpr sub_budget;                       // m
  std::vector<std::string> labels;            // index v - 1
  std::vector<std::vector<VertexId>> r_sets;  // index v - 1, insertion order
  std::optional<MonoClique> declared_win;

  nlohmann::ordered_json to_json() const;
  static LabelledState from_json(const nlohmann::ordered_json& j);
  bool operator==(const LabelledState&) const = default;
};

/// Stepping-down builder for k >= 3 over a deterministic (k-1)-uniform
/// strategy for targets t_c - 1 with edge budget m. Guarantees q^m + k - 2
/// vertices and m q^m edges.
class RecursiveBuilder final : public BuilderStrategy {
 public:
  RecursiveBuilder(GameParams params, std::unique_ptr<BuilderStrategy> sub);

  std::string name() const override { return "recursive"; }
  const GameParams& params() const override { return params_; }
  Budget budget() const override;
  void on_reveal(VertexId vertex) override;
  BuilderAction next_action() override;
  void on_color(const Edge& edge, Color color) override;
  std::optional<MonoClique> declared_win() const override { return win_; }
  std::unique_ptr<BuilderStrategy> fresh() const override;

  const BuilderStrategy& sub_prototype() const { return *proto_; }
  /// Labels and R-sets so far; an unfinished round contributes its partial
  /// label and the sub-game vertices revealed so far.
  LabelledState export_state() const;

 private:
  enum class Phase { kIdle, kSubRound, kDone };

  void begin_sub_round();
  void finish_round();

  GameParams params_;
  GameParams sub_params_;
  std::unique_ptr<BuilderStrategy> proto_;

  std::vector<std::string> labels_;            // index v - 1
  std::vector<std::vector<VertexId>> r_sets_;  // index v - 1
  std::unordered_map<std::string, std::vector<VertexId>> by_label_;

  // active round j
  VertexId current_ = 0;
  Phase phase_ = Phase::kIdle;
  std::string partial_;
  std::vector<VertexId> r_partial_;
  std::vector<bool> in_r_;
  std::vector<VertexId> sub_to_real_;  // sub-game vertex s maps to sub_to_real_[s - 1]
  std::unique_ptr<BuilderStrategy> sub_;
  std::optional<ColoredHypergraph> aux_;
  Edge pending_sub_edge_;
  std::optional<MonoClique> win_;
};

/// "clique:n", "tree", or "recursive" (composes recursive builders down to the
/// tree at uniformity 2).
std::unique_ptr<BuilderStrategy> make_builder(const std::string& spec, const GameParams& params);

}  // namespace vor
