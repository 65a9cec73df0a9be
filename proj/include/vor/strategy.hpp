#pragma once

// Player contracts shared by the engine, the builder strategies and the
// painter pool.

#include <memory>
#include <optional>
#include <string>
#include <variant>

#include "vor/bounds.hpp"
#include "vor/core.hpp"

namespace vor {

struct BuildEdge {
  Edge edge;
};
struct EndRound {};
/// The strategy has nothing left to try; the engine aborts the match.
struct Concede {};

using BuilderAction = std::variant<BuildEdge, EndRound, Concede>;

/// Vertices and edges a strategy guarantees to win within, against any painter.
struct Budget {
  TowerExpr vertices;
  TowerExpr edges;
};

/// Deterministic builder: the sequence of actions is a function of the
/// reveals and colors it has been shown. Instances are bound to one game.
class BuilderStrategy {
 public:
  virtual ~BuilderStrategy() = default;

  virtual std::string name() const = 0;
  virtual const GameParams& params() const = 0;
  virtual Budget budget() const = 0;

  /// Round `vertex` begins.
  virtual void on_reveal(VertexId vertex) = 0;
  virtual BuilderAction next_action() = 0;
  /// Painter's answer for the edge returned by the last next_action().
  virtual void on_color(const Edge& edge, Color color) = 0;

  /// A clique the strategy itself claims is complete, if any.
  virtual std::optional<MonoClique> declared_win() const { return std::nullopt; }

  /// A new instance with the same configuration and empty history.
  virtual std::unique_ptr<BuilderStrategy> fresh() const = 0;
};

/// Painter: colors each built edge immediately; deterministic given its seed.
class PainterStrategy {
 public:
  virtual ~PainterStrategy() = default;
  virtual std::string name() const = 0;
  /// `g` is the coloring before `edge` is added.
  virtual Color paint(const Edge& edge, const ColoredHypergraph& g) = 0;
};

}  // namespace vor
