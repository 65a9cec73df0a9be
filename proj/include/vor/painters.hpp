#pragma once

// Painter pool: constant, seeded random, greedy threat-minimizing, and the
// search-backed minimax painter.

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>

#include "vor/engine.hpp"
#include "vor/solver.hpp"
#include "vor/strategy.hpp"

namespace vor {

class ConstantPainter final : public PainterStrategy {
 public:
  ConstantPainter(const GameParams& params, Color c);
  std::string name() const override { return "constant:" + std::to_string(c_); }
  Color paint(const Edge&, const ColoredHypergraph&) override { return c_; }

 private:
  Color c_;
};

/// Uniform colors from mt19937_64 keyed by the seed. A raw 64-bit draw r is
/// accepted when r < 2^64 - (2^64 mod q) and mapped to 1 + r mod q, so the
/// color stream depends only on the seed and q.
class RandomPainter final : public PainterStrategy {
 public:
  RandomPainter(const GameParams& params, std::uint64_t seed);
  std::string name() const override { return "random:" + std::to_string(seed_); }
  Color paint(const Edge&, const ColoredHypergraph&) override;

 private:
  std::uint64_t seed_;
  int q_;
  std::mt19937_64 rng_;
};

/// Picks the color c minimizing (largest c-clique through the edge) / t_c,
/// ties to the lowest color.
class GreedyPainter final : public PainterStrategy {
 public:
  explicit GreedyPainter(const GameParams& params) : params_(params) {}
  std::string name() const override { return "greedy"; }
  Color paint(const Edge& edge, const ColoredHypergraph& g) override;

 private:
  GameParams params_;
};

/// Answers with the color that makes the match longest. When the opponent
/// builder is known (it is deterministic, so the whole match tree can be
/// replayed) the painter maximizes the edge count of this very match; a
/// builder that concedes counts as unbounded. Without an opponent it
/// maximizes the online game value against an optimal builder. Either way it
/// falls back to greedy, with a warning on stderr, when a query exceeds the
/// node cap.
class MinimaxPainter final : public PainterStrategy {
 public:
  MinimaxPainter(const GameParams& params, SearchCaps caps = default_caps(),
                 const BuilderStrategy* opponent = nullptr);
  ~MinimaxPainter() override;
  std::string name() const override { return "minimax"; }
  Color paint(const Edge& edge, const ColoredHypergraph& g) override;

  int fallbacks() const { return fallbacks_; }
  bool knows_opponent() const { return opponent_ != nullptr; }
  static SearchCaps default_caps();

  /// Longest match (in edges) the opponent can be held to from the empty
  /// board; empty without an opponent or past the cap.
  std::optional<std::int64_t> worst_case();

 private:
  struct Tree;
  std::optional<Color> reply_vs_opponent(const Edge& edge, const ColoredHypergraph& g);

  GameParams params_;
  SearchCaps caps_;
  std::unique_ptr<OnlineSolver> solver_;
  std::unique_ptr<BuilderStrategy> opponent_;
  std::unique_ptr<Tree> tree_;
  GreedyPainter greedy_;
  int fallbacks_ = 0;
};

/// "constant:c", "random:seed", "greedy", "minimax" or "replay:file".
/// `opponent`, when given, is the builder of the match (used by minimax).
std::unique_ptr<PainterStrategy> make_painter(const std::string& spec, const GameParams& params,
                                              const BuilderStrategy* opponent = nullptr);

}  // namespace vor
