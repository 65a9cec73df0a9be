#pragma once

// Hypergraph primitives for the vertex online Ramsey game: game parameters,
// canonical k-edges, partial colorings and monochromatic clique detection.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace vor {

/// Colors are 1-based, matching the [q] = {1, ..., q} convention.
using Color = int;

/// Vertex indices are 1-based positions in the revelation order.
using VertexId = int;

inline constexpr int kMaxUniformity = 8;

class InvalidParams : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidEdge : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct GameParams {
  int uniformity = 2;
  std::vector<int> targets;

  int colors() const { return static_cast<int>(targets.size()); }
  int target(Color c) const { return targets.at(static_cast<std::size_t>(c - 1)); }

  /// Throws InvalidParams unless 2 <= k <= kMaxUniformity, q >= 1 and every
  /// target is at least k.
  void validate() const;

  /// Targets each reduced by one at uniformity k-1: the parameters of the
  /// auxiliary game a stepping-down strategy plays.
  GameParams stepped_down() const;

  bool operator==(const GameParams&) const = default;
};

/// A k-subset of vertices in canonical (strictly increasing) order.
class Edge {
 public:
  Edge() = default;

  int size() const { return size_; }
  VertexId operator[](int i) const { return v_[static_cast<std::size_t>(i)]; }
  VertexId max_vertex() const { return v_[static_cast<std::size_t>(size_ - 1)]; }
  bool contains(VertexId v) const;

  std::span<const VertexId> vertices() const {
    return {v_.data(), static_cast<std::size_t>(size_)};
  }
  std::vector<VertexId> to_vector() const {
    return {v_.begin(), v_.begin() + size_};
  }

  /// Edge with one vertex removed / added (result re-sorted).
  Edge without(VertexId v) const;
  Edge with(VertexId v) const;

  friend bool operator==(const Edge& a, const Edge& b) {
    return a.size_ == b.size_ && a.v_ == b.v_;
  }
  friend auto operator<=>(const Edge& a, const Edge& b) {
    return std::lexicographical_compare_three_way(
        a.v_.begin(), a.v_.begin() + a.size_, b.v_.begin(), b.v_.begin() + b.size_);
  }

  std::string to_string() const;

 private:
  friend Edge make_edge(std::span<const int> indices, int k);
  friend Edge make_edge_unchecked(std::span<const int> sorted);

  std::array<VertexId, kMaxUniformity> v_{};
  int size_ = 0;
};

/// Canonical edge from k distinct positive indices in any order.
Edge make_edge(std::span<const int> indices, int k);
inline Edge make_edge(std::initializer_list<int> indices, int k) {
  return make_edge(std::span<const int>(indices.begin(), indices.size()), k);
}
/// No validation; `sorted` must already be strictly increasing.
Edge make_edge_unchecked(std::span<const int> sorted);

struct EdgeHash {
  std::size_t operator()(const Edge& e) const noexcept;
};

struct MonoClique {
  Color color = 0;
  std::vector<VertexId> vertices;  // ascending
  bool operator==(const MonoClique&) const = default;
};

/// Partial q-coloring of the complete k-uniform hypergraph on the revealed
/// vertices. Edges are kept in insertion order; lookups go through a hash
/// index, and a (k-1)-subset index supports clique extension.
class ColoredHypergraph {
 public:
  explicit ColoredHypergraph(GameParams params);

  const GameParams& params() const { return params_; }
  int uniformity() const { return params_.uniformity; }
  int revealed() const { return revealed_; }
  std::size_t edge_count() const { return order_.size(); }

  /// Edges with their colors in insertion order.
  const std::vector<std::pair<Edge, Color>>& edges() const { return order_; }

  void set_revealed(int n);
  void reveal() { ++revealed_; }

  std::optional<Color> color_of(const Edge& e) const;
  bool has_edge(const Edge& e) const { return index_.contains(e); }

  /// Throws InvalidEdge on duplicates, out-of-range colors, or vertices
  /// beyond `revealed()`.
  void add(const Edge& e, Color c);

  /// Vertices w that complete `face` (a (k-1)-set) to an edge of color c.
  std::span<const VertexId> completions(const Edge& face, Color c) const;

 private:
  GameParams params_;
  int revealed_ = 0;
  std::vector<std::pair<Edge, Color>> order_;
  std::unordered_map<Edge, Color, EdgeHash> index_;
  // face -> per-color list of completing vertices
  std::unordered_map<Edge, std::vector<std::vector<VertexId>>, EdgeHash> faces_;
};

/// Searches for a monochromatic K_{t_c}^{(k)}. With `newest`, only cliques
/// containing that edge are considered (incremental mode); otherwise every
/// stored edge is tried as a seed (full mode).
std::optional<MonoClique> find_mono_clique(const ColoredHypergraph& g,
                                           const std::optional<Edge>& newest = std::nullopt);

/// Size of the largest clique of color c containing `seed`, assuming `seed`
/// itself had color c, capped at `cap`. `seed` may be absent from g.
int largest_clique_through(const ColoredHypergraph& g, const Edge& seed, Color c, int cap);

/// True iff every k-subset of `vertices` is an edge of g with color c.
bool is_mono_clique(const ColoredHypergraph& g, std::span<const VertexId> vertices, Color c);

/// Calls `fn` on every r-subset of `items` (ascending positions). Stops early
/// when `fn` returns false; returns false in that case.
bool for_each_subset(std::span<const VertexId> items, int r,
                     const std::function<bool(std::span<const VertexId>)>& fn);

}  // namespace vor
