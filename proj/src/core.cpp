#include "vor/core.hpp"

#include <algorithm>
#include <sstream>

namespace vor {

void GameParams::validate() const {
  if (uniformity < 2 || uniformity > kMaxUniformity) {
    throw InvalidParams("uniformity must be in [2, " + std::to_string(kMaxUniformity) +
                        "], got " + std::to_string(uniformity));
  }
  if (targets.empty()) throw InvalidParams("at least one color is required");
  for (std::size_t c = 0; c < targets.size(); ++c) {
    if (targets[c] < uniformity) {
      throw InvalidParams("target for color " + std::to_string(c + 1) + " is " +
                          std::to_string(targets[c]) + ", below uniformity " +
                          std::to_string(uniformity));
    }
  }
}

GameParams GameParams::stepped_down() const {
  GameParams sub{uniformity - 1, targets};
  for (int& t : sub.targets) --t;
  return sub;
}

bool Edge::contains(VertexId v) const {
  return std::binary_search(v_.begin(), v_.begin() + size_, v);
}

Edge Edge::without(VertexId v) const {
  Edge out;
  for (int i = 0; i < size_; ++i) {
    if (v_[static_cast<std::size_t>(i)] != v) out.v_[static_cast<std::size_t>(out.size_++)] = v_[static_cast<std::size_t>(i)];
  }
  return out;
}

Edge Edge::with(VertexId v) const {
  Edge out;
  int i = 0;
  while (i < size_ && v_[static_cast<std::size_t>(i)] < v) {
    out.v_[static_cast<std::size_t>(out.size_++)] = v_[static_cast<std::size_t>(i++)];
  }
  out.v_[static_cast<std::size_t>(out.size_++)] = v;
  while (i < size_) out.v_[static_cast<std::size_t>(out.size_++)] = v_[static_cast<std::size_t>(i++)];
  return out;
}

std::string Edge::to_string() const {
  std::ostringstream os;
  os << '{';
  for (int i = 0; i < size_; ++i) os << (i ? "," : "") << v_[static_cast<std::size_t>(i)];
  os << '}';
  return os.str();
}

Edge make_edge(std::span<const int> indices, int k) {
  if (static_cast<int>(indices.size()) != k) {
    throw InvalidEdge("edge needs exactly " + std::to_string(k) + " vertices, got " +
                      std::to_string(indices.size()));
  }
  if (k < 1 || k > kMaxUniformity) throw InvalidEdge("unsupported edge size " + std::to_string(k));
  std::array<int, kMaxUniformity> tmp{};
  std::copy(indices.begin(), indices.end(), tmp.begin());
  std::sort(tmp.begin(), tmp.begin() + k);
  for (int i = 0; i < k; ++i) {
    if (tmp[static_cast<std::size_t>(i)] <= 0) {
      throw InvalidEdge("vertex indices are positive, got " + std::to_string(tmp[static_cast<std::size_t>(i)]));
    }
    if (i > 0 && tmp[static_cast<std::size_t>(i)] == tmp[static_cast<std::size_t>(i - 1)]) {
      throw InvalidEdge("duplicate vertex " + std::to_string(tmp[static_cast<std::size_t>(i)]) + " in edge");
    }
  }
  Edge e;
  e.v_ = tmp;
  e.size_ = k;
  return e;
}

Edge make_edge_unchecked(std::span<const int> sorted) {
  Edge e;
  std::copy(sorted.begin(), sorted.end(), e.v_.begin());
  e.size_ = static_cast<int>(sorted.size());
  return e;
}

std::size_t EdgeHash::operator()(const Edge& e) const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(e.size());
  for (VertexId v : e.vertices()) {
    h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

ColoredHypergraph::ColoredHypergraph(GameParams params) : params_(std::move(params)) {}

void ColoredHypergraph::set_revealed(int n) {
  if (n < revealed_) throw std::invalid_argument("revealed count cannot decrease");
  revealed_ = n;
}

std::optional<Color> ColoredHypergraph::color_of(const Edge& e) const {
  auto it = index_.find(e);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void ColoredHypergraph::add(const Edge& e, Color c) {
  if (e.size() != params_.uniformity) throw InvalidEdge("edge " + e.to_string() + " has wrong size");
  if (c < 1 || c > params_.colors()) {
    throw InvalidEdge("color " + std::to_string(c) + " outside [1, " +
                      std::to_string(params_.colors()) + "]");
  }
  if (e.max_vertex() > revealed_) {
    throw InvalidEdge("edge " + e.to_string() + " uses an unrevealed vertex");
  }
  if (!index_.emplace(e, c).second) throw InvalidEdge("duplicate edge " + e.to_string());
  order_.emplace_back(e, c);
  for (VertexId v : e.vertices()) {
    auto& slot = faces_[e.without(v)];
    if (slot.empty()) slot.resize(static_cast<std::size_t>(params_.colors()));
    slot[static_cast<std::size_t>(c - 1)].push_back(v);
  }
}

std::span<const VertexId> ColoredHypergraph::completions(const Edge& face, Color c) const {
  auto it = faces_.find(face);
  if (it == faces_.end()) return {};
  return it->second[static_cast<std::size_t>(c - 1)];
}

bool for_each_subset(std::span<const VertexId> items, int r,
                     const std::function<bool(std::span<const VertexId>)>& fn) {
  const int n = static_cast<int>(items.size());
  if (r < 0 || r > n) return true;
  std::vector<int> pos(static_cast<std::size_t>(r));
  std::vector<VertexId> pick(static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i) pos[static_cast<std::size_t>(i)] = i;
  while (true) {
    for (int i = 0; i < r; ++i) pick[static_cast<std::size_t>(i)] = items[static_cast<std::size_t>(pos[static_cast<std::size_t>(i)])];
    if (!fn(pick)) return false;
    int i = r - 1;
    while (i >= 0 && pos[static_cast<std::size_t>(i)] == n - r + i) --i;
    if (i < 0) return true;
    ++pos[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < r; ++j) pos[static_cast<std::size_t>(j)] = pos[static_cast<std::size_t>(j - 1)] + 1;
  }
}

bool is_mono_clique(const ColoredHypergraph& g, std::span<const VertexId> vertices, Color c) {
  std::vector<VertexId> sorted(vertices.begin(), vertices.end());
  std::sort(sorted.begin(), sorted.end());
  return for_each_subset(sorted, g.uniformity(), [&](std::span<const VertexId> sub) {
    auto col = g.color_of(make_edge_unchecked(sub));
    return col && *col == c;
  });
}

namespace {

// Depth-first extension of a clique `base` (sorted) of color c. Every vertex in
// `cands` already forms c-colored edges with every (k-1)-subset of `base`.
class CliqueSearch {
 public:
  CliqueSearch(const ColoredHypergraph& g, Color c, int goal)
      : g_(g), c_(c), goal_(goal), k_(g.uniformity()) {}

  // Returns true once a clique of size goal_ is found (stored in best_).
  bool extend(std::vector<VertexId>& base, const std::vector<VertexId>& cands) {
    if (static_cast<int>(base.size()) > best_size_) {
      best_size_ = static_cast<int>(base.size());
      best_ = base;
    }
    if (best_size_ >= goal_) return true;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      if (static_cast<int>(base.size() + cands.size() - i) <= best_size_) break;
      const VertexId w = cands[i];
      std::vector<VertexId> next;
      for (std::size_t j = i + 1; j < cands.size(); ++j) {
        if (joins(base, w, cands[j])) next.push_back(cands[j]);
      }
      auto pos = std::lower_bound(base.begin(), base.end(), w);
      base.insert(pos, w);
      const bool done = extend(base, next);
      base.erase(std::find(base.begin(), base.end(), w));
      if (done) return true;
    }
    return false;
  }

  int best_size() const { return best_size_; }
  const std::vector<VertexId>& best() const { return best_; }

 private:
  // All k-sets T + {w, x} with T a (k-2)-subset of base are c-colored.
  bool joins(const std::vector<VertexId>& base, VertexId w, VertexId x) const {
    std::array<VertexId, kMaxUniformity> buf{};
    return for_each_subset(base, k_ - 2, [&](std::span<const VertexId> t) {
      std::size_t n = 0;
      for (VertexId v : t) buf[n++] = v;
      buf[n++] = w;
      buf[n++] = x;
      std::sort(buf.begin(), buf.begin() + static_cast<long>(n));
      auto col = g_.color_of(make_edge_unchecked(std::span<const VertexId>(buf.data(), n)));
      return col && *col == c_;
    });
  }

  const ColoredHypergraph& g_;
  Color c_;
  int goal_;
  int k_;
  int best_size_ = 0;
  std::vector<VertexId> best_;
};

// Vertices w outside seed such that seed - {x} + {w} is c-colored for every x.
std::vector<VertexId> seed_candidates(const ColoredHypergraph& g, const Edge& seed, Color c) {
  std::vector<VertexId> out;
  const Edge face = seed.without(seed[0]);
  for (VertexId w : g.completions(face, c)) {
    if (w == seed[0]) continue;
    bool ok = true;
    for (int i = 1; i < seed.size() && ok; ++i) {
      auto col = g.color_of(seed.without(seed[i]).with(w));
      ok = col && *col == c;
    }
    if (ok) out.push_back(w);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<MonoClique> clique_through(const ColoredHypergraph& g, const Edge& seed, Color c) {
  const int goal = g.params().target(c);
  std::vector<VertexId> base = seed.to_vector();
  if (goal <= seed.size()) return MonoClique{c, base};
  CliqueSearch search(g, c, goal);
  if (search.extend(base, seed_candidates(g, seed, c))) return MonoClique{c, search.best()};
  return std::nullopt;
}

}  // namespace

std::optional<MonoClique> find_mono_clique(const ColoredHypergraph& g,
                                           const std::optional<Edge>& newest) {
  if (newest) {
    auto c = g.color_of(*newest);
    if (!c) return std::nullopt;
    return clique_through(g, *newest, *c);
  }
  for (const auto& [e, c] : g.edges()) {
    if (auto hit = clique_through(g, e, c)) return hit;
  }
  return std::nullopt;
}

int largest_clique_through(const ColoredHypergraph& g, const Edge& seed, Color c, int cap) {
  std::vector<VertexId> base = seed.to_vector();
  if (cap <= seed.size()) return seed.size();
  CliqueSearch search(g, c, cap);
  search.extend(base, seed_candidates(g, seed, c));
  return search.best_size();
}

}  // namespace vor
