#include "vor/solver.hpp"

#include <omp.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <climits>
#include <map>
#include <numeric>
#include <unordered_map>
#include <variant>

namespace vor {

using ojson = nlohmann::ordered_json;

namespace {

struct CapHit {};

ojson coloring_json(const Coloring& coloring) {
  ojson arr = ojson::array();
  for (const auto& [e, c] : coloring) arr.push_back({{"edge", e.to_vector()}, {"color", c}});
  return arr;
}

// Colex rank of a sorted k-subset of {1..n}.
std::size_t colex_rank(std::span<const int> v, const std::vector<std::vector<std::size_t>>& binom) {
  std::size_t r = 0;
  for (std::size_t i = 0; i < v.size(); ++i) r += binom[static_cast<std::size_t>(v[i] - 1)][i + 1];
  return r;
}

std::vector<std::vector<std::size_t>> binom_table(int n) {
  std::vector<std::vector<std::size_t>> b(static_cast<std::size_t>(n + 1),
                                          std::vector<std::size_t>(static_cast<std::size_t>(n + 2), 0));
  for (int i = 0; i <= n; ++i) {
    b[static_cast<std::size_t>(i)][0] = 1;
    for (int j = 1; j <= i; ++j) {
      b[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          b[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)] +
          (j <= i - 1 ? b[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j)] : 0);
    }
  }
  return b;
}

}  // namespace

ColoredHypergraph to_hypergraph(const GameParams& params, int n, const Coloring& coloring) {
  ColoredHypergraph g(params);
  g.set_revealed(n);
  for (const auto& [e, c] : coloring) g.add(e, c);
  return g;
}

ojson SolveResult::to_json() const {
  ojson j;
  j["format_version"] = 1;
  j["mode"] = mode;
  j["k"] = params.uniformity;
  j["q"] = params.colors();
  j["targets"] = params.targets;
  j["exact"] = exact();
  j["value"] = value ? ojson(*value) : ojson(nullptr);
  j["lower"] = lower;
  j["upper"] = upper ? ojson(*upper) : ojson(nullptr);
  j["nodes"] = nodes;
  j["certificate"] = certificate;
  return j;
}

// --- classical arrows ----------------------------------------------------------

namespace {

class ArrowsSearch {
 public:
  ArrowsSearch(const GameParams& params, int n, const ArrowsOptions& opt)
      : params_(params), n_(n), k_(params.uniformity), opt_(opt), binom_(binom_table(n)) {
    std::vector<int> all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), 1);
    for_each_subset(all, k_, [&](std::span<const int> s) {
      edges_.push_back(make_edge_unchecked(s));
      return true;
    });
    std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
      return std::lexicographical_compare(a.vertices().rbegin(), a.vertices().rend(),
                                          b.vertices().rbegin(), b.vertices().rend());
    });
    color_.assign(edges_.size(), 0);
    star_.assign(edges_.size(), -1);
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      const Edge& e = edges_[i];
      bool star = true;
      for (int j = 0; j < k_ - 1; ++j) star = star && e[j] == j + 1;
      if (star) star_[i] = e.max_vertex();
    }
  }

  std::size_t edge_count() const { return edges_.size(); }

  // Colors allowed at position i under the symmetry restriction.
  bool allowed(std::size_t i, Color c) const {
    if (!opt_.symmetry_pruning || star_[i] < 0) return true;
    if (star_[i] == k_) {
      for (Color d = 1; d < c; ++d) {
        if (params_.target(d) == params_.target(c)) return false;
      }
      return true;
    }
    return c >= last_star_color_at(i);
  }

  bool completes(std::size_t i, Color c) const {
    const Edge& e = edges_[i];
    const int t = params_.target(c);
    std::vector<int> rest;
    for (int v = 1; v <= e.max_vertex(); ++v) {
      if (!e.contains(v)) rest.push_back(v);
    }
    return !for_each_subset(rest, t - k_, [&](std::span<const int> extra) {
      std::vector<int> s(e.vertices().begin(), e.vertices().end());
      s.insert(s.end(), extra.begin(), extra.end());
      std::sort(s.begin(), s.end());
      const bool mono = for_each_subset(s, k_, [&](std::span<const int> f) {
        return color_[colex_rank(f, binom_)] == c;
      });
      return !mono;
    });
  }

  // Depth-first from position `from`; true when an escape was found (left in color_).
  bool dfs(std::size_t from, const std::function<bool()>& tick) {
    if (from == edges_.size()) return true;
    for (Color c = 1; c <= params_.colors(); ++c) {
      if (!allowed(from, c)) continue;
      if (!tick()) throw CapHit{};
      color_[from] = c;
      if (!completes(from, c) && dfs(from + 1, tick)) return true;
      color_[from] = 0;
    }
    return false;
  }

  // All valid partial colorings of the first `depth` positions.
  void prefixes(std::size_t at, std::size_t depth, std::vector<std::vector<Color>>& out) {
    if (at == depth) {
      out.emplace_back(color_.begin(), color_.begin() + static_cast<std::ptrdiff_t>(depth));
      return;
    }
    for (Color c = 1; c <= params_.colors(); ++c) {
      if (!allowed(at, c)) continue;
      color_[at] = c;
      if (!completes(at, c)) prefixes(at + 1, depth, out);
      color_[at] = 0;
    }
  }

  void load_prefix(const std::vector<Color>& p) {
    std::fill(color_.begin(), color_.end(), 0);
    std::copy(p.begin(), p.end(), color_.begin());
  }

  Coloring coloring() const {
    Coloring out;
    for (std::size_t i = 0; i < edges_.size(); ++i) out.emplace_back(edges_[i], color_[i]);
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  Color last_star_color_at(std::size_t i) const {
    // previous star edge precedes i in colex order
    for (std::size_t j = i; j-- > 0;) {
      if (star_[j] >= 0) return color_[j];
    }
    return 1;
  }

  GameParams params_;
  int n_;
  int k_;
  ArrowsOptions opt_;
  std::vector<std::vector<std::size_t>> binom_;
  std::vector<Edge> edges_;
  std::vector<Color> color_;
  std::vector<int> star_;
};

}  // namespace

ArrowsResult classical_arrows(const GameParams& params, int n, const ArrowsOptions& opt) {
  params.validate();
  if (n < 0 || n > 64) throw InvalidParams("classical search supports 0 <= n <= 64");
  ArrowsResult res;
  if (n < params.uniformity) {
    res.outcome = ArrowsResult::Outcome::kEscapes;
    res.counterexample = Coloring{};
    return res;
  }
  ArrowsSearch root(params, n, opt);

  if (!opt.parallel) {
    std::int64_t nodes = 0;
    auto tick = [&] { return ++nodes <= opt.caps.max_nodes; };
    try {
      if (root.dfs(0, tick)) {
        res.outcome = ArrowsResult::Outcome::kEscapes;
        res.counterexample = root.coloring();
      } else {
        res.outcome = ArrowsResult::Outcome::kArrows;
      }
    } catch (const CapHit&) {
      res.outcome = ArrowsResult::Outcome::kInconclusive;
    }
    res.nodes = nodes;
    return res;
  }

  // Fan out over prefixes; the escape reported is the one from the earliest
  // prefix, which is the same one the serial search finds.
  std::vector<std::vector<Color>> prefixes;
  std::size_t depth = 0;
  const auto want = static_cast<std::size_t>(64 * omp_get_max_threads());
  for (;;) {
    prefixes.clear();
    root.prefixes(0, depth, prefixes);
    if (prefixes.size() >= want || prefixes.empty() || depth == root.edge_count()) break;
    ++depth;
  }
  std::atomic<std::int64_t> nodes{0};
  std::atomic<std::size_t> best{prefixes.size()};
  std::atomic<bool> capped{false};
  std::vector<std::optional<Coloring>> found(prefixes.size());

#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t p = 0; p < prefixes.size(); ++p) {
    if (p > best.load() || capped.load()) continue;
    ArrowsSearch local(params, n, opt);
    local.load_prefix(prefixes[p]);
    std::int64_t mine = 0;
    auto tick = [&] {
      if ((++mine & 1023) == 0) {
        if (nodes.fetch_add(1024) + 1024 > opt.caps.max_nodes) capped = true;
        if (capped.load() || p > best.load()) return false;
      }
      return true;
    };
    try {
      if (local.dfs(depth, tick)) {
        found[p] = local.coloring();
        std::size_t cur = best.load();
        while (p < cur && !best.compare_exchange_weak(cur, p)) {
        }
      }
    } catch (const CapHit&) {
    }
    nodes.fetch_add(mine & 1023);
  }

  res.nodes = nodes.load();
  const std::size_t b = best.load();
  if (b < prefixes.size()) {
    res.outcome = ArrowsResult::Outcome::kEscapes;
    res.counterexample = found[b];
  } else if (capped.load()) {
    res.outcome = ArrowsResult::Outcome::kInconclusive;
  } else {
    res.outcome = ArrowsResult::Outcome::kArrows;
  }
  return res;
}

SolveResult classical_ramsey_number(const GameParams& params, const ArrowsOptions& opt) {
  params.validate();
  SolveResult out;
  out.mode = "classical";
  out.params = params;
  Coloring escape;
  for (int n = params.uniformity;; ++n) {
    if (n > 64) throw InvalidParams("classical search range exhausted");
    // the node cap covers the whole scan, not each n
    ArrowsOptions step = opt;
    step.caps.max_nodes = std::max<std::int64_t>(opt.caps.max_nodes - out.nodes, 1);
    ArrowsResult r = classical_arrows(params, n, step);
    out.nodes += r.nodes;
    if (r.outcome == ArrowsResult::Outcome::kArrows) {
      out.value = n;
      out.lower = n;
      out.upper = n;
      out.certificate = {{"escape_n", n - 1}, {"escape_coloring", coloring_json(escape)}};
      return out;
    }
    if (r.outcome == ArrowsResult::Outcome::kInconclusive) {
      out.lower = n;
      out.certificate = {{"escape_n", n - 1},
                         {"escape_coloring", coloring_json(escape)},
                         {"inconclusive_at", n}};
      return out;
    }
    escape = *r.counterexample;
  }
}

// --- online search -------------------------------------------------------------

namespace {

constexpr int kFastVertexLimit = 30;
constexpr std::size_t kMemoLimit = 12'000'000;

std::vector<std::vector<int>> color_symmetries(const GameParams& p) {
  std::vector<int> perm(static_cast<std::size_t>(p.colors()));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    bool ok = true;
    for (std::size_t c = 0; c < perm.size(); ++c) ok = ok && p.targets[c] == p.targets[static_cast<std::size_t>(perm[c])];
    if (ok) out.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

// Uniformity-2 positions as per-color adjacency bitmasks; vertex i is bit i-1.
class FastPos {
 public:
  using Move = int;  // older endpoint of an edge to the current vertex (0-based)

  explicit FastPos(const GameParams& p) : t_(p.targets), q_(p.colors()), sym_(color_symmetries(p)) {
    clear();
  }

  int n = 0;
  bool built = false;

  void clear() {
    n = 0;
    built = false;
    for (auto& a : adj_) a.fill(0);
  }

  void load(const ColoredHypergraph& g, bool built_now) {
    if (g.revealed() > kFastVertexLimit) throw std::length_error("position too large for search");
    clear();
    n = g.revealed();
    built = built_now;
    for (const auto& [e, c] : g.edges()) set(e[0] - 1, e[1] - 1, c - 1, true);
  }

  int cur() const { return n - 1; }

  std::vector<Move> candidates() const {
    std::vector<Move> out;
    const int c0 = cur();
    std::uint32_t taken = 0;
    for (int c = 0; c < q_; ++c) taken |= adj_[static_cast<std::size_t>(c)][static_cast<std::size_t>(c0)];
    for (int u = 0; u < c0; ++u) {
      if (taken >> u & 1U) continue;
      bool twin = false;
      for (int w : out) {
        if (is_twin(u, w)) {
          twin = true;
          break;
        }
      }
      if (!twin) out.push_back(u);
    }
    return out;
  }

  bool may_end_round(bool mandatory) const { return built || n < 2 || !mandatory; }

  // Paints {u, cur} with color c; true when that completes a target clique.
  bool add(Move u, Color c) {
    const int ci = c - 1;
    set(u, cur(), ci, true);
    built = true;
    const auto& a = adj_[static_cast<std::size_t>(ci)];
    const std::uint32_t common = a[static_cast<std::size_t>(u)] & a[static_cast<std::size_t>(cur())];
    return max_clique(common, ci, t_[static_cast<std::size_t>(ci)] - 2) >= t_[static_cast<std::size_t>(ci)] - 2;
  }
  void remove(Move u, Color c, bool was_built) {
    set(u, cur(), c - 1, false);
    built = was_built;
  }
  void reveal() {
    ++n;
    built = false;
  }
  void unreveal(bool was_built) {
    --n;
    built = was_built;
  }

  Edge to_edge(Move u) const { return make_edge({u + 1, n}, 2); }
  Move from_edge(const Edge& e) const { return e[0] - 1; }

  // Painter tries the color that keeps cliques through the edge smallest
  // (relative to the target) first.
  std::vector<Color> color_order(Move u) const {
    std::vector<std::pair<std::pair<int, int>, Color>> scored;
    for (int c = 0; c < q_; ++c) {
      const auto& a = adj_[static_cast<std::size_t>(c)];
      const int s = 2 + max_clique(a[static_cast<std::size_t>(u)] & a[static_cast<std::size_t>(cur())], c, 31);
      scored.push_back({{s, t_[static_cast<std::size_t>(c)]}, c + 1});
    }
    std::stable_sort(scored.begin(), scored.end(), [](const auto& x, const auto& y) {
      return x.first.first * y.first.second < y.first.first * x.first.second;
    });
    std::vector<Color> out;
    for (const auto& s : scored) out.push_back(s.second);
    return out;
  }

  // Edges still needed for any target clique: the old part of the clique
  // must already be a clique of that color; edges at the current vertex
  // and at future vertices are the only ones that can still be added.
  int lower_bound() const {
    int best = INT_MAX;
    const std::uint32_t old = cur() > 0 ? (1U << cur()) - 1 : 0;
    for (int c = 0; c < q_; ++c) {
      const int t = t_[static_cast<std::size_t>(c)];
      const auto& a = adj_[static_cast<std::size_t>(c)];
      const int omega = max_clique(old, c, t);
      const int deg = std::popcount(a[static_cast<std::size_t>(cur())]);
      for (int s = 0; s <= omega && s < t; ++s) {
        int b = t - s;
        best = std::min(best, b * s + b * (b - 1) / 2);
        b = t - s - 1;
        const int d = std::min(s, deg);
        best = std::min(best, (s - d) + b * (s + 1) + b * (b - 1) / 2);
      }
    }
    return std::max(best, 1);
  }

  void key(std::string& out) const {
    out.clear();
    std::vector<std::uint64_t> best;
    for (const auto& sigma : sym_) {
      encode_min(sigma, best);
    }
    out.push_back(static_cast<char>(n));
    out.push_back(static_cast<char>(built));
    out.append(reinterpret_cast<const char*>(best.data()), best.size() * sizeof(std::uint64_t));
  }

 private:
  void set(int u, int v, int c, bool on) {
    auto& a = adj_[static_cast<std::size_t>(c)];
    if (on) {
      a[static_cast<std::size_t>(u)] |= 1U << v;
      a[static_cast<std::size_t>(v)] |= 1U << u;
    } else {
      a[static_cast<std::size_t>(u)] &= ~(1U << v);
      a[static_cast<std::size_t>(v)] &= ~(1U << u);
    }
  }

  bool is_twin(int u, int w) const {
    const std::uint32_t mask = ~((1U << u) | (1U << w));
    for (int c = 0; c < q_; ++c) {
      const auto& a = adj_[static_cast<std::size_t>(c)];
      if ((a[static_cast<std::size_t>(u)] & mask) != (a[static_cast<std::size_t>(w)] & mask)) return false;
    }
    return true;
  }

  int max_clique(std::uint32_t mask, int c, int cap) const {
    if (!mask || cap <= 0) return 0;
    const auto& a = adj_[static_cast<std::size_t>(c)];
    int best = 0;
    while (mask) {
      if (std::popcount(mask) <= best) break;
      const int v = std::countr_zero(mask);
      mask &= mask - 1;
      const int got = 1 + max_clique(mask & a[static_cast<std::size_t>(v)], c, cap - 1);
      if (got > best) {
        best = got;
        if (best >= cap) return best;
      }
    }
    return best;
  }

  static std::uint64_t mix(std::uint64_t x) {
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdULL;
    x ^= x >> 33;
    x *= 0xc4ceb9fe1a85ec53ULL;
    x ^= x >> 33;
    return x;
  }

  // Smallest adjacency encoding over orderings consistent with a
  // color-degree refinement; ties are resolved by brute force when few.
  void encode_min(const std::vector<int>& sigma, std::vector<std::uint64_t>& best) const {
    const int c0 = cur();
    std::array<std::uint64_t, 32> inv{};
    for (int v = 0; v < n; ++v) {
      std::uint64_t x = v == c0 ? 1 : 0;
      for (int i = 0; i < q_; ++i) {
        const auto& a = adj_[static_cast<std::size_t>(sigma[static_cast<std::size_t>(i)])];
        x = x * 64 + static_cast<std::uint64_t>(std::popcount(a[static_cast<std::size_t>(v)]));
        x = x * 2 + (a[static_cast<std::size_t>(v)] >> c0 & 1U);
      }
      inv[static_cast<std::size_t>(v)] = x;
    }
    for (int round = 0; round < 2; ++round) {
      std::array<std::uint64_t, 32> next{};
      for (int v = 0; v < n; ++v) {
        std::uint64_t h = mix(inv[static_cast<std::size_t>(v)]);
        for (int i = 0; i < q_; ++i) {
          std::uint32_t m = adj_[static_cast<std::size_t>(sigma[static_cast<std::size_t>(i)])][static_cast<std::size_t>(v)];
          std::uint64_t s = 0;
          while (m) {
            s += mix(inv[static_cast<std::size_t>(std::countr_zero(m))] + static_cast<std::uint64_t>(i) * 0x9e3779b97f4a7c15ULL);
            m &= m - 1;
          }
          h = mix(h ^ (s + static_cast<std::uint64_t>(i + 1)));
        }
        next[static_cast<std::size_t>(v)] = v == c0 ? ~0ULL : h >> 1;
      }
      inv = next;
    }
    std::vector<int> ord(static_cast<std::size_t>(n));
    std::iota(ord.begin(), ord.end(), 0);
    std::stable_sort(ord.begin(), ord.end(), [&](int x, int y) {
      return inv[static_cast<std::size_t>(x)] < inv[static_cast<std::size_t>(y)];
    });
    std::vector<std::pair<int, int>> classes;
    std::uint64_t perms = 1;
    for (int i = 0; i < n;) {
      int j = i;
      while (j < n && inv[static_cast<std::size_t>(ord[static_cast<std::size_t>(j)])] ==
                          inv[static_cast<std::size_t>(ord[static_cast<std::size_t>(i)])]) {
        ++j;
      }
      if (j - i > 1) {
        classes.emplace_back(i, j);
        for (int f = 2; f <= j - i && perms <= 64; ++f) perms *= static_cast<std::uint64_t>(f);
      }
      i = j;
    }
    const bool brute = perms <= 24;
    std::vector<std::uint64_t> enc;
    auto consider = [&] {
      encode(sigma, ord, enc);
      if (best.empty() || enc < best) best = enc;
    };
    if (!brute || classes.empty()) {
      consider();
      return;
    }
    for (auto [lo, hi] : classes) std::sort(ord.begin() + lo, ord.begin() + hi);
    while (true) {
      consider();
      std::size_t ci = classes.size();
      while (ci > 0) {
        auto [lo, hi] = classes[ci - 1];
        if (std::next_permutation(ord.begin() + lo, ord.begin() + hi)) break;
        --ci;
      }
      if (ci == 0) break;
    }
  }

  void encode(const std::vector<int>& sigma, const std::vector<int>& ord, std::vector<std::uint64_t>& enc) const {
    enc.assign(static_cast<std::size_t>((q_ * n * (n - 1) / 2 + 63) / 64 + 1), 0);
    std::size_t bit = 0;
    for (int i = 0; i < q_; ++i) {
      const auto& a = adj_[static_cast<std::size_t>(sigma[static_cast<std::size_t>(i)])];
      for (int x = 0; x < n; ++x) {
        const std::uint32_t row = a[static_cast<std::size_t>(ord[static_cast<std::size_t>(x)])];
        for (int y = x + 1; y < n; ++y, ++bit) {
          if (row >> ord[static_cast<std::size_t>(y)] & 1U) enc[bit / 64] |= 1ULL << (bit % 64);
        }
      }
    }
  }

  std::vector<int> t_;
  int q_;
  std::vector<std::vector<int>> sym_;
  std::array<std::array<std::uint32_t, 32>, 4> adj_{};
};

// Any uniformity; exact edge sets as keys, no symmetry reduction.
class GenericPos {
 public:
  using Move = Edge;

  explicit GenericPos(const GameParams& p) : p_(p), k_(p.uniformity) {}

  int n = 0;
  bool built = false;

  void clear() {
    n = 0;
    built = false;
    col_.clear();
  }

  void load(const ColoredHypergraph& g, bool built_now) {
    clear();
    n = g.revealed();
    built = built_now;
    for (const auto& [e, c] : g.edges()) col_[e] = c;
  }

  std::vector<Move> candidates() const {
    std::vector<Move> out;
    if (n < k_) return out;
    std::vector<int> older(static_cast<std::size_t>(n - 1));
    std::iota(older.begin(), older.end(), 1);
    for_each_subset(older, k_ - 1, [&](std::span<const int> s) {
      std::vector<int> v(s.begin(), s.end());
      v.push_back(n);
      Edge e = make_edge_unchecked(v);
      if (!col_.contains(e)) out.push_back(e);
      return true;
    });
    return out;
  }

  bool may_end_round(bool mandatory) const { return built || n < k_ || !mandatory; }

  bool add(const Move& e, Color c) {
    col_[e] = c;
    built = true;
    std::vector<int> rest;
    for (int v = 1; v <= n; ++v) {
      if (!e.contains(v)) rest.push_back(v);
    }
    return !for_each_subset(rest, p_.target(c) - k_, [&](std::span<const int> extra) {
      std::vector<int> s(e.vertices().begin(), e.vertices().end());
      s.insert(s.end(), extra.begin(), extra.end());
      std::sort(s.begin(), s.end());
      return !for_each_subset(s, k_, [&](std::span<const int> f) {
        auto it = col_.find(make_edge_unchecked(f));
        return it != col_.end() && it->second == c;
      });
    });
  }
  void remove(const Move& e, Color, bool was_built) {
    col_.erase(e);
    built = was_built;
  }
  void reveal() {
    ++n;
    built = false;
  }
  void unreveal(bool was_built) {
    --n;
    built = was_built;
  }

  Edge to_edge(const Move& e) const { return e; }
  Move from_edge(const Edge& e) const { return e; }

  std::vector<Color> color_order(const Move&) const {
    std::vector<Color> out(static_cast<std::size_t>(p_.colors()));
    std::iota(out.begin(), out.end(), 1);
    return out;
  }

  int lower_bound() const { return 1; }

  void key(std::string& out) const {
    out.clear();
    out.push_back(static_cast<char>(n));
    out.push_back(static_cast<char>(built));
    for (const auto& [e, c] : col_) {
      for (VertexId v : e.vertices()) out.push_back(static_cast<char>(v));
      out.push_back(static_cast<char>(-c));
    }
  }

 private:
  GameParams p_;
  int k_;
  std::map<Edge, Color> col_;
};

template <class Pos>
class Search {
 public:
  Search(const GameParams& p, const SearchCaps& caps, int vertex_limit)
      : pos(p), params_(p), caps_(caps), vertex_limit_(vertex_limit) {}

  Pos pos;
  std::int64_t nodes = 0;

  // Can builder force a win within `budget` more edges from `pos`?
  bool win(int budget) {
    if (++nodes > caps_.max_nodes) throw CapHit{};
    if (budget <= 0) return false;
    if (pos.lower_bound() > budget) return false;
    std::string key;
    pos.key(key);
    if (auto it = memo_.find(key); it != memo_.end()) {
      if (budget >= it->second.win) return true;
      if (budget <= it->second.fail) return false;
    }
    bool result = false;
    for (const auto& m : pos.candidates()) {
      if (forced_by(m, budget)) {
        result = true;
        break;
      }
    }
    if (!result && pos.may_end_round(caps_.mandatory_edge_rule) && pos.n < vertex_limit_) {
      const bool was = pos.built;
      pos.reveal();
      result = win(budget);
      pos.unreveal(was);
    }
    if (memo_.size() >= kMemoLimit) memo_.clear();
    Entry& e = memo_[key];
    if (result) {
      e.win = std::min(e.win, budget);
    } else {
      e.fail = std::max(e.fail, budget);
    }
    return result;
  }

  // Building m wins within budget whatever the color.
  bool forced_by(const typename Pos::Move& m, int budget) {
    for (Color c : pos.color_order(m)) {
      const bool was = pos.built;
      const bool done = pos.add(m, c);
      bool ok = done;
      if (!ok) {
        try {
          ok = win(budget - 1);
        } catch (...) {
          pos.remove(m, c, was);
          throw;
        }
      }
      pos.remove(m, c, was);
      if (!ok) return false;
    }
    return true;
  }

  // Least budget <= cap that wins from pos, or cap + 1.
  int value_up_to(int cap) {
    for (int b = 0; b <= cap; ++b) {
      if (b > 0 && win(b)) return b;
    }
    return cap + 1;
  }

  const GameParams& params() const { return params_; }
  const SearchCaps& caps() const { return caps_; }
  int vertex_limit() const { return vertex_limit_; }

 private:
  struct Entry {
    int fail = 0;
    int win = INT_MAX;
  };
  GameParams params_;
  SearchCaps caps_;
  int vertex_limit_;
  std::unordered_map<std::string, Entry> memo_;
};

class PresetPainter : public PainterStrategy {
 public:
  std::string name() const override { return "preset"; }
  Color paint(const Edge&, const ColoredHypergraph&) override { return next; }
  Color next = 1;
};

}  // namespace

struct OnlineSolver::Impl {
  GameParams params;
  SearchCaps caps;
  int max_budget = 0;
  std::variant<std::unique_ptr<Search<FastPos>>, std::unique_ptr<Search<GenericPos>>> search;

  template <class F>
  decltype(auto) with(F&& f) {
    return std::visit([&](auto& s) -> decltype(auto) { return f(*s); }, search);
  }
};

OnlineSolver::OnlineSolver(GameParams params, SearchCaps caps, bool force_generic)
    : impl_(std::make_unique<Impl>()) {
  params.validate();
  impl_->params = params;
  impl_->caps = caps;
  const bool fast = !force_generic && params.uniformity == 2 && params.colors() <= 4;
  if (caps.max_budget > 0) {
    impl_->max_budget = caps.max_budget;
  } else if (params.uniformity == 2) {
    impl_->max_budget = static_cast<int>(tree_edge_budget(params.targets).get_si());
  } else {
    impl_->max_budget = 64;
  }
  int vlimit = caps.max_vertices > 0 ? caps.max_vertices : impl_->max_budget + params.uniformity;
  if (fast) {
    vlimit = std::min(vlimit, kFastVertexLimit);
    impl_->search = std::make_unique<Search<FastPos>>(params, caps, vlimit);
  } else {
    impl_->search = std::make_unique<Search<GenericPos>>(params, caps, vlimit);
  }
}

OnlineSolver::~OnlineSolver() = default;

const GameParams& OnlineSolver::params() const { return impl_->params; }
bool OnlineSolver::uses_fast_path() const { return impl_->search.index() == 0; }
std::int64_t OnlineSolver::nodes() const {
  return std::visit([](const auto& s) { return s->nodes; }, impl_->search);
}
void OnlineSolver::reset_nodes() {
  std::visit([](auto& s) { s->nodes = 0; }, impl_->search);
}

std::optional<bool> OnlineSolver::can_force(const ColoredHypergraph& g, bool built_this_round, int budget) {
  return impl_->with([&](auto& s) -> std::optional<bool> {
    s.pos.load(g, built_this_round);
    try {
      return s.win(budget);
    } catch (const CapHit&) {
      return std::nullopt;
    }
  });
}

std::optional<Color> OnlineSolver::best_reply(const ColoredHypergraph& g, const Edge& edge) {
  const int max_budget = impl_->max_budget;
  return impl_->with([&](auto& s) -> std::optional<Color> {
    s.pos.load(g, true);
    const auto m = s.pos.from_edge(edge);
    std::vector<Color> alive;
    for (Color c = 1; c <= s.params().colors(); ++c) {
      const bool was = s.pos.built;
      if (!s.pos.add(m, c)) alive.push_back(c);
      s.pos.remove(m, c, was);
    }
    if (alive.empty()) return 1;
    try {
      // Raise the budget until all but the slowest colors are refuted.
      for (int b = 1; b <= max_budget && alive.size() > 1; ++b) {
        std::vector<Color> survivors;
        for (Color c : alive) {
          const bool was = s.pos.built;
          s.pos.add(m, c);
          bool w = false;
          try {
            w = s.win(b);
          } catch (...) {
            s.pos.remove(m, c, was);
            throw;
          }
          s.pos.remove(m, c, was);
          if (!w) survivors.push_back(c);
        }
        if (survivors.empty()) return alive.front();
        alive = survivors;
      }
    } catch (const CapHit&) {
      return std::nullopt;
    }
    return alive.front();
  });
}

SolveResult OnlineSolver::solve() {
  SolveResult out;
  out.mode = "online";
  out.params = impl_->params;
  const int max_budget = impl_->max_budget;
  if (impl_->params.uniformity == 2) out.upper = max_budget;
  impl_->with([&](auto& s) {
    s.pos.clear();
    s.pos.reveal();
    int b = 1;
    try {
      for (; b <= max_budget; ++b) {
        if (s.win(b)) break;
      }
    } catch (const CapHit&) {
      out.lower = b;
      out.nodes = s.nodes;
      out.certificate = {{"inconclusive_at_budget", b}};
      return;
    }
    out.nodes = s.nodes;
    if (b > max_budget) {
      out.lower = max_budget + 1;
      out.upper.reset();
      out.certificate = {{"no_win_within", max_budget}};
      return;
    }
    out.value = b;
    out.lower = b;
    out.upper = b;

    // Principal line: builder keeps a forcing move, painter picks the reply
    // whose remaining value is largest.
    ResourceCaps rc;
    rc.mandatory_edge_rule = s.caps().mandatory_edge_rule;
    GameState game(s.params(), rc);
    PresetPainter painter;
    game.reveal();
    s.pos.clear();
    s.pos.reveal();
    int budget = b;
    ojson first;
    try {
      while (game.status().ongoing()) {
        std::optional<typename std::decay_t<decltype(s.pos)>::Move> move;
        for (const auto& m : s.pos.candidates()) {
          if (s.forced_by(m, budget)) {
            move = m;
            break;
          }
        }
        if (!move) {
          s.pos.reveal();
          game.reveal();
          continue;
        }
        Color best = 0;
        int best_value = -1;
        for (Color c = 1; c <= s.params().colors(); ++c) {
          const bool was = s.pos.built;
          int v = 0;
          if (!s.pos.add(*move, c)) v = s.value_up_to(budget - 1);
          s.pos.remove(*move, c, was);
          if (v > best_value) {
            best_value = v;
            best = c;
          }
        }
        const Edge e = s.pos.to_edge(*move);
        if (first.empty()) first = {{"builder", e.to_vector()}, {"painter", best}};
        s.pos.add(*move, best);
        painter.next = best;
        game.build(e, painter);
        budget = best_value;
      }
    } catch (const CapHit&) {
      out.certificate = {{"first_moves", first}, {"principal_line", nullptr}};
      return;
    }
    ojson line = ojson::array();
    for (const auto& ev : game.transcript().events) line.push_back(event_to_json(ev));
    out.certificate = {{"first_moves", first}, {"principal_line", line}};
    out.nodes = s.nodes;
  });
  return out;
}

}  // namespace vor
