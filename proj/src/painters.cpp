#include "vor/painters.hpp"

#include <fstream>
#include <iostream>
#include <limits>
#include <unordered_map>

namespace vor {

ConstantPainter::ConstantPainter(const GameParams& params, Color c) : c_(c) {
  if (c < 1 || c > params.colors()) {
    throw InvalidParams("constant painter color " + std::to_string(c) + " outside 1.." +
                        std::to_string(params.colors()));
  }
}

RandomPainter::RandomPainter(const GameParams& params, std::uint64_t seed)
    : seed_(seed), q_(params.colors()), rng_(seed) {}

Color RandomPainter::paint(const Edge&, const ColoredHypergraph&) {
  const auto q = static_cast<std::uint64_t>(q_);
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  // 2^64 mod q, computed without overflow
  const std::uint64_t skew = (max % q + 1) % q;
  std::uint64_t r = rng_();
  while (skew != 0 && r > max - skew) r = rng_();
  return static_cast<Color>(r % q) + 1;
}

Color GreedyPainter::paint(const Edge& edge, const ColoredHypergraph& g) {
  Color best = 1;
  long long best_num = 0, best_den = 1;
  for (Color c = 1; c <= params_.colors(); ++c) {
    const int t = params_.target(c);
    const int size = largest_clique_through(g, edge, c, t);
    // size / t < best_num / best_den
    if (c == 1 || static_cast<long long>(size) * best_den < best_num * t) {
      best = c;
      best_num = size;
      best_den = t;
    }
  }
  return best;
}

SearchCaps MinimaxPainter::default_caps() {
  SearchCaps caps;
  caps.max_nodes = 20'000'000;
  return caps;
}

// The opponent is deterministic, so a node of the match tree is just the
// string of colors answered so far; it is expanded by replaying a fresh
// builder against those colors until the next unanswered build.
struct MinimaxPainter::Tree {
  static constexpr std::int64_t kUnbounded = std::numeric_limits<std::int64_t>::max();

  struct Pending {
    Edge edge;
  };
  struct CapHit {};

  class Scripted final : public PainterStrategy {
   public:
    explicit Scripted(const std::string& colors) : colors_(colors) {}
    std::string name() const override { return "scripted"; }
    Color paint(const Edge& edge, const ColoredHypergraph&) override {
      if (next_ == colors_.size()) throw Pending{edge};
      return static_cast<Color>(colors_[next_++]);
    }

   private:
    const std::string& colors_;
    std::size_t next_ = 0;
  };

  struct Step {
    std::optional<Edge> pending;
    std::int64_t length = 0;  // match length when the match is over
  };

  const BuilderStrategy& proto;
  ResourceCaps caps;
  int q;
  std::int64_t max_nodes;
  std::int64_t nodes = 0;
  std::unordered_map<std::string, std::int64_t> memo;

  Step simulate(const std::string& colors) const {
    auto builder = proto.fresh();
    Scripted script(colors);
    try {
      MatchResult r = run_match(*builder, script, caps);
      if (r.status.won()) return {std::nullopt, static_cast<std::int64_t>(colors.size())};
      return {std::nullopt, kUnbounded};
    } catch (const Pending& p) {
      return {p.edge, 0};
    }
  }

  std::int64_t value(std::string& colors) {
    if (auto it = memo.find(colors); it != memo.end()) return it->second;
    if (++nodes > max_nodes) throw CapHit{};
    Step s = simulate(colors);
    if (!s.pending) return s.length;
    std::int64_t best = 0;
    for (Color c = 1; c <= q && best != kUnbounded; ++c) {
      colors.push_back(static_cast<char>(c));
      best = std::max(best, value(colors));
      colors.pop_back();
    }
    memo.emplace(colors, best);
    return best;
  }
};

MinimaxPainter::MinimaxPainter(const GameParams& params, SearchCaps caps,
                               const BuilderStrategy* opponent)
    : params_(params), caps_(caps), greedy_(params) {
  if (opponent) {
    opponent_ = opponent->fresh();
    ResourceCaps rc;
    rc.mandatory_edge_rule = caps.mandatory_edge_rule;
    tree_ = std::make_unique<Tree>(Tree{*opponent_, rc, params.colors(), caps.max_nodes, 0, {}});
  }
}

MinimaxPainter::~MinimaxPainter() = default;

std::optional<std::int64_t> MinimaxPainter::worst_case() {
  if (!tree_) return std::nullopt;
  std::string root;
  try {
    return tree_->value(root);
  } catch (const Tree::CapHit&) {
    return std::nullopt;
  }
}

std::optional<Color> MinimaxPainter::reply_vs_opponent(const Edge& edge, const ColoredHypergraph& g) {
  std::string colors;
  for (const auto& [e, c] : g.edges()) colors.push_back(static_cast<char>(c));
  Tree::Step here = tree_->simulate(colors);
  // Not the game the model predicts (e.g. a different builder): no opinion.
  if (!here.pending || !(*here.pending == edge)) return std::nullopt;
  tree_->nodes = 0;
  try {
    Color best = 1;
    std::int64_t best_value = -1;
    for (Color c = 1; c <= params_.colors(); ++c) {
      colors.push_back(static_cast<char>(c));
      const std::int64_t v = tree_->value(colors);
      colors.pop_back();
      if (v > best_value) {
        best = c;
        best_value = v;
      }
    }
    return best;
  } catch (const Tree::CapHit&) {
    return std::nullopt;
  }
}

Color MinimaxPainter::paint(const Edge& edge, const ColoredHypergraph& g) {
  std::optional<Color> c;
  if (tree_) {
    c = reply_vs_opponent(edge, g);
  } else {
    try {
      if (!solver_) solver_ = std::make_unique<OnlineSolver>(params_, caps_);
      solver_->reset_nodes();
      c = solver_->best_reply(g, edge);
    } catch (const std::length_error&) {
      c.reset();
    }
  }
  if (c) return *c;
  ++fallbacks_;
  std::cerr << "warning: minimax painter has no exact answer at edge " << edge.to_string()
            << "; answering greedily\n";
  return greedy_.paint(edge, g);
}

std::unique_ptr<PainterStrategy> make_painter(const std::string& spec, const GameParams& params,
                                              const BuilderStrategy* opponent) {
  params.validate();
  auto arg = [&](std::size_t prefix) { return spec.substr(prefix); };
  try {
    if (spec.rfind("constant:", 0) == 0) {
      return std::make_unique<ConstantPainter>(params, std::stoi(arg(9)));
    }
    if (spec.rfind("random:", 0) == 0) {
      return std::make_unique<RandomPainter>(params, std::stoull(arg(7)));
    }
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const InvalidParams*>(&e)) throw;
    throw InvalidParams("bad number in painter spec '" + spec + "'");
  }
  if (spec == "greedy") return std::make_unique<GreedyPainter>(params);
  if (spec == "minimax") return std::make_unique<MinimaxPainter>(params, MinimaxPainter::default_caps(), opponent);
  if (spec.rfind("replay:", 0) == 0) {
    std::ifstream in(arg(7));
    if (!in) throw InvalidParams("cannot open replay transcript '" + arg(7) + "'");
    Transcript t = read_transcript(in);
    if (!(t.params == params)) throw InvalidParams("replay transcript was recorded for other parameters");
    return std::make_unique<ReplayPainter>(t.builds());
  }
  throw InvalidParams("unknown painter spec '" + spec +
                      "' (expected constant:c, random:seed, greedy, minimax, replay:file)");
}

}  // namespace vor
