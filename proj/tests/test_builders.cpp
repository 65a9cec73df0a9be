#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>

#include "vor/builders.hpp"
#include "vor/engine.hpp"
#include "vor/harness.hpp"
#include "vor/painters.hpp"

using namespace vor;

namespace {

// Exhaustive adversary against the color tree, written from the tree's
// definition alone. A position is the set of occupied tree nodes, each named
// by its root path of colors. The painter picks every color of every walk;
// the value is the longest the match can last, in edges.
class TreeAdversary {
 public:
  explicit TreeAdversary(std::vector<int> targets) : t_(std::move(targets)) {}

  long worst_case() { return value({""}); }

 private:
  long value(const std::set<std::string>& occupied) {
    std::string key;
    for (const auto& s : occupied) key += s + "|";
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    std::vector<int> turns(t_.size(), 0);
    const long v = walk(occupied, "", turns);
    memo_[key] = v;
    return v;
  }

  // Edges still to come once the walker stands at the occupied node `at`.
  long walk(const std::set<std::string>& occupied, const std::string& at, std::vector<int>& turns) {
    long best = 0;
    for (std::size_t c = 0; c < t_.size(); ++c) {
      long here;
      if (turns[c] + 1 == t_[c] - 1) {
        here = 1;
      } else {
        const std::string child = at + static_cast<char>('1' + c);
        ++turns[c];
        if (occupied.count(child)) {
          here = 1 + walk(occupied, child, turns);
        } else {
          auto next = occupied;
          next.insert(child);
          here = 1 + value(next);
        }
        --turns[c];
      }
      best = std::max(best, here);
    }
    return best;
  }

  std::vector<int> t_;
  std::map<std::string, long> memo_;
};

long binom2(long t) { return t * (t - 1) / 2; }

}  // namespace

TEST(CliqueBuilder, BuildsAllEdgesThenConcedes) {
  GameParams p{2, {3, 3}};
  CliqueBuilder b(p, 5);
  class Pentagon final : public PainterStrategy {
   public:
    std::string name() const override { return "pentagon"; }
    Color paint(const Edge& e, const ColoredHypergraph&) override {
      const int d = (e[1] - e[0]) % 5;
      return d == 1 || d == 4 ? 1 : 2;
    }
  } pent;
  MatchResult r = run_match(b, pent, ResourceCaps{});
  EXPECT_EQ(*r.status.abort_reason, AbortReason::kBuilderConceded);
  EXPECT_EQ(r.transcript.build_count(), 10u);
  // it concedes in the round of the sixth vertex
  EXPECT_EQ(r.transcript.vertex_count(), 6);
}

TEST(CliqueBuilder, SixVerticesAlwaysWin) {
  GameParams p{2, {3, 3}};
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    CliqueBuilder b(p, 6);
    RandomPainter painter(p, seed);
    MatchResult r = run_match(b, painter, ResourceCaps{});
    EXPECT_TRUE(r.status.won()) << seed;
    EXPECT_LE(r.transcript.build_count(), 15u);
  }
  CliqueBuilder b(p, 6);
  EXPECT_EQ(b.budget().vertices.to_string(), "6");
  EXPECT_EQ(b.budget().edges.to_string(), "15");
}

TEST(CliqueBuilder, ThreeUniformEdgeOrder) {
  GameParams p{3, {4, 4}};
  CliqueBuilder b(p, 4);
  ConstantPainter red(p, 1);
  MatchResult r = run_match(b, red, ResourceCaps{});
  ASSERT_TRUE(r.status.won());
  std::vector<std::vector<int>> built;
  for (const auto& e : r.transcript.builds()) built.push_back(e.edge.to_vector());
  EXPECT_EQ(built, (std::vector<std::vector<int>>{{1, 2, 3}, {1, 2, 4}, {1, 3, 4}, {2, 3, 4}}));
}

TEST(TreeBuilder, ConstantSecondColorBuildsBinomial) {
  // Against a painter that always answers 2, K_t in color 2 takes C(t,2) edges.
  for (int t = 3; t <= 7; ++t) {
    GameParams p{2, {3, t}};
    TreeBuilder b(p);
    ConstantPainter blue(p, 2);
    MatchResult r = run_match(b, blue, ResourceCaps{});
    ASSERT_TRUE(r.status.won()) << t;
    EXPECT_EQ(r.status.clique->color, 2);
    EXPECT_EQ(static_cast<long>(r.transcript.build_count()), binom2(t)) << t;
    EXPECT_EQ(r.transcript.vertex_count(), t);
  }
}

TEST(TreeBuilder, PerVertexEdgesBoundedByPathLength) {
  const std::vector<std::vector<int>> cases = {{3, 3}, {3, 4}, {4, 4}, {3, 3, 3}, {3, 5}};
  for (const auto& t : cases) {
    GameParams p{2, t};
    int path = 1;
    for (int tc : t) path += tc - 2;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      TreeBuilder b(p);
      RandomPainter painter(p, seed);
      MatchResult r = run_match(b, painter, ResourceCaps{});
      ASSERT_TRUE(r.status.won());
      std::map<int, int> per_vertex;
      for (const auto& e : r.transcript.builds()) ++per_vertex[e.edge.max_vertex()];
      for (const auto& [v, n] : per_vertex) EXPECT_LE(n, path) << "vertex " << v;
      auto budget = b.budget();
      EXPECT_LE(TowerExpr(BigNat(static_cast<unsigned long>(r.transcript.vertex_count()))), budget.vertices);
      EXPECT_LE(TowerExpr(BigNat(r.transcript.build_count())), budget.edges);
    }
  }
}

TEST(TreeBuilder, NodeTurnsStayBelowTargets) {
  GameParams p{2, {4, 5}};
  TreeBuilder b(p);
  RandomPainter painter(p, 11);
  run_match(b, painter, ResourceCaps{});
  for (const auto& n : b.nodes()) {
    for (std::size_t c = 0; c < n.turns.size(); ++c) EXPECT_LE(n.turns[c], p.targets[c] - 2);
  }
}

TEST(TreeAdversaryOracle, SmallGoldens) {
  EXPECT_EQ(TreeAdversary({3, 3}).worst_case(), 9);
  EXPECT_EQ(TreeAdversary({3, 4}).worst_case(), 21);
  // any edge in color 1 closes a K_2, so the painter answers 2 throughout
  EXPECT_EQ(TreeAdversary({2, 5}).worst_case(), 10);
}

TEST(TreeBuilder, WorstCaseMatchesExhaustiveAdversary) {
  for (const std::vector<int>& t : {std::vector<int>{3, 3}, std::vector<int>{3, 4}}) {
    GameParams p{2, t};
    TreeBuilder b(p);
    MinimaxPainter mm(p, MinimaxPainter::default_caps(), &b);
    auto wc = mm.worst_case();
    ASSERT_TRUE(wc);
    EXPECT_EQ(*wc, TreeAdversary(t).worst_case());
    EXPECT_LE(TowerExpr(BigNat(static_cast<unsigned long>(*wc))), b.budget().edges);
  }
}

TEST(TreeBuilder, FreshReplaysIdentically) {
  GameParams p{2, {3, 4}};
  TreeBuilder proto(p);
  RandomPainter p1(p, 3), p2(p, 3);
  auto a = proto.fresh();
  auto b = proto.fresh();
  EXPECT_EQ(run_match(*a, p1, ResourceCaps{}).transcript.events,
            run_match(*b, p2, ResourceCaps{}).transcript.events);
}

TEST(TreeBuilder, RejectsNonGraphUniformity) {
  EXPECT_ANY_THROW(TreeBuilder(GameParams{3, {4, 4}}));
}

TEST(RecursiveBuilder, ConstantPainterTrace) {
  GameParams p{3, {4, 4}};
  for (Color c = 1; c <= 2; ++c) {
    auto b = make_builder("recursive", p);
    auto* rb = dynamic_cast<RecursiveBuilder*>(b.get());
    ASSERT_NE(rb, nullptr);
    ConstantPainter painter(p, c);
    MatchResult r = run_match(*b, painter, ResourceCaps{});
    ASSERT_TRUE(r.status.won());
    EXPECT_EQ(r.status.clique->vertices, (std::vector<int>{1, 2, 3, 4}));
    EXPECT_EQ(r.transcript.build_count(), 4u);
    LabelledState s = rb->export_state();
    const std::string d(1, static_cast<char>('0' + c));
    EXPECT_EQ(s.labels, (std::vector<std::string>{"", "", d, d + d + d}));
    EXPECT_EQ(s.r_sets, (std::vector<std::vector<VertexId>>{{}, {}, {1, 2}, {1, 2, 3}}));
    EXPECT_EQ(s.sub_budget.to_string(), "12");
    ASSERT_TRUE(s.declared_win);
    EXPECT_EQ(s.declared_win->color, c);
  }
}

TEST(RecursiveBuilder, InvariantsHoldAgainstThePool) {
  const std::vector<GameParams> grid = {{3, {3, 3}}, {3, {4, 4}}, {3, {3, 4}}, {3, {4, 4, 4}}, {4, {5, 5}}};
  for (const auto& p : grid) {
    std::vector<std::string> painters = {"constant:1", "constant:2", "greedy"};
    for (int s = 0; s < 8; ++s) painters.push_back("random:" + std::to_string(s));
    for (const auto& ps : painters) {
      auto b = make_builder("recursive", p);
      auto painter = make_painter(ps, p);
      MatchResult r = run_match(*b, *painter, ResourceCaps{});
      SCOPED_TRACE("k=" + std::to_string(p.uniformity) + " " + ps);
      ASSERT_TRUE(r.status.won());
      auto* rb = dynamic_cast<RecursiveBuilder*>(b.get());
      LabelledState st = rb->export_state();

      // distinct complete labels, each as long as its round's edge count
      std::map<int, int> per_round;
      for (const auto& e : r.transcript.builds()) ++per_round[e.edge.max_vertex()];
      for (std::size_t j = 0; j < st.labels.size(); ++j) {
        EXPECT_EQ(static_cast<int>(st.labels[j].size()), per_round[static_cast<int>(j) + 1]) << "v" << j + 1;
      }
      for (const auto& res : check_recursive_invariants(r.transcript, st)) {
        EXPECT_TRUE(res.pass()) << res.name << ": " << res.to_json().dump();
      }
      EXPECT_TRUE(check_budgets(r.transcript, b->budget()).pass());
    }
  }
}

TEST(RecursiveBuilder, StateJsonRoundTrip) {
  GameParams p{3, {4, 4}};
  auto b = make_builder("recursive", p);
  RandomPainter painter(p, 7);
  run_match(*b, painter, ResourceCaps{});
  LabelledState s = dynamic_cast<RecursiveBuilder&>(*b).export_state();
  EXPECT_EQ(LabelledState::from_json(s.to_json()), s);
  auto j = s.to_json();
  EXPECT_EQ(j["format_version"], 1);
  EXPECT_EQ(LabelledState::from_json(nlohmann::ordered_json::parse(j.dump())), s);
}

TEST(RecursiveBuilder, PartialStateDuringARound) {
  GameParams p{3, {4, 4}};
  auto b = make_builder("recursive", p);
  auto& rb = dynamic_cast<RecursiveBuilder&>(*b);
  rb.on_reveal(1);
  rb.on_reveal(2);
  rb.on_reveal(3);
  auto act = rb.next_action();
  ASSERT_TRUE(std::holds_alternative<BuildEdge>(act));
  rb.on_color(std::get<BuildEdge>(act).edge, 2);
  LabelledState s = rb.export_state();
  ASSERT_EQ(s.labels.size(), 3u);
  EXPECT_EQ(s.labels[2], "2");
}

TEST(RecursiveBuilder, BudgetIsTheoremBound) {
  auto b = make_builder("recursive", GameParams{3, {4, 4}});
  EXPECT_EQ(b->budget().vertices.to_string(), "4097");
  EXPECT_EQ(b->budget().edges.to_string(), "49152");
}

TEST(MakeBuilder, Specs) {
  GameParams p{2, {3, 3}};
  EXPECT_EQ(make_builder("clique:6", p)->name(), "clique:6");
  EXPECT_EQ(make_builder("tree", p)->name(), "tree");
  EXPECT_EQ(make_builder("recursive", p)->name(), "tree");
  EXPECT_EQ(make_builder("recursive", GameParams{3, {4, 4}})->name(), "recursive");
  EXPECT_THROW(make_builder("clique:x", p), InvalidParams);
  EXPECT_THROW(make_builder("spiral", p), InvalidParams);
  EXPECT_THROW(make_builder("tree", GameParams{2, {}}), InvalidParams);
}
