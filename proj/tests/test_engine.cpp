#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "vor/builders.hpp"
#include "vor/engine.hpp"
#include "vor/painters.hpp"

using namespace vor;

namespace {

const GameParams k2_33{2, {3, 3}};

}  // namespace

TEST(NewGame, StartsEmpty) {
  GameState s(k2_33, ResourceCaps{});
  EXPECT_EQ(s.current_round(), 0);
  EXPECT_TRUE(s.status().ongoing());
  GameState s3(GameParams{3, {4, 4}}, ResourceCaps{});
  EXPECT_EQ(s3.graph().revealed(), 0);
  EXPECT_TRUE(s3.status().ongoing());
}

TEST(NewGame, RejectsNoColors) { EXPECT_THROW(GameState(GameParams{2, {}}, ResourceCaps{}), InvalidParams); }

TEST(NewGame, RejectsNonPositiveCaps) {
  ResourceCaps caps;
  caps.max_edges = 0;
  EXPECT_ANY_THROW(GameState(k2_33, caps));
}

TEST(Reveal, FirstVertexIsOne) {
  GameState s(k2_33, ResourceCaps{});
  EXPECT_EQ(s.reveal(), 1);
}

TEST(Reveal, MandatoryRuleRejectsEmptyRoundK) {
  GameState s(k2_33, ResourceCaps{});
  s.reveal();
  s.reveal();  // round 2 = k
  try {
    s.reveal();
    FAIL() << "expected a rule violation";
  } catch (const RuleViolation& e) {
    EXPECT_EQ(e.rule(), std::string(rules::kMandatory));
  }
  EXPECT_EQ(s.current_round(), 2);
}

TEST(Reveal, RuleOffAllowsEmptyRounds) {
  ResourceCaps caps;
  caps.mandatory_edge_rule = false;
  GameState s(k2_33, caps);
  s.reveal();
  s.reveal();
  EXPECT_EQ(s.reveal(), 3);
}

TEST(Reveal, EarlyRoundsMayBeEmpty) {
  GameState s(GameParams{3, {4, 4}}, ResourceCaps{});
  EXPECT_EQ(s.reveal(), 1);
  EXPECT_EQ(s.reveal(), 2);
  EXPECT_EQ(s.reveal(), 3);
}

TEST(Reveal, VertexCapAborts) {
  ResourceCaps caps;
  caps.max_vertices = 1;
  GameState s(k2_33, caps);
  s.reveal();
  EXPECT_FALSE(s.reveal());
  EXPECT_TRUE(s.status().aborted());
  EXPECT_EQ(*s.status().abort_reason, AbortReason::kVertexCap);
}

TEST(Build, RecordsPainterColor) {
  ConstantPainter red(k2_33, 1);
  GameState s(k2_33, ResourceCaps{});
  s.reveal();
  s.reveal();
  s.build(make_edge({1, 2}, 2), red);
  s.reveal();
  EXPECT_EQ(s.build(make_edge({1, 3}, 2), red), 1);
  EXPECT_EQ(s.graph().color_of(make_edge({1, 3}, 2)), 1);
}

TEST(Build, RejectsEdgeWithoutCurrentVertex) {
  ConstantPainter red(k2_33, 1);
  GameState s(k2_33, ResourceCaps{});
  s.reveal();
  s.reveal();
  s.build(make_edge({1, 2}, 2), red);
  s.reveal();
  try {
    s.build(make_edge({1, 2}, 2), red);
    FAIL();
  } catch (const RuleViolation& e) {
    EXPECT_EQ(e.rule(), std::string(rules::kMaxVertex));
  }
  EXPECT_EQ(s.graph().edge_count(), 1u);
}

TEST(Build, RejectsDuplicateAndUnrevealed) {
  ConstantPainter blue(k2_33, 2);
  GameState s(k2_33, ResourceCaps{});
  s.reveal();
  s.reveal();
  s.build(make_edge({1, 2}, 2), blue);
  try {
    s.build(make_edge({1, 2}, 2), blue);
    FAIL();
  } catch (const RuleViolation& e) {
    EXPECT_EQ(e.rule(), std::string(rules::kDuplicate));
  }
  EXPECT_THROW(s.build(make_edge({2, 3}, 2), blue), RuleViolation);
}

TEST(Build, EdgeCapAborts) {
  ResourceCaps caps;
  caps.max_edges = 1;
  ConstantPainter red(k2_33, 1);
  GameState s(k2_33, caps);
  s.reveal();
  s.reveal();
  EXPECT_TRUE(s.build(make_edge({1, 2}, 2), red));
  s.reveal();
  EXPECT_FALSE(s.build(make_edge({1, 3}, 2), red));
  EXPECT_EQ(*s.status().abort_reason, AbortReason::kEdgeCap);
}

TEST(Build, WinEndsTheGameMidRound) {
  ConstantPainter red(k2_33, 1);
  GameState s(k2_33, ResourceCaps{});
  s.reveal();
  s.reveal();
  s.build(make_edge({1, 2}, 2), red);
  s.reveal();
  s.build(make_edge({1, 3}, 2), red);
  s.build(make_edge({2, 3}, 2), red);
  ASSERT_TRUE(s.status().won());
  EXPECT_EQ(s.status().clique->vertices, (std::vector<int>{1, 2, 3}));
  EXPECT_THROW(s.reveal(), RuleViolation);
  EXPECT_TRUE(std::holds_alternative<event::Win>(s.transcript().events.back()));
}

TEST(RunMatch, CliqueBuilderVsConstant) {
  CliqueBuilder b(k2_33, 6);
  ConstantPainter red(k2_33, 1);
  MatchResult r = run_match(b, red, ResourceCaps{});
  ASSERT_TRUE(r.status.won());
  EXPECT_EQ(r.status.clique->color, 1);
  EXPECT_EQ(r.status.clique->vertices, (std::vector<int>{1, 2, 3}));
  EXPECT_EQ(r.transcript.build_count(), 3u);
}

TEST(RunMatch, TreeBuilderVsConstant) {
  TreeBuilder b(k2_33);
  ConstantPainter red(k2_33, 1);
  MatchResult r = run_match(b, red, ResourceCaps{});
  ASSERT_TRUE(r.status.won());
  EXPECT_EQ(r.status.clique->vertices, (std::vector<int>{1, 2, 3}));
  EXPECT_EQ(r.transcript.build_count(), 3u);
  EXPECT_EQ(r.transcript.vertex_count(), 3);
}

TEST(RunMatch, OneEdgeCapAlwaysAborts) {
  ResourceCaps caps;
  caps.max_edges = 1;
  for (const char* spec : {"tree", "clique:6"}) {
    for (const char* p : {"constant:1", "constant:2", "greedy", "random:3"}) {
      auto b = make_builder(spec, k2_33);
      auto painter = make_painter(p, k2_33);
      MatchResult r = run_match(*b, *painter, caps);
      EXPECT_TRUE(r.status.aborted()) << spec << " vs " << p;
    }
  }
}

TEST(RunMatch, CliqueTooSmallConcedes) {
  CliqueBuilder b(k2_33, 5);
  GameParams p = k2_33;
  // the pentagon coloring: answer by cyclic distance
  class Pentagon final : public PainterStrategy {
   public:
    std::string name() const override { return "pentagon"; }
    Color paint(const Edge& e, const ColoredHypergraph&) override {
      const int d = (e[1] - e[0]) % 5;
      return d == 1 || d == 4 ? 1 : 2;
    }
  } pent;
  MatchResult r = run_match(b, pent, ResourceCaps{});
  EXPECT_TRUE(r.status.aborted());
  EXPECT_EQ(*r.status.abort_reason, AbortReason::kBuilderConceded);
  EXPECT_EQ(r.transcript.build_count(), 10u);
}

namespace {

struct MatchCase {
  GameParams params;
  std::string builder;
};

std::vector<MatchCase> property_cases() {
  return {{GameParams{2, {3, 3}}, "tree"},     {GameParams{2, {3, 4}}, "tree"},
          {GameParams{2, {3, 3, 3}}, "tree"},  {GameParams{2, {3, 3}}, "clique:6"},
          {GameParams{3, {4, 4}}, "recursive"}, {GameParams{3, {3, 4}}, "clique:5"}};
}

}  // namespace

// Replay determinism, confirmed wins, mandatory builds and no repeated edges
// over seeded random matches.
TEST(Transcript, PropertiesOverRandomMatches) {
  for (const auto& mc : property_cases()) {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
      auto b = make_builder(mc.builder, mc.params);
      RandomPainter p(mc.params, seed);
      MatchResult r = run_match(*b, p, ResourceCaps{});
      SCOPED_TRACE(mc.builder + " seed " + std::to_string(seed));

      GameState replayed = replay_transcript(r.transcript);
      EXPECT_EQ(replayed.status(), r.status);
      EXPECT_EQ(replayed.transcript().events, r.transcript.events);
      EXPECT_EQ(replayed.graph().edges(), ColoredHypergraph(replayed.graph()).edges());

      if (r.status.won()) {
        auto full = find_mono_clique(replayed.graph());
        ASSERT_TRUE(full);
        EXPECT_TRUE(is_mono_clique(replayed.graph(), r.status.clique->vertices, r.status.clique->color));
      }

      std::set<Edge> seen;
      int round = 0, builds = 0;
      for (const auto& ev : r.transcript.events) {
        if (auto* rv = std::get_if<event::Reveal>(&ev)) {
          round = rv->vertex;
          builds = 0;
        } else if (auto* bd = std::get_if<event::Build>(&ev)) {
          EXPECT_TRUE(seen.insert(bd->edge).second) << "repeated " << bd->edge.to_string();
          EXPECT_EQ(bd->edge.max_vertex(), round);
          ++builds;
        } else if (std::holds_alternative<event::RoundEnd>(ev)) {
          if (round >= mc.params.uniformity) EXPECT_GE(builds, 1) << "round " << round;
        }
      }
    }
  }
}

TEST(Transcript, JsonLinesFormat) {
  TreeBuilder b(k2_33);
  ConstantPainter red(k2_33, 1);
  MatchResult r = run_match(b, red, ResourceCaps{});
  std::istringstream in(transcript_to_string(r.transcript));
  std::string line;
  std::getline(in, line);
  auto h = nlohmann::json::parse(line);
  EXPECT_EQ(h["format_version"], 1);
  EXPECT_EQ(h["k"], 2);
  EXPECT_EQ(h["q"], 2);
  EXPECT_EQ(h["targets"], nlohmann::json::array({3, 3}));
  EXPECT_TRUE(h["caps"].contains("max_edges"));
  std::getline(in, line);
  EXPECT_EQ(line, R"({"e":"reveal","v":1})");
  std::string last;
  while (std::getline(in, line)) {
    if (!line.empty()) last = line;
  }
  EXPECT_EQ(last, R"({"e":"win","color":1,"clique":[1,2,3]})");
}

TEST(Transcript, BitExactRoundTrip) {
  for (const auto& mc : property_cases()) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      auto b = make_builder(mc.builder, mc.params);
      RandomPainter p(mc.params, seed);
      MatchResult r = run_match(*b, p, ResourceCaps{});
      r.transcript.builder = mc.builder;
      r.transcript.painter = p.name();
      const std::string text = transcript_to_string(r.transcript);
      Transcript back = transcript_from_string(text);
      EXPECT_EQ(back, r.transcript);
      EXPECT_EQ(transcript_to_string(back), text);
    }
  }
}

TEST(Transcript, ParseErrorsNameTheLine) {
  TreeBuilder b(k2_33);
  ConstantPainter red(k2_33, 1);
  std::string text = transcript_to_string(run_match(b, red, ResourceCaps{}).transcript);
  text += "{\"e\":\"teleport\"}\n";
  try {
    transcript_from_string(text);
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("line"), std::string::npos) << e.what();
  }
  EXPECT_THROW(transcript_from_string(""), std::runtime_error);
  EXPECT_THROW(transcript_from_string("{\"format_version\":2,\"k\":2,\"q\":1,\"targets\":[2]}\n"),
               std::runtime_error);
}

TEST(Transcript, ReplayRejectsIllegalHistory) {
  TreeBuilder b(k2_33);
  ConstantPainter red(k2_33, 1);
  Transcript t = run_match(b, red, ResourceCaps{}).transcript;
  // swap a build's edge for one that misses the current vertex
  for (auto& ev : t.events) {
    if (auto* bd = std::get_if<event::Build>(&ev); bd && bd->edge.max_vertex() == 3) {
      bd->edge = make_edge({1, 2}, 2);
      break;
    }
  }
  EXPECT_ANY_THROW(replay_transcript(t));
}

TEST(RunMatch, FalseWinDeclarationIsALogicError) {
  class Liar final : public BuilderStrategy {
   public:
    explicit Liar(GameParams p) : p_(std::move(p)) {}
    std::string name() const override { return "liar"; }
    const GameParams& params() const override { return p_; }
    Budget budget() const override { return {TowerExpr(2), TowerExpr(1)}; }
    void on_reveal(VertexId v) override { v_ = v; }
    BuilderAction next_action() override {
      if (v_ == 2 && !built_) return BuildEdge{make_edge({1, 2}, 2)};
      return EndRound{};
    }
    void on_color(const Edge&, Color) override { built_ = true; }
    std::optional<MonoClique> declared_win() const override {
      if (!built_) return std::nullopt;
      return MonoClique{1, {1, 2, 3}};
    }
    std::unique_ptr<BuilderStrategy> fresh() const override { return std::make_unique<Liar>(p_); }

   private:
    GameParams p_;
    VertexId v_ = 0;
    bool built_ = false;
  } liar(k2_33);
  ConstantPainter red(k2_33, 1);
  EXPECT_THROW(run_match(liar, red, ResourceCaps{}), std::logic_error);
}
