#include "vor/engine.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace vor {

using ojson = nlohmann::ordered_json;

void ResourceCaps::validate() const {
  if (max_edges <= 0 || max_vertices <= 0) throw InvalidParams("resource caps must be positive");
}

std::string to_string(AbortReason r) {
  switch (r) {
    case AbortReason::kEdgeCap: return "edge_cap";
    case AbortReason::kVertexCap: return "vertex_cap";
    case AbortReason::kBuilderConceded: return "builder_conceded";
  }
  return "unknown";
}

AbortReason abort_reason_from_string(const std::string& s) {
  if (s == "edge_cap") return AbortReason::kEdgeCap;
  if (s == "vertex_cap") return AbortReason::kVertexCap;
  if (s == "builder_conceded") return AbortReason::kBuilderConceded;
  throw std::runtime_error("unknown abort reason '" + s + "'");
}

std::string GameStatus::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::kOngoing: os << "ongoing"; break;
    case Kind::kWon: {
      os << "won: color " << clique->color << " clique {";
      for (std::size_t i = 0; i < clique->vertices.size(); ++i) {
        os << (i ? "," : "") << clique->vertices[i];
      }
      os << "}";
      break;
    }
    case Kind::kAborted: os << "aborted: " << to_string(*abort_reason); break;
  }
  return os.str();
}

std::size_t Transcript::build_count() const {
  std::size_t n = 0;
  for (const auto& e : events) n += std::holds_alternative<event::Build>(e);
  return n;
}

int Transcript::vertex_count() const {
  int n = 0;
  for (const auto& e : events) n += std::holds_alternative<event::Reveal>(e);
  return n;
}

std::vector<event::Build> Transcript::builds() const {
  std::vector<event::Build> out;
  for (const auto& e : events) {
    if (auto* b = std::get_if<event::Build>(&e)) out.push_back(*b);
  }
  return out;
}

// --- serialization -------------------------------------------------------

namespace {

ojson header_json(const Transcript& t) {
  ojson h;
  h["format_version"] = 1;
  h["k"] = t.params.uniformity;
  h["q"] = t.params.colors();
  h["targets"] = t.params.targets;
  h["caps"] = {{"max_edges", t.caps.max_edges},
               {"max_vertices", t.caps.max_vertices},
               {"mandatory_edge_rule", t.caps.mandatory_edge_rule}};
  if (!t.builder.empty()) h["builder"] = t.builder;
  if (!t.painter.empty()) h["painter"] = t.painter;
  h["rng"] = "mt19937_64";
  return h;
}

ojson event_json(const GameEvent& ev) {
  return std::visit(
      [](const auto& e) -> ojson {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, event::Reveal>) {
          return {{"e", "reveal"}, {"v", e.vertex}};
        } else if constexpr (std::is_same_v<T, event::Build>) {
          return {{"e", "build"}, {"edge", e.edge.to_vector()}, {"color", e.color}};
        } else if constexpr (std::is_same_v<T, event::RoundEnd>) {
          return {{"e", "round_end"}, {"round", e.round}};
        } else if constexpr (std::is_same_v<T, event::Win>) {
          return {{"e", "win"}, {"color", e.clique.color}, {"clique", e.clique.vertices}};
        } else {
          return {{"e", "abort"}, {"reason", to_string(e.reason)}};
        }
      },
      ev);
}

GameEvent parse_event(const ojson& j, int k) {
  const std::string kind = j.at("e").get<std::string>();
  if (kind == "reveal") return event::Reveal{j.at("v").get<int>()};
  if (kind == "build") {
    auto v = j.at("edge").get<std::vector<int>>();
    return event::Build{make_edge(v, k), j.at("color").get<int>()};
  }
  if (kind == "round_end") return event::RoundEnd{j.at("round").get<int>()};
  if (kind == "win") {
    return event::Win{MonoClique{j.at("color").get<int>(), j.at("clique").get<std::vector<int>>()}};
  }
  if (kind == "abort") return event::Abort{abort_reason_from_string(j.at("reason").get<std::string>())};
  throw std::runtime_error("unknown event kind '" + kind + "'");
}

}  // namespace

void write_transcript(std::ostream& os, const Transcript& t) {
  os << header_json(t).dump() << '\n';
  for (const auto& ev : t.events) os << event_json(ev).dump() << '\n';
}

std::string transcript_to_string(const Transcript& t) {
  std::ostringstream os;
  write_transcript(os, t);
  return os.str();
}

Transcript read_transcript(std::istream& is) {
  Transcript t;
  std::string line;
  int lineno = 0;
  bool have_header = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      ojson j = ojson::parse(line);
      if (!have_header) {
        if (j.at("format_version").get<int>() != 1) {
          throw std::runtime_error("unsupported format_version");
        }
        t.params.uniformity = j.at("k").get<int>();
        t.params.targets = j.at("targets").get<std::vector<int>>();
        if (j.at("q").get<int>() != t.params.colors()) {
          throw std::runtime_error("q does not match the number of targets");
        }
        t.params.validate();
        const auto& caps = j.at("caps");
        t.caps.max_edges = caps.at("max_edges").get<std::int64_t>();
        t.caps.max_vertices = caps.at("max_vertices").get<std::int64_t>();
        t.caps.mandatory_edge_rule = caps.at("mandatory_edge_rule").get<bool>();
        if (j.contains("builder")) t.builder = j["builder"].get<std::string>();
        if (j.contains("painter")) t.painter = j["painter"].get<std::string>();
        have_header = true;
      } else {
        t.events.push_back(parse_event(j, t.params.uniformity));
      }
    } catch (const std::exception& ex) {
      throw std::runtime_error("transcript line " + std::to_string(lineno) + ": " + ex.what());
    }
  }
  if (!have_header) throw std::runtime_error("transcript has no header line");
  return t;
}

Transcript transcript_from_string(const std::string& s) {
  std::istringstream is(s);
  return read_transcript(is);
}

// --- game state ------------------------------------------------------------

GameState::GameState(GameParams params, ResourceCaps caps) : graph_(params) {
  params.validate();
  caps.validate();
  transcript_.params = std::move(params);
  transcript_.caps = caps;
}

void GameState::require_ongoing() const {
  if (!status_.ongoing()) throw RuleViolation("game is over (" + status_.describe() + ")", rules::kGameOver);
}

std::optional<VertexId> GameState::reveal() {
  require_ongoing();
  if (round_open_) end_round();
  if (graph_.revealed() >= caps().max_vertices) {
    abort(AbortReason::kVertexCap);
    return std::nullopt;
  }
  graph_.reveal();
  round_open_ = true;
  builds_this_round_ = 0;
  transcript_.events.emplace_back(event::Reveal{graph_.revealed()});
  return graph_.revealed();
}

void GameState::end_round() {
  require_ongoing();
  if (!round_open_) throw std::logic_error("no round is open");
  const int round = graph_.revealed();
  if (caps().mandatory_edge_rule && round >= params().uniformity && builds_this_round_ == 0) {
    throw RuleViolation("round " + std::to_string(round) + " ended without building an edge",
                        rules::kMandatory);
  }
  transcript_.events.emplace_back(event::RoundEnd{round});
  round_open_ = false;
}

void GameState::check_legal(const Edge& edge) const {
  require_ongoing();
  if (!round_open_) throw std::logic_error("no round is open");
  const int round = graph_.revealed();
  if (edge.size() != params().uniformity) {
    throw RuleViolation("edge " + edge.to_string() + " does not have " +
                            std::to_string(params().uniformity) + " vertices",
                        rules::kMaxVertex);
  }
  if (edge.max_vertex() > round) {
    throw RuleViolation("edge " + edge.to_string() + " uses unrevealed vertex " +
                            std::to_string(edge.max_vertex()),
                        rules::kRevealed);
  }
  if (edge.max_vertex() != round) {
    throw RuleViolation("edge " + edge.to_string() + " does not contain the current vertex v_" +
                            std::to_string(round),
                        rules::kMaxVertex);
  }
  if (graph_.has_edge(edge)) {
    throw RuleViolation("edge " + edge.to_string() + " was already built", rules::kDuplicate);
  }
}

std::optional<Color> GameState::build(const Edge& edge, PainterStrategy& painter) {
  check_legal(edge);
  if (total_builds_ >= caps().max_edges) {
    abort(AbortReason::kEdgeCap);
    return std::nullopt;
  }
  const Color c = painter.paint(edge, graph_);
  if (c < 1 || c > params().colors()) {
    throw std::runtime_error("painter " + painter.name() + " answered color " + std::to_string(c) +
                             " outside [1, " + std::to_string(params().colors()) + "]");
  }
  graph_.add(edge, c);
  ++builds_this_round_;
  ++total_builds_;
  transcript_.events.emplace_back(event::Build{edge, c});
  if (auto clique = find_mono_clique(graph_, edge)) {
    status_.kind = GameStatus::Kind::kWon;
    status_.clique = *clique;
    transcript_.events.emplace_back(event::Win{*clique});
  }
  return c;
}

void GameState::abort(AbortReason reason) {
  require_ongoing();
  status_.kind = GameStatus::Kind::kAborted;
  status_.abort_reason = reason;
  round_open_ = false;
  transcript_.events.emplace_back(event::Abort{reason});
}

MatchResult run_match(BuilderStrategy& builder, PainterStrategy& painter, const ResourceCaps& caps) {
  GameState state(builder.params(), caps);
  state.transcript().builder = builder.name();
  state.transcript().painter = painter.name();
  while (state.status().ongoing()) {
    auto v = state.reveal();
    if (!v) break;
    builder.on_reveal(*v);
    while (state.status().ongoing()) {
      BuilderAction action = builder.next_action();
      if (std::holds_alternative<EndRound>(action)) {
        state.end_round();
        break;
      }
      if (std::holds_alternative<Concede>(action)) {
        state.abort(AbortReason::kBuilderConceded);
        break;
      }
      const Edge& edge = std::get<BuildEdge>(action).edge;
      auto color = state.build(edge, painter);
      if (!color) break;
      builder.on_color(edge, *color);
      if (!state.status().won()) {
        if (auto claim = builder.declared_win()) {
          throw std::logic_error("builder " + builder.name() +
                                 " declared a win the engine does not confirm");
        }
      }
    }
  }
  return {state.transcript(), state.status()};
}

Color ReplayPainter::paint(const Edge& edge, const ColoredHypergraph&) {
  if (next_ >= builds_.size()) {
    throw std::runtime_error("replay: no recorded color for build of " + edge.to_string());
  }
  const auto& b = builds_[next_];
  if (!(b.edge == edge)) {
    throw std::runtime_error("replay: expected build of " + b.edge.to_string() + ", got " +
                             edge.to_string());
  }
  ++next_;
  return b.color;
}

GameState replay_transcript(const Transcript& t) {
  GameState state(t.params, t.caps);
  state.transcript().builder = t.builder;
  state.transcript().painter = t.painter;
  ReplayPainter painter(t.builds());
  for (std::size_t i = 0; i < t.events.size(); ++i) {
    const auto& ev = t.events[i];
    const std::string where = "event " + std::to_string(i + 1) + ": ";
    if (auto* r = std::get_if<event::Reveal>(&ev)) {
      auto v = state.reveal();
      if (!v || *v != r->vertex) throw std::runtime_error(where + "reveal out of sequence");
    } else if (auto* b = std::get_if<event::Build>(&ev)) {
      if (!state.build(b->edge, painter)) throw std::runtime_error(where + "build rejected by caps");
    } else if (auto* re = std::get_if<event::RoundEnd>(&ev)) {
      if (re->round != state.current_round()) throw std::runtime_error(where + "round_end mismatch");
      state.end_round();
    } else if (auto* w = std::get_if<event::Win>(&ev)) {
      // The engine appends its own Win after the winning build.
      const auto& produced = state.transcript().events;
      if (produced.size() != i + 1 || !(produced.back() == GameEvent(*w))) {
        throw std::runtime_error(where + "recorded win does not match engine detection");
      }
    } else if (auto* a = std::get_if<event::Abort>(&ev)) {
      if (!state.status().ongoing()) throw std::runtime_error(where + "abort after the game ended");
      state.abort(a->reason);
    }
  }
  return state;
}

ojson event_to_json(const GameEvent& ev) { return event_json(ev); }
GameEvent event_from_json(const ojson& j, int k) { return parse_event(j, k); }

}  // namespace vor
