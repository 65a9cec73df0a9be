#pragma once

// Round-structured game state machine and verifiable match transcripts.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "vor/core.hpp"
#include "vor/strategy.hpp"

namespace vor {

/// A move the rules forbid. `rule()` states the rule that was broken.
class RuleViolation : public std::logic_error {
 public:
  RuleViolation(const std::string& what, std::string rule)
      : std::logic_error(what), rule_(std::move(rule)) {}
  const std::string& rule() const { return rule_; }

 private:
  std::string rule_;
};

namespace rules {
inline constexpr const char* kMaxVertex =
    "every edge built in round i must have v_i as its largest vertex";
inline constexpr const char* kRevealed = "edges may only use vertices revealed so far";
inline constexpr const char* kDuplicate = "an edge can be built at most once";
inline constexpr const char* kMandatory =
    "in every round i >= k the builder must build at least one new edge";
inline constexpr const char* kGameOver = "no moves are accepted after the game has ended";
}  // namespace rules

struct ResourceCaps {
  std::int64_t max_edges = 1'000'000;
  std::int64_t max_vertices = 1'000'000;
  bool mandatory_edge_rule = true;

  void validate() const;
  bool operator==(const ResourceCaps&) const = default;
};

enum class AbortReason { kEdgeCap, kVertexCap, kBuilderConceded };
std::string to_string(AbortReason r);
AbortReason abort_reason_from_string(const std::string& s);

struct GameStatus {
  enum class Kind { kOngoing, kWon, kAborted };
  Kind kind = Kind::kOngoing;
  std::optional<MonoClique> clique;      // set when kWon
  std::optional<AbortReason> abort_reason;  // set when kAborted

  bool won() const { return kind == Kind::kWon; }
  bool aborted() const { return kind == Kind::kAborted; }
  bool ongoing() const { return kind == Kind::kOngoing; }
  std::string describe() const;
  bool operator==(const GameStatus&) const = default;
};

namespace event {
struct Reveal {
  VertexId vertex;
  bool operator==(const Reveal&) const = default;
};
struct Build {
  Edge edge;
  Color color;
  bool operator==(const Build&) const = default;
};
struct RoundEnd {
  int round;
  bool operator==(const RoundEnd&) const = default;
};
struct Win {
  MonoClique clique;
  bool operator==(const Win&) const = default;
};
struct Abort {
  AbortReason reason;
  bool operator==(const Abort&) const = default;
};
}  // namespace event

using GameEvent = std::variant<event::Reveal, event::Build, event::RoundEnd, event::Win, event::Abort>;

struct Transcript {
  GameParams params;
  ResourceCaps caps;
  std::string builder;  // strategy spec, empty if unknown
  std::string painter;  // painter spec, empty if unknown
  std::vector<GameEvent> events;

  std::size_t build_count() const;
  int vertex_count() const;
  /// Builds in order.
  std::vector<event::Build> builds() const;
  bool operator==(const Transcript&) const = default;
};

nlohmann::ordered_json event_to_json(const GameEvent& ev);
GameEvent event_from_json(const nlohmann::ordered_json& j, int k);

/// JSON-lines: one header line, then one event per line.
void write_transcript(std::ostream& os, const Transcript& t);
std::string transcript_to_string(const Transcript& t);
/// Throws std::runtime_error with the offending line number on bad input.
Transcript read_transcript(std::istream& is);
Transcript transcript_from_string(const std::string& s);

class GameState {
 public:
  GameState(GameParams params, ResourceCaps caps);

  const GameParams& params() const { return graph_.params(); }
  const ResourceCaps& caps() const { return transcript_.caps; }
  const ColoredHypergraph& graph() const { return graph_; }
  const GameStatus& status() const { return status_; }
  const Transcript& transcript() const { return transcript_; }
  Transcript& transcript() { return transcript_; }

  int current_round() const { return graph_.revealed(); }
  int builds_this_round() const { return builds_this_round_; }
  bool round_open() const { return round_open_; }

  /// Closes the open round (if any) and reveals the next vertex. Returns
  /// nullopt when the vertex cap aborts the game. Throws RuleViolation when
  /// the closing round broke the mandatory-edge rule.
  std::optional<VertexId> reveal();

  /// Builds `edge`, asks the painter for its color and runs win detection.
  /// Returns nullopt when the edge cap aborts the game.
  std::optional<Color> build(const Edge& edge, PainterStrategy& painter);

  /// Throws RuleViolation without touching state if `edge` is not legal now.
  void check_legal(const Edge& edge) const;

  void end_round();
  void abort(AbortReason reason);

 private:
  void require_ongoing() const;

  ColoredHypergraph graph_;
  Transcript transcript_;
  GameStatus status_;
  bool round_open_ = false;
  int builds_this_round_ = 0;
  std::int64_t total_builds_ = 0;
};

struct MatchResult {
  Transcript transcript;
  GameStatus status;
};

/// Plays builder against painter until a win or a cap abort. Throws
/// std::logic_error if the builder declares a win the engine cannot confirm.
MatchResult run_match(BuilderStrategy& builder, PainterStrategy& painter, const ResourceCaps& caps);

/// Answers from a recorded list of builds; throws if queried out of order.
class ReplayPainter : public PainterStrategy {
 public:
  explicit ReplayPainter(std::vector<event::Build> builds) : builds_(std::move(builds)) {}
  std::string name() const override { return "replay"; }
  Color paint(const Edge& edge, const ColoredHypergraph& g) override;
  std::size_t consumed() const { return next_; }

 private:
  std::vector<event::Build> builds_;
  std::size_t next_ = 0;
};

/// Re-executes the transcript's events against a fresh engine and returns
/// the resulting state. Throws RuleViolation / std::runtime_error when the
/// transcript is not a legal game.
GameState replay_transcript(const Transcript& t);

}  // namespace vor
