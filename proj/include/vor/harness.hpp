#pragma once

// Verification of finished matches from their serialized artifacts alone:
// rule legality, the recursive builder's label bookkeeping, and budgets.
// Campaigns run a grid of matches and write transcripts plus reports.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vor/builders.hpp"
#include "vor/engine.hpp"
#include "vor/strategy.hpp"

namespace vor {

struct Violation {
  std::string message;
  /// 0-based event index the violation points at, if any.
  std::optional<std::size_t> event;
  /// Minimal reproducing excerpt (the offending event lines or state fields).
  nlohmann::ordered_json excerpt;
};

struct CheckResult {
  std::string name;
  std::vector<Violation> violations;
  bool pass() const { return violations.empty(); }
  nlohmann::ordered_json to_json() const;
};

namespace checks {
inline constexpr const char* kLegality = "legality";
inline constexpr const char* kInjectivity = "injectivity";
inline constexpr const char* kPrefix = "r_prefix";
inline constexpr const char* kCoherence = "color_coherence";
inline constexpr const char* kEndgame = "endgame_lift";
inline constexpr const char* kLetterEdge = "letter_edge";
inline constexpr const char* kBudgets = "budgets";
}  // namespace checks

/// Re-checks every rule from the transcript alone: consecutive reveals, edge
/// shape and max vertex, duplicates, the mandatory-edge rule, colors, caps,
/// and that the Win event appears exactly when the first target clique does.
CheckResult check_transcript_legal(const Transcript& t);

/// The five recursive-builder checks, in order: injectivity, R-prefix,
/// color coherence, endgame lift, letter-edge bijection.
std::vector<CheckResult> check_recursive_invariants(const Transcript& t, const LabelledState& s);

struct BudgetUse {
  std::int64_t vertices_used = 0;
  std::int64_t edges_used = 0;
  TowerExpr vertices_declared;
  TowerExpr edges_declared;
};
CheckResult check_budgets(const Transcript& t, const Budget& declared, BudgetUse* use = nullptr);

struct VerificationReport {
  std::string match_id;
  std::string outcome;
  CheckResult legality;
  std::vector<CheckResult> structural;  // empty unless a labelled state was supplied
  std::optional<BudgetUse> budget_use;
  std::optional<CheckResult> budgets;
  std::string error;  // set when the match itself could not complete

  bool pass() const;
  nlohmann::ordered_json to_json() const;
  friend bool operator==(const VerificationReport& a, const VerificationReport& b) {
    return a.to_json() == b.to_json();
  }
};

/// Outcome string of a transcript: "won: ...", "aborted: ...", or "unfinished".
std::string transcript_outcome(const Transcript& t);

VerificationReport verify_match(const std::string& id, const Transcript& t,
                                const std::optional<LabelledState>& state,
                                const std::optional<Budget>& declared);

// --- fault injection -------------------------------------------------------

struct Mutant {
  std::string name;
  std::string target_check;  // which check must reject it
  Transcript transcript;
  std::optional<LabelledState> state;
};

/// Single-field corruptions of a valid match, at least one per check.
/// Classes whose precondition the match lacks (e.g. no pair to corrupt) are
/// omitted.
std::vector<Mutant> transcript_mutants(const Transcript& t);
std::vector<Mutant> state_mutants(const Transcript& t, const LabelledState& s);

/// True iff the mutant's target check fails on it.
bool mutant_detected(const Mutant& m);

// --- campaigns -------------------------------------------------------------

struct CampaignConfig {
  std::vector<GameParams> grid;
  std::vector<std::string> builders;
  /// Painter specs; a bare "random" expands to one painter per seed.
  std::vector<std::string> painters;
  std::vector<std::uint64_t> seeds;
  ResourceCaps caps;
  std::filesystem::path output_dir;
  /// Replaces every builder's declared budget (for testing the budget check).
  std::optional<Budget> budget_override;

  static CampaignConfig from_json(const nlohmann::ordered_json& j);
  static CampaignConfig load(const std::filesystem::path& file);
};

struct MatchSpec {
  std::string id;
  GameParams params;
  std::string builder;
  std::string painter;
};

struct CampaignSummary {
  std::vector<VerificationReport> reports;  // sorted by match id
  std::vector<std::string> skipped;         // "<id>: reason"
  bool all_pass() const;
  nlohmann::ordered_json to_json() const;
};

std::string match_id(const GameParams& p, const std::string& builder, const std::string& painter);
std::vector<MatchSpec> expand_matches(const CampaignConfig& cfg, std::vector<std::string>* skipped);

struct MatchArtifacts {
  Transcript transcript;
  std::optional<LabelledState> state;
  VerificationReport report;
};

/// Plays one match and verifies it from its serialized form.
MatchArtifacts run_and_verify(const MatchSpec& spec, const ResourceCaps& caps,
                              const std::optional<Budget>& budget_override = std::nullopt);

/// Runs every match (OpenMP across matches when `parallel`), writes
/// <id>.transcript.jsonl, <id>.state.json (recursive builders), <id>.report.json
/// and summary.json under output_dir.
CampaignSummary run_campaign(const CampaignConfig& cfg, bool parallel = true);

/// Re-verifies every transcript in a campaign directory against its stored
/// report. A report passes only if it re-derives identically and passes.
CampaignSummary verify_directory(const std::filesystem::path& dir);

}  // namespace vor
