// vor: simulate, play, solve, bound, verify, replay and run campaigns.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vor/bounds.hpp"
#include "vor/builders.hpp"
#include "vor/engine.hpp"
#include "vor/harness.hpp"
#include "vor/painters.hpp"
#include "vor/solver.hpp"

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;
using namespace vor;

namespace {

// Exit codes.
constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;
constexpr int kAborted = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GameFlags {
  int k = 2;
  int q = 0;
  std::string targets;
  std::int64_t max_edges = 1'000'000;
  std::int64_t max_vertices = 1'000'000;
  bool no_mandatory = false;

  void attach(CLI::App* app) {
    app->add_option("-k,--uniformity", k, "edge size k")->capture_default_str();
    app->add_option("-q,--colors", q, "number of colors (default: length of -t)");
    app->add_option("-t,--targets", targets, "comma list of clique sizes, one per color")->required();
    app->add_option("--max-edges", max_edges, "edge cap")->capture_default_str();
    app->add_option("--max-vertices", max_vertices, "vertex cap")->capture_default_str();
    app->add_flag("--no-mandatory", no_mandatory, "drop the at-least-one-edge-per-round rule");
  }

  GameParams params() const {
    GameParams p;
    p.uniformity = k;
    std::stringstream ss(targets);
    for (std::string item; std::getline(ss, item, ',');) {
      try {
        std::size_t used = 0;
        p.targets.push_back(std::stoi(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::logic_error&) {
        throw UsageError("-t: '" + item + "' is not an integer");
      }
    }
    if (q != 0 && q != p.colors()) {
      throw UsageError("-q " + std::to_string(q) + " disagrees with " + std::to_string(p.colors()) +
                       " targets given to -t");
    }
    try {
      p.validate();
    } catch (const InvalidParams& e) {
      throw UsageError(std::string("-k/-t: ") + e.what());
    }
    for (int c = 1; c <= p.colors(); ++c) {
      if (p.target(c) == k) {
        std::cerr << "warning: target of color " << c << " equals k; any edge of that color wins\n";
      }
    }
    return p;
  }

  ResourceCaps caps() const {
    ResourceCaps c;
    c.max_edges = max_edges;
    c.max_vertices = max_vertices;
    c.mandatory_edge_rule = !no_mandatory;
    try {
      c.validate();
    } catch (const std::exception& e) {
      throw UsageError(std::string("--max-edges/--max-vertices: ") + e.what());
    }
    return c;
  }
};

fs::path output_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("VOR_OUTPUT_DIR"); env && *env) return env;
  return ".";
}

void write_file(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw UsageError("cannot open " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string targets_string(const GameParams& p) {
  std::string s;
  for (int t : p.targets) s += (s.empty() ? "" : ",") + std::to_string(t);
  return s;
}

int exit_for(const GameStatus& status, bool verified) {
  if (!verified) return kCheckFailed;
  return status.aborted() ? kAborted : kOk;
}

// --- simulate ----------------------------------------------------------------

struct SimulateCmd {
  GameFlags game;
  std::string builder = "tree";
  std::string painter = "greedy";
  std::string out;
  std::string format = "text";

  int run() const {
    GameParams params = game.params();
    ResourceCaps caps = game.caps();
    std::unique_ptr<BuilderStrategy> b;
    std::unique_ptr<PainterStrategy> p;
    try {
      b = make_builder(builder, params);
    } catch (const InvalidParams& e) {
      throw UsageError(std::string("--builder: ") + e.what());
    }
    try {
      p = make_painter(painter, params, b.get());
    } catch (const InvalidParams& e) {
      throw UsageError(std::string("--painter: ") + e.what());
    }
    MatchSpec spec{match_id(params, builder, painter), params, builder, painter};
    MatchArtifacts a = run_and_verify(spec, caps);

    fs::path dir = output_dir(out);
    write_file(dir / (spec.id + ".transcript.jsonl"), transcript_to_string(a.transcript));
    write_file(dir / (spec.id + ".report.json"), a.report.to_json().dump(2) + "\n");
    if (a.state) write_file(dir / (spec.id + ".state.json"), a.state->to_json().dump(2) + "\n");

    GameState final_state = replay_transcript(a.transcript);
    const GameStatus& status = final_state.status();
    if (format == "json") {
      ojson j;
      j["format_version"] = 1;
      j["match_id"] = spec.id;
      j["outcome"] = a.report.outcome;
      j["edges"] = a.transcript.build_count();
      j["vertices"] = a.transcript.vertex_count();
      j["verified"] = a.report.pass();
      j["transcript"] = (dir / (spec.id + ".transcript.jsonl")).string();
      std::cout << j.dump(2) << "\n";
    } else {
      std::cout << spec.id << ": " << (a.report.error.empty() ? a.report.outcome : a.report.error)
                << "\n  edges " << a.transcript.build_count() << ", vertices "
                << a.transcript.vertex_count();
      if (a.report.budget_use) {
        std::cout << " (budget " << a.report.budget_use->edges_declared.to_string() << " edges, "
                  << a.report.budget_use->vertices_declared.to_string() << " vertices)";
      }
      std::cout << "\n  verification " << (a.report.pass() ? "passed" : "FAILED") << "\n  transcript "
                << (dir / (spec.id + ".transcript.jsonl")).string() << "\n";
    }
    if (!a.report.error.empty()) return kCheckFailed;
    return exit_for(status, a.report.pass());
  }
};

// --- play --------------------------------------------------------------------

std::optional<std::string> prompt(const std::string& text) {
  std::cout << text << std::flush;
  std::string line;
  if (!std::getline(std::cin, line)) return std::nullopt;
  return line;
}

struct InputEnded {};

class HumanPainter final : public PainterStrategy {
 public:
  explicit HumanPainter(int q) : q_(q) {}
  std::string name() const override { return "human"; }
  Color paint(const Edge& edge, const ColoredHypergraph&) override {
    for (;;) {
      auto line = prompt("builder draws " + edge.to_string() + "; color [1-" + std::to_string(q_) + "]: ");
      if (!line) throw InputEnded{};
      try {
        std::size_t used = 0;
        int c = std::stoi(*line, &used);
        if (used == line->size() && c >= 1 && c <= q_) return c;
      } catch (const std::logic_error&) {
      }
      std::cout << "  please answer with a color between 1 and " << q_ << "\n";
    }
  }

 private:
  int q_;
};

struct PlayCmd {
  GameFlags game;
  std::string role = "painter";
  std::string builder = "tree";
  std::string painter = "greedy";
  std::string out;

  int run() const {
    GameParams params = game.params();
    ResourceCaps caps = game.caps();
    if (role != "painter" && role != "builder") throw UsageError("--role: expected painter or builder");
    Transcript t;
    try {
      t = role == "painter" ? play_as_painter(params, caps) : play_as_builder(params, caps);
    } catch (const InputEnded&) {
      std::cout << "\ninput ended; match abandoned\n";
      return kAborted;
    }
    GameState final_state = replay_transcript(t);
    std::cout << final_state.status().describe() << " after " << t.build_count() << " edges on "
              << t.vertex_count() << " vertices\n";
    fs::path file = output_dir(out) / ("play_" + match_id(params, t.builder, t.painter) + ".transcript.jsonl");
    write_file(file, transcript_to_string(t));
    std::cout << "transcript " << file.string() << "\n";
    return final_state.status().aborted() ? kAborted : kOk;
  }

  Transcript play_as_painter(const GameParams& params, const ResourceCaps& caps) const {
    std::unique_ptr<BuilderStrategy> b;
    try {
      b = make_builder(builder, params);
    } catch (const InvalidParams& e) {
      throw UsageError(std::string("--builder: ") + e.what());
    }
    HumanPainter human(params.colors());
    MatchResult r = run_match(*b, human, caps);
    r.transcript.builder = builder;
    r.transcript.painter = "human";
    return r.transcript;
  }

  Transcript play_as_builder(const GameParams& params, const ResourceCaps& caps) const {
    std::unique_ptr<PainterStrategy> p;
    try {
      p = make_painter(painter, params);
    } catch (const InvalidParams& e) {
      throw UsageError(std::string("--painter: ") + e.what());
    }
    const int k = params.uniformity;
    GameState state(params, caps);
    state.transcript().builder = "human";
    state.transcript().painter = painter;
    std::cout << "enter " << k << " vertices per edge (e.g. '1 2 ... " << k
              << "'), 'end' to close the round, 'quit' to resign\n";
    while (state.status().ongoing()) {
      auto v = state.reveal();
      if (!v) break;
      while (state.status().ongoing()) {
        auto line = prompt("round " + std::to_string(*v) + "> ");
        if (!line || *line == "quit") {
          state.abort(AbortReason::kBuilderConceded);
          break;
        }
        if (*line == "end") {
          if (caps.mandatory_edge_rule && *v >= k && state.builds_this_round() == 0) {
            std::cout << "  rejected: rule: " << rules::kMandatory << "\n";
            continue;
          }
          state.end_round();
          break;
        }
        std::vector<int> verts;
        std::stringstream ss(*line);
        for (int x; ss >> x;) verts.push_back(x);
        if (!ss.eof() || verts.empty()) {
          std::cout << "  expected " << k << " vertex numbers, 'end' or 'quit'\n";
          continue;
        }
        try {
          Edge e = make_edge(std::span<const int>(verts), k);
          state.check_legal(e);
          auto c = state.build(e, *p);
          if (c) std::cout << "  " << e.to_string() << " is painted " << *c << "\n";
        } catch (const RuleViolation& e) {
          std::cout << "  rejected: " << e.what() << "\n  rule: " << e.rule() << "\n";
        } catch (const InvalidEdge& e) {
          std::cout << "  rejected: " << e.what() << "\n";
        }
      }
    }
    return state.transcript();
  }
};

// --- solve -------------------------------------------------------------------

struct SolveCmd {
  GameFlags game;
  std::string mode = "online";
  std::int64_t max_nodes = 200'000'000;
  bool generic = false;
  bool parallel = false;
  std::string format = "text";

  int run() const {
    GameParams params = game.params();
    SearchCaps caps;
    caps.max_nodes = max_nodes;
    caps.mandatory_edge_rule = !game.no_mandatory;
    SolveResult r;
    if (mode == "classical") {
      ArrowsOptions opt;
      opt.caps = caps;
      opt.parallel = parallel;
      r = classical_ramsey_number(params, opt);
    } else if (mode == "online") {
      r = OnlineSolver(params, caps, generic).solve();
    } else {
      throw UsageError("--mode: expected classical or online");
    }
    if (format == "json") {
      std::cout << r.to_json().dump(2) << "\n";
    } else if (r.value) {
      std::cout << *r.value << "\n";
    } else {
      std::cout << "inconclusive: " << r.lower << " <= value"
                << (r.upper ? " <= " + std::to_string(*r.upper) : std::string()) << " (" << r.nodes
                << " nodes)\n";
    }
    return kOk;
  }
};

// --- bounds ------------------------------------------------------------------

struct Range {
  int lo, hi;
};

Range parse_range(const std::string& key, const std::string& text) {
  auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      int v = std::stoi(text);
      return {v, v};
    }
    Range r{std::stoi(text.substr(0, dots)), std::stoi(text.substr(dots + 2))};
    if (r.lo > r.hi) throw UsageError("--grid: empty range for " + key + ": '" + text + "'");
    return r;
  } catch (const std::logic_error&) {
    throw UsageError("--grid: bad range for " + key + ": '" + text + "'");
  }
}

struct BoundsCmd {
  std::string grid = "k=3,t=4..5";
  std::string format = "csv";
  std::int64_t oracle_nodes = 100'000;

  std::vector<GameParams> expand() const {
    Range k{2, 2}, t{3, 3}, q{2, 2};
    std::stringstream ss(grid);
    for (std::string item; std::getline(ss, item, ',');) {
      auto eq = item.find('=');
      if (eq == std::string::npos) throw UsageError("--grid: expected key=value, got '" + item + "'");
      std::string key = item.substr(0, eq);
      Range r = parse_range(key, item.substr(eq + 1));
      if (key == "k") k = r;
      else if (key == "t") t = r;
      else if (key == "q") q = r;
      else throw UsageError("--grid: unknown key '" + key + "' (use k, q, t)");
    }
    if (k.lo < 2 || q.lo < 1 || t.lo < 2) throw UsageError("--grid: need k >= 2, q >= 1, t >= 2");
    if (k.hi > 64 || q.hi > 16 || t.hi > 64) throw UsageError("--grid: ranges too large (k, t <= 64, q <= 16)");
    std::vector<GameParams> out;
    for (int kk = k.lo; kk <= k.hi; ++kk) {
      for (int qq = q.lo; qq <= q.hi; ++qq) {
        // non-decreasing target tuples from the t range
        std::vector<int> cur(static_cast<std::size_t>(qq), t.lo);
        for (;;) {
          GameParams p{kk, cur};
          try {
            p.validate();
            out.push_back(p);
          } catch (const InvalidParams&) {
          }
          int i = qq - 1;
          while (i >= 0 && cur[static_cast<std::size_t>(i)] == t.hi) --i;
          if (i < 0) break;
          int v = cur[static_cast<std::size_t>(i)] + 1;
          for (int j = i; j < qq; ++j) cur[static_cast<std::size_t>(j)] = v;
        }
      }
    }
    return out;
  }

  // r_{k-1}(targets - 1) by exhaustive search, when small enough.
  std::optional<BigNat> lower_ramsey(const GameParams& p) const {
    if (p.uniformity < 3) return std::nullopt;
    ArrowsOptions opt;
    opt.caps.max_nodes = oracle_nodes;
    GameParams down = p.stepped_down();
    try {
      down.validate();
    } catch (const InvalidParams&) {
      return std::nullopt;
    }
    SolveResult r = classical_ramsey_number(down, opt);
    if (!r.value) return std::nullopt;
    return BigNat(static_cast<unsigned long>(*r.value));
  }

  int run() const {
    const std::vector<std::string> cols = {"k",
                                           "q",
                                           "targets",
                                           "tree_vertices",
                                           "tree_edges",
                                           "cfs_vertex_online",
                                           "cfs_r3",
                                           "chain_m",
                                           "theorem_vertices",
                                           "theorem_edges",
                                           "iterated_chain",
                                           "ramsey_lower_uniformity",
                                           "stepping_down",
                                           "trivial_online_upper"};
    ojson rows = ojson::array();
    for (const GameParams& p : expand()) {
      ojson row;
      for (const auto& c : cols) row[c] = nullptr;
      row["k"] = p.uniformity;
      row["q"] = p.colors();
      row["targets"] = targets_string(p);
      const int k = p.uniformity;
      const auto q = static_cast<unsigned long>(p.colors());
      if (k == 2) {
        row["tree_vertices"] = to_decimal(tree_vertex_budget(p.targets));
        row["tree_edges"] = to_decimal(tree_edge_budget(p.targets));
        if (q == 2 && p.targets[0] >= 3 && p.targets[1] >= 3) {
          row["cfs_vertex_online"] = to_decimal(cfs_vertex_online_bound(p.targets[0], p.targets[1]));
        }
      }
      if (k == 3 && q == 2 && p.targets[0] >= 4 && p.targets[1] >= 4) {
        row["cfs_r3"] = cfs_r3_bound(p.targets[0], p.targets[1]).to_json();
      }
      bool chain_ok = k >= 3;
      for (int t : p.targets) chain_ok = chain_ok && t >= k + 1;
      if (chain_ok) {
        try {
          // m for the last step: the chain one level down
          TowerExpr m;
          if (k == 3) {
            std::vector<int> base;
            for (int t : p.targets) base.push_back(t - 1);
            m = TowerExpr(tree_edge_budget(base));
          } else {
            std::vector<int> base;
            for (int t : p.targets) base.push_back(t - (k - 2));
            m = TowerExpr(tree_edge_budget(base));
            for (int j = 3; j < k; ++j) m = TowerExpr::scaled_power(q, m);
          }
          row["chain_m"] = m.to_json();
          row["theorem_vertices"] = theorem_vertex_bound(q, m, k).to_json();
          row["theorem_edges"] = theorem_edge_bound(q, m).to_json();
          row["iterated_chain"] = iterated_chain_bound(k, p.targets).to_json();
        } catch (const std::domain_error&) {
          // beyond what the symbolic form can hold
        }
      }
      if (auto r = lower_ramsey(p)) {
        row["ramsey_lower_uniformity"] = to_decimal(*r);
        row["stepping_down"] = stepping_down_bound(k, *r).to_json();
      }
      if (k == 2) {
        ArrowsOptions opt;
        opt.caps.max_nodes = oracle_nodes;
        SolveResult r = classical_ramsey_number(p, opt);
        if (r.value) row["trivial_online_upper"] = to_decimal(trivial_online_upper(BigNat(static_cast<unsigned long>(*r.value)), k));
      }
      rows.push_back(row);
    }
    if (format == "json") {
      ojson j;
      j["format_version"] = 1;
      j["grid"] = grid;
      j["rows"] = rows;
      std::cout << j.dump(2) << "\n";
    } else if (format == "csv") {
      std::cout << "# format_version=1\n";
      for (std::size_t i = 0; i < cols.size(); ++i) std::cout << (i ? "," : "") << cols[i];
      std::cout << "\n";
      for (const auto& row : rows) {
        for (std::size_t i = 0; i < cols.size(); ++i) {
          const auto& v = row[cols[i]];
          std::string cell;
          if (v.is_null()) cell = "";
          else if (v.is_string()) cell = v.get<std::string>();
          else if (v.is_object()) {
            TowerExpr x = TowerExpr::from_json(v);
            cell = x.is_concrete() ? to_decimal(x.value()) : x.to_string();
          }
          else cell = v.dump();
          if (cell.find(',') != std::string::npos) cell = "\"" + cell + "\"";
          std::cout << (i ? "," : "") << cell;
        }
        std::cout << "\n";
      }
    } else {
      throw UsageError("--format: expected csv or json");
    }
    return kOk;
  }
};

// --- verify / replay / campaign ----------------------------------------------

void print_summary(const CampaignSummary& s, const std::string& format) {
  if (format == "json") {
    std::cout << s.to_json().dump(2) << "\n";
    return;
  }
  int failed = 0;
  for (const auto& r : s.reports) {
    if (!r.pass()) {
      ++failed;
      std::cout << "FAIL " << r.match_id << ": " << (r.error.empty() ? r.outcome : r.error) << "\n";
    }
  }
  for (const auto& sk : s.skipped) std::cout << "skipped " << sk << "\n";
  std::cout << s.reports.size() << " matches, " << failed << " failed, " << s.skipped.size()
            << " skipped\n";
}

struct VerifyCmd {
  std::string dir;
  std::string transcript;
  std::string state;
  std::string format = "text";

  int run() const {
    if (dir.empty() == transcript.empty()) throw UsageError("verify: give exactly one of --dir or --transcript");
    if (!dir.empty()) {
      if (!fs::is_directory(dir)) throw UsageError("--dir: " + dir + " is not a directory");
      CampaignSummary s = verify_directory(dir);
      print_summary(s, format);
      return s.all_pass() ? kOk : kCheckFailed;
    }
    Transcript t;
    try {
      t = transcript_from_string(read_file(transcript));
    } catch (const std::runtime_error& e) {
      if (dynamic_cast<const UsageError*>(&e)) throw;
      throw UsageError(std::string("--transcript: ") + e.what());
    }
    std::optional<LabelledState> ls;
    if (!state.empty()) ls = LabelledState::from_json(ojson::parse(read_file(state)));
    std::optional<Budget> budget;
    try {
      if (!t.builder.empty()) budget = make_builder(t.builder, t.params)->budget();
    } catch (const std::exception&) {
    }
    VerificationReport r = verify_match(fs::path(transcript).stem().string(), t, ls, budget);
    if (format == "json") {
      std::cout << r.to_json().dump(2) << "\n";
    } else {
      std::cout << r.match_id << ": " << r.outcome << "\n";
      auto show = [](const CheckResult& c) {
        std::cout << "  " << c.name << ": " << (c.pass() ? "pass" : "FAIL") << "\n";
        for (const auto& v : c.violations) std::cout << "    " << v.message << "\n";
      };
      show(r.legality);
      for (const auto& c : r.structural) show(c);
      if (r.budgets) show(*r.budgets);
    }
    return r.pass() ? kOk : kCheckFailed;
  }
};

struct ReplayCmd {
  std::string transcript;
  std::string format = "text";

  int run() const {
    Transcript t;
    try {
      t = transcript_from_string(read_file(transcript));
    } catch (const std::runtime_error& e) {
      if (dynamic_cast<const UsageError*>(&e)) throw;
      throw UsageError(std::string("--transcript: ") + e.what());
    }
    GameState s = replay_transcript(t);
    const bool identical = s.transcript() == t;
    if (format == "json") {
      ojson j;
      j["format_version"] = 1;
      j["status"] = s.status().describe();
      j["edges"] = s.transcript().build_count();
      j["vertices"] = s.transcript().vertex_count();
      j["identical"] = identical;
      std::cout << j.dump(2) << "\n";
    } else {
      for (const auto& ev : s.transcript().events) std::cout << event_to_json(ev).dump() << "\n";
      std::cout << s.status().describe() << "; replay " << (identical ? "identical" : "DIFFERS") << "\n";
    }
    return identical ? exit_for(s.status(), true) : kCheckFailed;
  }
};

struct CampaignCmd {
  std::string config;
  std::string out;
  bool serial = false;
  std::string format = "text";

  int run() const {
    CampaignConfig cfg;
    try {
      cfg = CampaignConfig::from_json(ojson::parse(read_file(config)));
    } catch (const nlohmann::json::exception& e) {
      throw UsageError(std::string("--config: ") + e.what());
    } catch (const InvalidParams& e) {
      throw UsageError(std::string("--config: ") + e.what());
    }
    if (!out.empty()) {
      cfg.output_dir = out;
    } else if (const char* env = std::getenv("VOR_OUTPUT_DIR"); env && *env && cfg.output_dir == "campaign-out") {
      cfg.output_dir = env;
    }
    CampaignSummary s = run_campaign(cfg, !serial);
    print_summary(s, format);
    std::cerr << "summary " << (cfg.output_dir / "summary.json").string() << "\n";
    return s.all_pass() ? kOk : kCheckFailed;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vertex online Ramsey games: strategies, oracles, bounds and verification"};
  app.require_subcommand(1);

  SimulateCmd sim;
  auto* s = app.add_subcommand("simulate", "play one match and verify it");
  sim.game.attach(s);
  s->add_option("--builder", sim.builder, "clique:n | tree | recursive")->capture_default_str();
  s->add_option("--painter", sim.painter, "constant:c | random:seed | greedy | minimax | replay:file")
      ->capture_default_str();
  s->add_option("-o,--out", sim.out, "output directory (default $VOR_OUTPUT_DIR or .)");
  s->add_option("--format", sim.format, "text | json")->check(CLI::IsMember({"text", "json"}));

  PlayCmd play;
  auto* p = app.add_subcommand("play", "interactive match on stdin");
  play.game.attach(p);
  p->add_option("--role", play.role, "painter | builder (the side you play)")->capture_default_str();
  p->add_option("--builder", play.builder, "opponent builder when you paint")->capture_default_str();
  p->add_option("--painter", play.painter, "opponent painter when you build")->capture_default_str();
  p->add_option("-o,--out", play.out, "output directory");

  SolveCmd solve;
  auto* so = app.add_subcommand("solve", "exact small-case values");
  solve.game.attach(so);
  so->add_option("--mode", solve.mode, "classical | online")->capture_default_str();
  so->add_option("--max-nodes", solve.max_nodes, "search node cap")->capture_default_str();
  so->add_flag("--generic", solve.generic, "online: skip the bitmask fast path");
  so->add_flag("--parallel", solve.parallel, "classical: OpenMP over search prefixes");
  so->add_option("--format", solve.format, "text | json")->check(CLI::IsMember({"text", "json"}));

  BoundsCmd bounds;
  auto* bo = app.add_subcommand("bounds", "bound formulas over a parameter grid");
  bo->add_option("--grid", bounds.grid, "e.g. k=3,t=4..6 (keys k, q, t; ranges a..b)")->capture_default_str();
  bo->add_option("--format", bounds.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  bo->add_option("--oracle-nodes", bounds.oracle_nodes, "node cap for the Ramsey oracle columns")
      ->capture_default_str();

  VerifyCmd verify;
  auto* v = app.add_subcommand("verify", "re-check a campaign directory or one transcript");
  v->add_option("--dir", verify.dir, "campaign output directory");
  v->add_option("--transcript", verify.transcript, "transcript JSONL");
  v->add_option("--state", verify.state, "labelled-state sidecar for --transcript");
  v->add_option("--format", verify.format, "text | json")->check(CLI::IsMember({"text", "json"}));

  ReplayCmd replay;
  auto* r = app.add_subcommand("replay", "re-run a transcript through the engine");
  r->add_option("transcript,--transcript", replay.transcript, "transcript JSONL")->required();
  r->add_option("--format", replay.format, "text | json")->check(CLI::IsMember({"text", "json"}));

  CampaignCmd campaign;
  auto* c = app.add_subcommand("campaign", "run a grid of matches from a JSON config");
  c->add_option("config,--config", campaign.config, "campaign config JSON")->required();
  c->add_option("-o,--out", campaign.out, "overrides output_dir");
  c->add_flag("--serial", campaign.serial, "one match at a time");
  c->add_option("--format", campaign.format, "text | json")->check(CLI::IsMember({"text", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help exits 0; every other parse failure is a usage error
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (s->parsed()) return sim.run();
    if (p->parsed()) return play.run();
    if (so->parsed()) return solve.run();
    if (bo->parsed()) return bounds.run();
    if (v->parsed()) return verify.run();
    if (r->parsed()) return replay.run();
    if (c->parsed()) return campaign.run();
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCheckFailed;
  }
  return kUsage;
}
