#include "vor/harness.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "vor/painters.hpp"

namespace vor {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

ojson CheckResult::to_json() const {
  ojson j;
  j["pass"] = pass();
  ojson arr = ojson::array();
  for (const auto& v : violations) {
    ojson x;
    x["message"] = v.message;
    x["event"] = v.event ? ojson(*v.event) : ojson(nullptr);
    x["excerpt"] = v.excerpt;
    arr.push_back(std::move(x));
  }
  j["violations"] = std::move(arr);
  return j;
}

// --- legality --------------------------------------------------------------

CheckResult check_transcript_legal(const Transcript& t) {
  CheckResult r{checks::kLegality, {}};
  try {
    t.params.validate();
  } catch (const std::exception& e) {
    r.violations.push_back({e.what(), std::nullopt, nullptr});
    return r;
  }
  const GameParams& p = t.params;
  const int k = p.uniformity;
  ColoredHypergraph g(p);
  int round = 0;
  int builds_round = 0;
  std::int64_t builds = 0;
  bool open = false;
  bool ended = false;
  std::optional<Edge> last_build;

  for (std::size_t i = 0; i < t.events.size(); ++i) {
    const GameEvent& ev = t.events[i];
    auto flag = [&](const std::string& msg) { r.violations.push_back({msg, i, event_to_json(ev)}); };
    auto close_round = [&] {
      if (t.caps.mandatory_edge_rule && round >= k && builds_round == 0) {
        flag("round " + std::to_string(round) + " built no edge; rule: " + rules::kMandatory);
      }
      open = false;
    };
    if (ended) {
      flag("event after the game ended; rule: " + std::string(rules::kGameOver));
      continue;
    }
    if (auto* rv = std::get_if<event::Reveal>(&ev)) {
      if (open) close_round();
      if (rv->vertex != round + 1) {
        flag("reveal of v_" + std::to_string(rv->vertex) + ", expected v_" + std::to_string(round + 1));
      }
      if (round + 1 > t.caps.max_vertices) flag("vertex cap exceeded");
      ++round;
      g.reveal();
      open = true;
      builds_round = 0;
    } else if (auto* b = std::get_if<event::Build>(&ev)) {
      if (!open) {
        flag("build outside an open round");
        continue;
      }
      const Edge& e = b->edge;
      if (e.size() != k) {
        flag("edge of size " + std::to_string(e.size()));
      } else if (e.max_vertex() != round) {
        flag("edge " + e.to_string() + " in round " + std::to_string(round) + "; rule: " +
             (e.max_vertex() > round ? rules::kRevealed : rules::kMaxVertex));
      } else if (g.has_edge(e)) {
        flag("edge " + e.to_string() + " built twice; rule: " + rules::kDuplicate);
      } else if (b->color < 1 || b->color > p.colors()) {
        flag("color " + std::to_string(b->color) + " outside 1.." + std::to_string(p.colors()));
      } else if (builds >= t.caps.max_edges) {
        flag("edge cap exceeded");
      } else {
        g.add(e, b->color);
        ++builds;
        ++builds_round;
        last_build = e;
        const bool next_is_win =
            i + 1 < t.events.size() && std::holds_alternative<event::Win>(t.events[i + 1]);
        if (find_mono_clique(g, e) && !next_is_win) {
          flag("a monochromatic target clique formed but no win event follows");
        }
      }
    } else if (auto* re = std::get_if<event::RoundEnd>(&ev)) {
      if (!open || re->round != round) {
        flag("round_end for round " + std::to_string(re->round) + " while round " +
             std::to_string(round) + (open ? " is open" : " is closed"));
      } else {
        close_round();
      }
    } else if (auto* w = std::get_if<event::Win>(&ev)) {
      const MonoClique& c = w->clique;
      const bool prev_build = i > 0 && std::holds_alternative<event::Build>(t.events[i - 1]);
      if (!prev_build) flag("win event not directly after a build");
      if (c.color < 1 || c.color > p.colors() ||
          static_cast<int>(c.vertices.size()) != p.target(c.color) ||
          !std::is_sorted(c.vertices.begin(), c.vertices.end()) ||
          std::adjacent_find(c.vertices.begin(), c.vertices.end()) != c.vertices.end()) {
        flag("win clique has the wrong size or shape");
      } else if (!is_mono_clique(g, c.vertices, c.color)) {
        flag("win clique is not monochromatic in color " + std::to_string(c.color));
      } else if (last_build) {
        bool has = true;
        for (VertexId v : last_build->vertices()) {
          has = has && std::binary_search(c.vertices.begin(), c.vertices.end(), v);
        }
        if (!has) flag("win clique does not contain the winning edge " + last_build->to_string());
      }
      ended = true;
    } else if (auto* a = std::get_if<event::Abort>(&ev)) {
      if (a->reason == AbortReason::kEdgeCap && builds != t.caps.max_edges) {
        flag("edge-cap abort with " + std::to_string(builds) + " edges built");
      }
      if (a->reason == AbortReason::kVertexCap && round != t.caps.max_vertices) {
        flag("vertex-cap abort with " + std::to_string(round) + " vertices revealed");
      }
      ended = true;
    }
  }
  if (!ended) r.violations.push_back({"transcript ends without a win or abort event", std::nullopt, nullptr});
  return r;
}

// --- recursive-builder invariants -----------------------------------------

namespace {

struct Indexed {
  std::map<Edge, Color> color;
  std::vector<std::string> round_colors;  // index j - 1
  std::size_t builds = 0;
  int n = 0;
  bool won = false;
  ColoredHypergraph graph;

  explicit Indexed(const Transcript& t) : graph(t.params) {
    n = t.vertex_count();
    graph.set_revealed(n);
    round_colors.assign(static_cast<std::size_t>(n), "");
    int round = 0;
    for (const auto& ev : t.events) {
      if (auto* r = std::get_if<event::Reveal>(&ev)) round = r->vertex;
      if (auto* b = std::get_if<event::Build>(&ev)) {
        ++builds;
        if (color.emplace(b->edge, b->color).second && b->color >= 1 && b->color <= t.params.colors() &&
            b->edge.max_vertex() <= n) {
          graph.add(b->edge, b->color);
        }
        if (round >= 1 && round <= n) {
          round_colors[static_cast<std::size_t>(round - 1)].push_back(static_cast<char>('0' + b->color));
        }
      }
      if (std::holds_alternative<event::Win>(ev)) won = true;
    }
  }

  std::optional<Color> of(const Edge& e) const {
    auto it = color.find(e);
    if (it == color.end()) return std::nullopt;
    return it->second;
  }
};

ojson vertex_excerpt(const LabelledState& s, VertexId v) {
  const auto i = static_cast<std::size_t>(v - 1);
  return {{"vertex", v}, {"label", s.labels[i]}, {"R", s.r_sets[i]}};
}

}  // namespace

std::vector<CheckResult> check_recursive_invariants(const Transcript& t, const LabelledState& s) {
  if (s.uniformity != t.params.uniformity || s.colors != t.params.colors()) {
    throw std::invalid_argument("labelled state was exported for different game parameters");
  }
  Indexed x(t);
  const int n = x.n;
  const int k = t.params.uniformity;
  if (static_cast<int>(s.labels.size()) != n || static_cast<int>(s.r_sets.size()) != n) {
    throw std::invalid_argument("labelled state covers " + std::to_string(s.labels.size()) +
                                " vertices, transcript reveals " + std::to_string(n));
  }
  auto label = [&](VertexId v) -> const std::string& { return s.labels[static_cast<std::size_t>(v - 1)]; };
  auto rset = [&](VertexId v) -> const std::vector<VertexId>& { return s.r_sets[static_cast<std::size_t>(v - 1)]; };
  const TowerExpr& m = s.sub_budget;

  CheckResult inj{checks::kInjectivity, {}};
  for (VertexId v = 1; v <= std::min(n, k - 1); ++v) {
    if (!label(v).empty()) inj.violations.push_back({"initial vertex has a nonempty label", std::nullopt, vertex_excerpt(s, v)});
  }
  std::map<std::string, VertexId> seen;
  for (VertexId v = std::max(1, k - 1); v <= n - 1; ++v) {
    auto [it, fresh] = seen.emplace(label(v), v);
    if (!fresh) {
      inj.violations.push_back({"label '" + label(v) + "' shared by v_" + std::to_string(it->second) +
                                    " and v_" + std::to_string(v),
                                std::nullopt, ojson::array({vertex_excerpt(s, it->second), vertex_excerpt(s, v)})});
    }
    if (!(TowerExpr(BigNat(static_cast<unsigned long>(label(v).size() + 1))) <= m)) {
      inj.violations.push_back({"label longer than m - 1", std::nullopt, vertex_excerpt(s, v)});
    }
  }

  CheckResult pre{checks::kPrefix, {}};
  for (VertexId j = 1; j <= n; ++j) {
    const auto& rj = rset(j);
    if (j <= k - 1 && !rj.empty()) {
      pre.violations.push_back({"initial vertex has a nonempty R set", std::nullopt, vertex_excerpt(s, j)});
    }
    for (VertexId i : rj) {
      if (i < 1 || i >= j) {
        pre.violations.push_back({"R(v_" + std::to_string(j) + ") holds v_" + std::to_string(i),
                                  std::nullopt, vertex_excerpt(s, j)});
        continue;
      }
      if (i < k) continue;
      std::vector<VertexId> expect;
      for (VertexId l : rj) {
        if (l < i) expect.push_back(l);
      }
      if (rset(i) != expect) {
        pre.violations.push_back({"R(v_" + std::to_string(i) + ") is not the part of R(v_" +
                                      std::to_string(j) + ") below v_" + std::to_string(i),
                                  std::nullopt, ojson::array({vertex_excerpt(s, i), vertex_excerpt(s, j)})});
      }
    }
  }

  CheckResult coh{checks::kCoherence, {}};
  for (VertexId j = 1; j <= n; ++j) {
    for (VertexId i : rset(j)) {
      if (i < k || i >= j || i > n) continue;
      std::vector<VertexId> ri = rset(i);
      std::sort(ri.begin(), ri.end());
      ri.erase(std::unique(ri.begin(), ri.end()), ri.end());
      ri.erase(std::remove_if(ri.begin(), ri.end(), [&](VertexId v) { return v < 1 || v >= i; }), ri.end());
      for_each_subset(ri, k - 1, [&](std::span<const VertexId> e) {
        std::vector<VertexId> vi(e.begin(), e.end()), vj(e.begin(), e.end());
        vi.push_back(i);
        vj.push_back(j);
        const Edge ei = make_edge(vi, k), ej = make_edge(vj, k);
        const auto ci = x.of(ei), cj = x.of(ej);
        if (ci != cj) {
          auto show = [](const std::optional<Color>& c) { return c ? std::to_string(*c) : std::string("unbuilt"); };
          coh.violations.push_back({ei.to_string() + " is " + show(ci) + " but " + ej.to_string() + " is " + show(cj),
                                    std::nullopt,
                                    {{"pair", {i, j}}, {"edges", {ei.to_vector(), ej.to_vector()}}}});
        }
        return true;
      });
    }
  }

  CheckResult end{checks::kEndgame, {}};
  if (s.declared_win) {
    const MonoClique& w = *s.declared_win;
    const ojson ex = {{"declared_win", {{"color", w.color}, {"clique", w.vertices}}}};
    const bool shape_ok = w.color >= 1 && w.color <= t.params.colors() &&
                          static_cast<int>(w.vertices.size()) == t.params.target(w.color);
    if (!shape_ok || !is_mono_clique(x.graph, w.vertices, w.color)) {
      end.violations.push_back({"lifted clique is not a monochromatic target clique", std::nullopt, ex});
    } else if (!find_mono_clique(x.graph)) {
      end.violations.push_back({"full clique search disagrees with the lifted clique", std::nullopt, ex});
    }
    if (n < 1 || !std::count(w.vertices.begin(), w.vertices.end(), n)) {
      end.violations.push_back({"lifted clique does not contain the last vertex", std::nullopt, ex});
    } else {
      std::set<VertexId> r(rset(n).begin(), rset(n).end());
      for (VertexId v : w.vertices) {
        if (v != n && !r.contains(v)) {
          end.violations.push_back({"lifted clique uses v_" + std::to_string(v) + " outside R(v_n)", std::nullopt, ex});
        }
      }
    }
    if (!x.won) end.violations.push_back({"builder declared a win the transcript does not record", std::nullopt, ex});
  } else {
    if (x.won) end.violations.push_back({"transcript records a win the builder did not lift", std::nullopt, nullptr});
    if (n >= 1 && !(TowerExpr(BigNat(static_cast<unsigned long>(label(n).size()))) < m)) {
      end.violations.push_back({"last label reached length m without a declared win", std::nullopt,
                                vertex_excerpt(s, n)});
    }
  }

  CheckResult let{checks::kLetterEdge, {}};
  std::size_t letters = 0;
  for (VertexId v = 1; v <= n; ++v) {
    letters += label(v).size();
    if (label(v) != x.round_colors[static_cast<std::size_t>(v - 1)]) {
      let.violations.push_back({"label of v_" + std::to_string(v) + " differs from round " + std::to_string(v) +
                                    "'s colors '" + x.round_colors[static_cast<std::size_t>(v - 1)] + "'",
                                std::nullopt, vertex_excerpt(s, v)});
    }
  }
  if (letters != x.builds) {
    let.violations.push_back({"labels hold " + std::to_string(letters) + " letters for " +
                                  std::to_string(x.builds) + " built edges",
                              std::nullopt, nullptr});
  }
  return {inj, pre, coh, end, let};
}

// --- budgets -----------------------------------------------------------------

CheckResult check_budgets(const Transcript& t, const Budget& declared, BudgetUse* use) {
  CheckResult r{checks::kBudgets, {}};
  BudgetUse u{t.vertex_count(), static_cast<std::int64_t>(t.build_count()), declared.vertices, declared.edges};
  if (!(TowerExpr(BigNat(static_cast<long>(u.vertices_used))) <= declared.vertices)) {
    r.violations.push_back({"used " + std::to_string(u.vertices_used) + " vertices, declared " +
                                declared.vertices.to_string(),
                            std::nullopt, nullptr});
  }
  if (!(TowerExpr(BigNat(static_cast<long>(u.edges_used))) <= declared.edges)) {
    r.violations.push_back({"used " + std::to_string(u.edges_used) + " edges, declared " + declared.edges.to_string(),
                            std::nullopt, nullptr});
  }
  if (use) *use = u;
  return r;
}

// --- reports -------------------------------------------------------------------

bool VerificationReport::pass() const {
  if (!error.empty() || !legality.pass()) return false;
  for (const auto& c : structural) {
    if (!c.pass()) return false;
  }
  return !budgets || budgets->pass();
}

ojson VerificationReport::to_json() const {
  ojson j;
  j["format_version"] = 1;
  j["match_id"] = match_id;
  j["outcome"] = outcome;
  j["pass"] = pass();
  if (!error.empty()) j["error"] = error;
  j["legality"] = legality.to_json();
  ojson st = ojson::object();
  for (const auto& c : structural) st[c.name] = c.to_json();
  j["structural"] = std::move(st);
  if (budgets && budget_use) {
    ojson b = budgets->to_json();
    b["vertices_used"] = budget_use->vertices_used;
    b["vertices_declared"] = budget_use->vertices_declared.to_json();
    b["edges_used"] = budget_use->edges_used;
    b["edges_declared"] = budget_use->edges_declared.to_json();
    j["budgets"] = std::move(b);
  } else {
    j["budgets"] = nullptr;
  }
  return j;
}

std::string transcript_outcome(const Transcript& t) {
  if (t.events.empty()) return "unfinished";
  GameStatus st;
  if (auto* w = std::get_if<event::Win>(&t.events.back())) {
    st.kind = GameStatus::Kind::kWon;
    st.clique = w->clique;
  } else if (auto* a = std::get_if<event::Abort>(&t.events.back())) {
    st.kind = GameStatus::Kind::kAborted;
    st.abort_reason = a->reason;
  } else {
    return "unfinished";
  }
  return st.describe();
}

VerificationReport verify_match(const std::string& id, const Transcript& t,
                                const std::optional<LabelledState>& state,
                                const std::optional<Budget>& declared) {
  VerificationReport r;
  r.match_id = id;
  r.outcome = transcript_outcome(t);
  r.legality = check_transcript_legal(t);
  if (state) {
    try {
      r.structural = check_recursive_invariants(t, *state);
    } catch (const std::invalid_argument& e) {
      r.error = e.what();
    }
  }
  if (declared) {
    BudgetUse u;
    r.budgets = check_budgets(t, *declared, &u);
    r.budget_use = u;
  }
  return r;
}

// --- fault injection -----------------------------------------------------------

std::vector<Mutant> transcript_mutants(const Transcript& t) {
  std::vector<Mutant> out;
  const auto& ev = t.events;
  auto first_build = std::find_if(ev.begin(), ev.end(), [](const GameEvent& e) {
    return std::holds_alternative<event::Build>(e);
  });
  if (first_build != ev.end()) {
    Mutant m{"duplicate_build", checks::kLegality, t, std::nullopt};
    const auto at = static_cast<std::size_t>(first_build - ev.begin());
    m.transcript.events.insert(m.transcript.events.begin() + static_cast<std::ptrdiff_t>(at + 1), ev[at]);
    out.push_back(std::move(m));

    Mutant c{"color_out_of_range", checks::kLegality, t, std::nullopt};
    std::get<event::Build>(c.transcript.events[at]).color = t.params.colors() + 1;
    out.push_back(std::move(c));
  }
  // A round >= k whose only build is not the winning one.
  if (t.caps.mandatory_edge_rule) {
    int round = 0;
    std::vector<std::size_t> in_round;
    for (std::size_t i = 0; i <= ev.size(); ++i) {
      const bool boundary = i == ev.size() || std::holds_alternative<event::Reveal>(ev[i]);
      if (boundary) {
        const bool winning = i == ev.size();
        if (round >= t.params.uniformity && in_round.size() == 1 && !winning) {
          Mutant m{"drop_mandatory_build", checks::kLegality, t, std::nullopt};
          m.transcript.events.erase(m.transcript.events.begin() + static_cast<std::ptrdiff_t>(in_round[0]));
          out.push_back(std::move(m));
          break;
        }
        if (i < ev.size()) round = std::get<event::Reveal>(ev[i]).vertex;
        in_round.clear();
      } else if (std::holds_alternative<event::Build>(ev[i])) {
        in_round.push_back(i);
      }
    }
  }
  int reveals = 0;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    if (std::holds_alternative<event::Reveal>(ev[i]) && ++reveals == 2) {
      Mutant m{"skip_reveal", checks::kLegality, t, std::nullopt};
      std::get<event::Reveal>(m.transcript.events[i]).vertex += 1;
      out.push_back(std::move(m));
      break;
    }
  }
  return out;
}

std::vector<Mutant> state_mutants(const Transcript& t, const LabelledState& s) {
  std::vector<Mutant> out;
  const int n = static_cast<int>(s.labels.size());
  const int k = s.uniformity;

  // two labelled vertices in the injective range share a label
  if (n - 1 >= k) {
    Mutant m{"duplicate_label", checks::kInjectivity, t, s};
    m.state->labels[static_cast<std::size_t>(n - 2)] = s.labels[static_cast<std::size_t>(k - 2)];
    if (n - 2 == k - 2) m.state->labels[static_cast<std::size_t>(k - 1)] = s.labels[static_cast<std::size_t>(k - 2)];
    out.push_back(std::move(m));
  }

  // R-prefix: drop the last element of some R(v_i) with v_i in a later R set.
  // Color coherence: recolor an edge at v_j whose mirror at v_i was built.
  bool have_prefix = false, have_coh = false;
  for (VertexId j = 1; j <= n && !(have_prefix && have_coh); ++j) {
    for (VertexId i : s.r_sets[static_cast<std::size_t>(j - 1)]) {
      if (i < k || i >= j) continue;
      const auto& ri = s.r_sets[static_cast<std::size_t>(i - 1)];
      if (!have_prefix && !ri.empty()) {
        Mutant m{"truncate_r_set", checks::kPrefix, t, s};
        m.state->r_sets[static_cast<std::size_t>(i - 1)].pop_back();
        out.push_back(std::move(m));
        have_prefix = true;
      }
      if (!have_coh && static_cast<int>(ri.size()) >= k - 1) {
        std::vector<VertexId> e(ri.begin(), ri.begin() + (k - 1));
        e.push_back(j);
        const Edge ej = make_edge(e, k);
        for (std::size_t a = 0; a < t.events.size(); ++a) {
          auto* b = std::get_if<event::Build>(&t.events[a]);
          if (b && b->edge == ej) {
            Mutant m{"recolor_mirrored_edge", checks::kCoherence, t, s};
            auto& mb = std::get<event::Build>(m.transcript.events[a]);
            mb.color = mb.color % t.params.colors() + 1;
            out.push_back(std::move(m));
            have_coh = true;
            break;
          }
        }
      }
    }
  }

  if (s.declared_win) {
    Mutant m{"corrupt_declared_win", checks::kEndgame, t, s};
    auto& vs = m.state->declared_win->vertices;
    bool swapped = false;
    for (VertexId v = 1; v <= n && !swapped; ++v) {
      if (!std::count(vs.begin(), vs.end(), v)) {
        vs.front() = v;
        std::sort(vs.begin(), vs.end());
        swapped = true;
      }
    }
    if (!swapped) {
      // the clique spans every vertex; claim the other color instead
      Color& c = m.state->declared_win->color;
      c = c % t.params.colors() + 1;
    }
    out.push_back(std::move(m));
    Mutant d{"drop_declared_win", checks::kEndgame, t, s};
    d.state->declared_win.reset();
    out.push_back(std::move(d));
  }

  for (int v = n; v >= 1; --v) {
    if (!s.labels[static_cast<std::size_t>(v - 1)].empty()) {
      Mutant m{"truncate_label", checks::kLetterEdge, t, s};
      m.state->labels[static_cast<std::size_t>(v - 1)].pop_back();
      out.push_back(std::move(m));
      break;
    }
  }
  return out;
}

bool mutant_detected(const Mutant& m) {
  if (m.target_check == checks::kLegality) return !check_transcript_legal(m.transcript).pass();
  if (!m.state) return false;
  for (const auto& c : check_recursive_invariants(m.transcript, *m.state)) {
    if (c.name == m.target_check) return !c.pass();
  }
  return false;
}

// --- campaigns -----------------------------------------------------------------

CampaignConfig CampaignConfig::from_json(const ojson& j) {
  CampaignConfig c;
  for (const auto& g : j.value("grid", ojson::array())) {
    GameParams p{g.at("k").get<int>(), g.at("targets").get<std::vector<int>>()};
    p.validate();
    c.grid.push_back(std::move(p));
  }
  c.builders = j.value("builders", std::vector<std::string>{});
  c.painters = j.value("painters", std::vector<std::string>{});
  if (j.contains("seeds")) {
    const auto& s = j["seeds"];
    if (s.is_array()) {
      c.seeds = s.get<std::vector<std::uint64_t>>();
    } else {
      const auto from = s.at("from").get<std::uint64_t>();
      const auto count = s.at("count").get<std::uint64_t>();
      for (std::uint64_t i = 0; i < count; ++i) c.seeds.push_back(from + i);
    }
  }
  if (j.contains("caps")) {
    const auto& k = j["caps"];
    c.caps.max_edges = k.value("max_edges", c.caps.max_edges);
    c.caps.max_vertices = k.value("max_vertices", c.caps.max_vertices);
    c.caps.mandatory_edge_rule = k.value("mandatory_edge_rule", c.caps.mandatory_edge_rule);
    c.caps.validate();
  }
  c.output_dir = j.value("output_dir", std::string("campaign-out"));
  if (j.contains("budget_override")) {
    const auto& b = j["budget_override"];
    c.budget_override = Budget{TowerExpr(parse_bignat(b.at("vertices").get<std::string>())),
                               TowerExpr(parse_bignat(b.at("edges").get<std::string>()))};
  }
  return c;
}

CampaignConfig CampaignConfig::load(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open campaign config " + file.string());
  ojson j;
  try {
    j = ojson::parse(in);
  } catch (const std::exception& e) {
    throw std::runtime_error("campaign config " + file.string() + ": " + e.what());
  }
  return from_json(j);
}

bool CampaignSummary::all_pass() const {
  return std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.pass(); });
}

ojson CampaignSummary::to_json() const {
  ojson j;
  j["format_version"] = 1;
  j["matches"] = reports.size();
  const auto passed = std::count_if(reports.begin(), reports.end(), [](const auto& r) { return r.pass(); });
  j["passed"] = passed;
  j["failed"] = static_cast<std::int64_t>(reports.size()) - passed;
  j["all_pass"] = all_pass();
  j["skipped"] = skipped;
  ojson rows = ojson::array();
  for (const auto& r : reports) {
    ojson row;
    row["id"] = r.match_id;
    row["pass"] = r.pass();
    row["outcome"] = r.outcome;
    if (r.budget_use) {
      row["vertices"] = r.budget_use->vertices_used;
      row["edges"] = r.budget_use->edges_used;
    }
    if (!r.error.empty()) row["error"] = r.error;
    rows.push_back(std::move(row));
  }
  j["results"] = std::move(rows);
  return j;
}

std::string match_id(const GameParams& p, const std::string& builder, const std::string& painter) {
  std::ostringstream os;
  os << "k" << p.uniformity << "_t";
  for (std::size_t i = 0; i < p.targets.size(); ++i) os << (i ? "-" : "") << p.targets[i];
  os << "_" << builder << "_" << painter;
  std::string id = os.str();
  for (char& ch : id) {
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '-' && ch != '_') ch = '-';
  }
  return id;
}

std::vector<MatchSpec> expand_matches(const CampaignConfig& cfg, std::vector<std::string>* skipped) {
  std::vector<std::string> painters;
  for (const auto& p : cfg.painters) {
    if (p == "random") {
      for (auto s : cfg.seeds) painters.push_back("random:" + std::to_string(s));
    } else {
      painters.push_back(p);
    }
  }
  std::vector<MatchSpec> out;
  for (const auto& params : cfg.grid) {
    for (const auto& b : cfg.builders) {
      for (const auto& p : painters) {
        MatchSpec m{match_id(params, b, p), params, b, p};
        try {
          auto builder = make_builder(b, params);
          make_painter(p, params, builder.get());
        } catch (const std::exception& e) {
          if (skipped) skipped->push_back(m.id + ": " + e.what());
          continue;
        }
        out.push_back(std::move(m));
      }
    }
  }
  return out;
}

MatchArtifacts run_and_verify(const MatchSpec& spec, const ResourceCaps& caps,
                              const std::optional<Budget>& budget_override) {
  MatchArtifacts a;
  auto builder = make_builder(spec.builder, spec.params);
  auto painter = make_painter(spec.painter, spec.params, builder.get());
  MatchResult res;
  try {
    res = run_match(*builder, *painter, caps);
  } catch (const std::exception& e) {
    a.transcript.params = spec.params;
    a.transcript.caps = caps;
    a.report.match_id = spec.id;
    a.report.outcome = "error";
    a.report.error = e.what();
    return a;
  }
  res.transcript.builder = spec.builder;
  res.transcript.painter = spec.painter;
  // Verify the serialized artifacts, not the in-memory ones.
  a.transcript = transcript_from_string(transcript_to_string(res.transcript));
  if (auto* rb = dynamic_cast<RecursiveBuilder*>(builder.get())) {
    a.state = LabelledState::from_json(ojson::parse(rb->export_state().to_json().dump()));
  }
  a.report = verify_match(spec.id, a.transcript, a.state, budget_override ? *budget_override : builder->budget());
  if (!(a.transcript == res.transcript)) a.report.error = "transcript does not survive serialization";
  return a;
}

namespace {

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

}  // namespace

CampaignSummary run_campaign(const CampaignConfig& cfg, bool parallel) {
  CampaignSummary summary;
  const auto matches = expand_matches(cfg, &summary.skipped);
  fs::create_directories(cfg.output_dir);
  summary.reports.resize(matches.size());

#pragma omp parallel for schedule(dynamic, 1) if (parallel)
  for (std::size_t i = 0; i < matches.size(); ++i) {
    const auto& spec = matches[i];
    try {
      MatchArtifacts a = run_and_verify(spec, cfg.caps, cfg.budget_override);
      write_text(cfg.output_dir / (spec.id + ".transcript.jsonl"), transcript_to_string(a.transcript));
      if (a.state) write_text(cfg.output_dir / (spec.id + ".state.json"), a.state->to_json().dump(1) + "\n");
      write_text(cfg.output_dir / (spec.id + ".report.json"), a.report.to_json().dump(1) + "\n");
      summary.reports[i] = std::move(a.report);
    } catch (const std::exception& e) {
      summary.reports[i].match_id = spec.id;
      summary.reports[i].outcome = "error";
      summary.reports[i].error = e.what();
    }
  }
  std::sort(summary.reports.begin(), summary.reports.end(),
            [](const auto& a, const auto& b) { return a.match_id < b.match_id; });
  std::sort(summary.skipped.begin(), summary.skipped.end());
  write_text(cfg.output_dir / "summary.json", summary.to_json().dump(1) + "\n");
  return summary;
}

CampaignSummary verify_directory(const fs::path& dir) {
  CampaignSummary summary;
  if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir.string());
  const std::string suffix = ".transcript.jsonl";
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.size() > suffix.size() && name.ends_with(suffix)) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    const std::string name = f.filename().string();
    const std::string id = name.substr(0, name.size() - suffix.size());
    VerificationReport r;
    try {
      std::ifstream in(f);
      Transcript t = read_transcript(in);
      std::optional<LabelledState> state;
      if (std::ifstream s(dir / (id + ".state.json")); s) state = LabelledState::from_json(ojson::parse(s));
      std::optional<ojson> stored;
      if (std::ifstream s(dir / (id + ".report.json")); s) stored = ojson::parse(s);
      std::optional<Budget> declared;
      if (stored && (*stored)["budgets"].is_object()) {
        const auto& b = (*stored)["budgets"];
        declared = Budget{TowerExpr::from_json(b.at("vertices_declared")), TowerExpr::from_json(b.at("edges_declared"))};
      } else if (!t.builder.empty()) {
        declared = make_builder(t.builder, t.params)->budget();
      }
      r = verify_match(id, t, state, declared);
      if (stored && *stored != r.to_json()) r.error = "stored report differs from the re-derived one";
      if (!stored) r.error = "no stored report";
    } catch (const std::exception& e) {
      r.match_id = id;
      r.outcome = "error";
      r.error = e.what();
    }
    summary.reports.push_back(std::move(r));
  }
  return summary;
}

}  // namespace vor
