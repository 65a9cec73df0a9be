#include "vor/builders.hpp"

#include <algorithm>

namespace vor {

// --- clique builder ----------------------------------------------------------

CliqueBuilder::CliqueBuilder(GameParams params, int n) : params_(std::move(params)), n_(n) {
  params_.validate();
  if (n_ < params_.uniformity) throw InvalidParams("clique builder needs n >= k");
}

Budget CliqueBuilder::budget() const {
  return {TowerExpr(BigNat(n_)),
          TowerExpr(binomial(BigNat(n_), static_cast<unsigned long>(params_.uniformity)))};
}

void CliqueBuilder::on_reveal(VertexId vertex) {
  current_ = vertex;
  pending_.clear();
  next_ = 0;
  if (vertex > n_) return;
  std::vector<VertexId> older(static_cast<std::size_t>(vertex - 1));
  for (int i = 0; i < vertex - 1; ++i) older[static_cast<std::size_t>(i)] = i + 1;
  for_each_subset(older, params_.uniformity - 1, [&](std::span<const VertexId> s) {
    std::vector<VertexId> e(s.begin(), s.end());
    e.push_back(vertex);
    pending_.push_back(make_edge_unchecked(e));
    return true;
  });
}

BuilderAction CliqueBuilder::next_action() {
  if (current_ > n_) return Concede{};
  if (next_ < pending_.size()) return BuildEdge{pending_[next_++]};
  return EndRound{};
}

std::unique_ptr<BuilderStrategy> CliqueBuilder::fresh() const {
  return std::make_unique<CliqueBuilder>(params_, n_);
}

// --- tree builder ------------------------------------------------------------

TreeBuilder::TreeBuilder(GameParams params) : params_(std::move(params)) {
  params_.validate();
  if (params_.uniformity != 2) throw InvalidParams("tree builder plays uniformity 2 only");
}

Budget TreeBuilder::budget() const {
  return {TowerExpr(tree_vertex_budget(params_.targets)),
          TowerExpr(tree_edge_budget(params_.targets))};
}

void TreeBuilder::on_reveal(VertexId vertex) {
  walker_ = vertex;
  walk_.clear();
  const auto q = static_cast<std::size_t>(params_.colors());
  if (nodes_.empty()) {
    nodes_.push_back(Node{vertex, std::vector<int>(q, 0), std::vector<int>(q, -1), 0});
    cursor_ = -1;
    return;
  }
  cursor_ = 0;
}

BuilderAction TreeBuilder::next_action() {
  if (cursor_ < 0 || win_) return EndRound{};
  return BuildEdge{make_edge({nodes_[static_cast<std::size_t>(cursor_)].vertex, walker_}, 2)};
}

void TreeBuilder::on_color(const Edge& edge, Color color) {
  const auto at = static_cast<std::size_t>(cursor_);
  if (cursor_ < 0 || !(edge == make_edge({nodes_[at].vertex, walker_}, 2))) {
    throw std::logic_error("tree builder: color for an edge it did not build");
  }
  walk_.emplace_back(nodes_[at].vertex, color);
  const auto c = static_cast<std::size_t>(color - 1);
  if (nodes_[at].turns[c] + 1 == params_.target(color) - 1) {
    MonoClique clique{color, {walker_}};
    for (const auto& [v, col] : walk_) {
      if (col == color) clique.vertices.push_back(v);
    }
    std::sort(clique.vertices.begin(), clique.vertices.end());
    win_ = std::move(clique);
    cursor_ = -1;
    return;
  }
  const int next = nodes_[at].child[c];
  if (next >= 0) {
    cursor_ = next;
    return;
  }
  Node placed{walker_, nodes_[at].turns, std::vector<int>(nodes_[at].child.size(), -1),
              nodes_[at].depth + 1};
  ++placed.turns[c];
  nodes_.push_back(std::move(placed));
  nodes_[at].child[c] = static_cast<int>(nodes_.size() - 1);
  cursor_ = -1;
}

std::unique_ptr<BuilderStrategy> TreeBuilder::fresh() const {
  return std::make_unique<TreeBuilder>(params_);
}

// --- recursive builder -------------------------------------------------------

nlohmann::ordered_json LabelledState::to_json() const {
  nlohmann::ordered_json j;
  j["format_version"] = 1;
  j["k"] = uniformity;
  j["q"] = colors;
  j["m"] = sub_budget.to_json();
  j["labels"] = labels;
  j["R"] = r_sets;
  if (declared_win) {
    j["declared_win"] = {{"color", declared_win->color}, {"clique", declared_win->vertices}};
  } else {
    j["declared_win"] = nullptr;
  }
  return j;
}

LabelledState LabelledState::from_json(const nlohmann::ordered_json& j) {
  LabelledState s;
  s.uniformity = j.at("k").get<int>();
  s.colors = j.at("q").get<int>();
  s.sub_budget = TowerExpr::from_json(j.at("m"));
  s.labels = j.at("labels").get<std::vector<std::string>>();
  s.r_sets = j.at("R").get<std::vector<std::vector<VertexId>>>();
  if (!j.at("declared_win").is_null()) {
    const auto& w = j.at("declared_win");
    s.declared_win = MonoClique{w.at("color").get<int>(), w.at("clique").get<std::vector<int>>()};
  }
  return s;
}

RecursiveBuilder::RecursiveBuilder(GameParams params, std::unique_ptr<BuilderStrategy> sub)
    : params_(std::move(params)), proto_(std::move(sub)) {
  params_.validate();
  if (params_.uniformity < 3) throw InvalidParams("recursive builder needs k >= 3");
  if (params_.colors() > 9) throw InvalidParams("recursive builder labels support at most 9 colors");
  sub_params_ = params_.stepped_down();
  if (!proto_ || !(proto_->params() == sub_params_)) {
    throw InvalidParams("sub-strategy must play uniformity k-1 with every target reduced by one");
  }
}

Budget RecursiveBuilder::budget() const {
  const TowerExpr m = proto_->budget().edges;
  const auto q = static_cast<unsigned long>(params_.colors());
  return {theorem_vertex_bound(q, m, params_.uniformity), theorem_edge_bound(q, m)};
}

void RecursiveBuilder::on_reveal(VertexId vertex) {
  if (vertex != static_cast<VertexId>(labels_.size()) + 1) {
    throw std::logic_error("recursive builder: vertices must be revealed in order");
  }
  current_ = vertex;
  labels_.emplace_back();
  r_sets_.emplace_back();
  if (vertex <= params_.uniformity - 1) {
    by_label_[""].push_back(vertex);
    phase_ = Phase::kIdle;
    return;
  }
  partial_.clear();
  r_partial_.clear();
  in_r_.assign(static_cast<std::size_t>(vertex), false);
  sub_to_real_.clear();
  sub_ = proto_->fresh();
  aux_.emplace(sub_params_);
  begin_sub_round();
}

void RecursiveBuilder::begin_sub_round() {
  // Minimal i < j outside R_f(v_j) whose label equals the partial label.
  VertexId pick = 0;
  if (auto it = by_label_.find(partial_); it != by_label_.end()) {
    for (VertexId i : it->second) {
      if (!in_r_[static_cast<std::size_t>(i)]) {
        pick = i;
        break;
      }
    }
  }
  if (pick == 0) {
    finish_round();
    return;
  }
  if (pick >= params_.uniformity && r_sets_[static_cast<std::size_t>(pick - 1)] != r_partial_) {
    throw SubStrategyNondeterminism(
        "sub-strategy " + proto_->name() + " is not deterministic: round " +
        std::to_string(current_) + " reached label '" + partial_ + "' with a different vertex set than v_" +
        std::to_string(pick));
  }
  sub_to_real_.push_back(pick);
  aux_->reveal();
  sub_->on_reveal(static_cast<VertexId>(sub_to_real_.size()));
  phase_ = Phase::kSubRound;
}

void RecursiveBuilder::finish_round() {
  const auto j = static_cast<std::size_t>(current_ - 1);
  labels_[j] = partial_;
  r_sets_[j] = r_partial_;
  by_label_[partial_].push_back(current_);
  phase_ = Phase::kDone;
  sub_.reset();
  aux_.reset();
}

BuilderAction RecursiveBuilder::next_action() {
  while (phase_ == Phase::kSubRound && !win_) {
    BuilderAction a = sub_->next_action();
    if (auto* b = std::get_if<BuildEdge>(&a)) {
      pending_sub_edge_ = b->edge;
      std::vector<VertexId> real;
      for (VertexId s : b->edge.vertices()) real.push_back(sub_to_real_.at(static_cast<std::size_t>(s - 1)));
      real.push_back(current_);
      return BuildEdge{make_edge(real, params_.uniformity)};
    }
    if (std::holds_alternative<Concede>(a)) {
      throw std::logic_error("recursive builder: sub-strategy conceded");
    }
    // Sub-round over: v_i joins R and the label has grown by this round's colors.
    const VertexId added = sub_to_real_.back();
    r_partial_.push_back(added);
    in_r_[static_cast<std::size_t>(added)] = true;
    begin_sub_round();
  }
  return EndRound{};
}

void RecursiveBuilder::on_color(const Edge&, Color color) {
  if (phase_ != Phase::kSubRound) throw std::logic_error("recursive builder: unexpected color");
  partial_.push_back(static_cast<char>('0' + color));
  aux_->add(pending_sub_edge_, color);
  sub_->on_color(pending_sub_edge_, color);
  if (auto clique = find_mono_clique(*aux_, pending_sub_edge_)) {
    // Lift: the auxiliary clique plus v_j is monochromatic in the real game.
    MonoClique lifted{clique->color, {current_}};
    for (VertexId s : clique->vertices) lifted.vertices.push_back(sub_to_real_.at(static_cast<std::size_t>(s - 1)));
    std::sort(lifted.vertices.begin(), lifted.vertices.end());
    win_ = std::move(lifted);
  }
}

LabelledState RecursiveBuilder::export_state() const {
  LabelledState s;
  s.uniformity = params_.uniformity;
  s.colors = params_.colors();
  s.sub_budget = proto_->budget().edges;
  s.labels = labels_;
  s.r_sets = r_sets_;
  if (phase_ == Phase::kSubRound && current_ >= 1) {
    const auto j = static_cast<std::size_t>(current_ - 1);
    s.labels[j] = partial_;
    s.r_sets[j] = r_partial_;
    if (!sub_to_real_.empty() &&
        (r_partial_.empty() || r_partial_.back() != sub_to_real_.back())) {
      s.r_sets[j].push_back(sub_to_real_.back());
    }
  }
  s.declared_win = win_;
  return s;
}

std::unique_ptr<BuilderStrategy> RecursiveBuilder::fresh() const {
  return std::make_unique<RecursiveBuilder>(params_, proto_->fresh());
}

// --- factory -------------------------------------------------------------------

std::unique_ptr<BuilderStrategy> make_builder(const std::string& spec, const GameParams& params) {
  params.validate();
  if (spec.rfind("clique:", 0) == 0) {
    int n = 0;
    try {
      n = std::stoi(spec.substr(7));
    } catch (const std::exception&) {
      throw InvalidParams("bad clique size in builder spec '" + spec + "'");
    }
    return std::make_unique<CliqueBuilder>(params, n);
  }
  if (spec == "tree") return std::make_unique<TreeBuilder>(params);
  if (spec == "recursive") {
    if (params.uniformity == 2) return std::make_unique<TreeBuilder>(params);
    return std::make_unique<RecursiveBuilder>(params, make_builder("recursive", params.stepped_down()));
  }
  throw InvalidParams("unknown builder spec '" + spec + "' (expected clique:n, tree, recursive)");
}

}  // namespace vor
