#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dyncut/clusters.hpp"
#include "dyncut/expander.hpp"
#include "dyncut/graph.hpp"
#include "dyncut/io.hpp"
#include "dyncut/params.hpp"

namespace dyncut {

/// What one bounded-mincut instance reports.
struct InstanceAnswer {
  enum class Kind { Value, AboveMax, BelowMin };
  Kind kind = Kind::AboveMax;
  Count value = -1;          // set for Value
  int level_index = -1;      // provenance for extract_cut
  VertexSet level_nodes;     // cut in that level's node ids
};

/// One bounded-mincut instance: the cluster hierarchy over its input
/// graph, maintained under edge updates with per-level restarts.
///
/// Level j+1's graph is the contraction of level j's clusters; node ids of
/// level j+1 equal cluster ids of level j. A level is Full (expander +
/// decomposition + recursion), Terminal (volume small enough that every
/// cut is local: one cluster, its mirror store sees everything), or
/// Trivial (≤ 2 nodes).
class Hierarchy {
 public:
  Hierarchy(const DynamicGraph& g, const Params& params) : params_(params) {
    params_.validate();
    levels_.push_back(std::make_unique<Level>(g));
    build_from(0);
  }

  void apply_update(const UpdateOp& op) {
    for (auto& lvl : levels_) lvl->ops_last_update = 0;
    if (op.kind == UpdateOp::Kind::Insert)
      process_at(0, {{LevelOp::Kind::Insert, op.u, op.v}});
    else
      process_at(0, {{LevelOp::Kind::Delete, op.u, op.v}});
  }

  InstanceAnswer query() const {
    bool frozen_any = false;
    std::optional<InstanceAnswer> best;
    auto consider = [&](Count value, int level, VertexSet nodes) {
      if (best && (best->value < value ||
                   (best->value == value &&
                    (best->level_index < level ||
                     (best->level_index == level && best->level_nodes < nodes)))))
        return;
      InstanceAnswer a;
      a.kind = InstanceAnswer::Kind::Value;
      a.value = value;
      a.level_index = level;
      a.level_nodes = std::move(nodes);
      best = std::move(a);
    };
    for (int j = 0; j < static_cast<int>(levels_.size()); ++j) {
      const Level& lvl = *levels_[j];
      if (lvl.decomp) {
        for (const auto& [cid, cl] : lvl.decomp->clusters()) {
          if (cl->frozen) {
            // The answer is BelowMin regardless, and a frozen engine's
            // store lags the graph (its buffer is holding updates back).
            frozen_any = true;
            continue;
          }
          const auto mc = cl->engine->min_mirror_cut();
          if (!mc) continue;
          VertexSet nodes = mc->contains_outside
                                ? set_minus(cl->members, mc->cluster_side)
                                : mc->cluster_side;
          if (nodes.empty() ||
              nodes.size() >= static_cast<std::size_t>(lvl.graph.num_vertices()))
            continue;
          consider(mc->value, j, std::move(nodes));
        }
      }
      if (lvl.kind == Level::Kind::Trivial && lvl.graph.num_vertices() == 2) {
        const std::vector<Vertex> two = lvl.graph.live_vertices();
        consider(lvl.graph.num_edges(), j, VertexSet{two[0]});
      }
    }
    if (frozen_any) return below_min();
    if (best && static_cast<double>(best->value) < params_.lambda_min)
      return below_min();
    if (best && static_cast<double>(best->value) <= params_.lambda_max)
      return *best;
    InstanceAnswer a;
    a.kind = InstanceAnswer::Kind::AboveMax;
    return a;
  }

  /// Uncontracts a Value answer down to the instance's own vertex ids.
  VertexSet extract_cut(const InstanceAnswer& answer) const {
    if (answer.kind != InstanceAnswer::Kind::Value)
      throw std::invalid_argument("extract_cut: answer carries no cut");
    VertexSet nodes = answer.level_nodes;
    for (int j = answer.level_index; j > 0; --j) {
      VertexSet lower;
      for (Vertex id : nodes.members) {
        const Cluster& cl = levels_[j - 1]->decomp->cluster(id);
        for (Vertex m : cl.members.members) lower.members.push_back(m);
      }
      lower.normalize();
      nodes = std::move(lower);
    }
    return nodes;
  }

  int num_levels() const { return static_cast<int>(levels_.size()); }
  const DynamicGraph& level_graph(int j) const { return levels_.at(j)->graph; }
  const ClusterDecomposition* level_decomp(int j) const {
    return levels_.at(j)->decomp.get();
  }
  const ExpanderDecomposition* level_expander(int j) const {
    return levels_.at(j)->expander.get();
  }
  long long level_restart_period(int j) const {
    return levels_.at(j)->restart_period;
  }
  long long level_updates_since_restart(int j) const {
    return levels_.at(j)->updates_since_restart;
  }
  long long restarts_performed() const { return restarts_; }

  /// Instrumented split cost summed over every decomposition that ever
  /// existed in this instance (restart rebuilds retire their counters here).
  Count lifetime_split_cost() const {
    Count total = retired_split_cost_;
    for (const auto& lvl : levels_)
      if (lvl->decomp) total += lvl->decomp->cumulative_split_cost();
    return total;
  }

  /// Ops received across all levels since construction (level-0 updates
  /// plus every translated op further down).
  long long lifetime_ops_received() const { return ops_received_total_; }

  /// Cached cluster boundaries must match the graphs everywhere.
  bool check_boundary_coherence() const {
    for (const auto& lvl : levels_)
      if (lvl->decomp && !lvl->decomp->check_boundary_coherence()) return false;
    return true;
  }

  /// Level j+1's graph must equal the contraction of level j's clusters.
  bool check_contraction_coherence() const {
    for (int j = 0; j + 1 < static_cast<int>(levels_.size()); ++j) {
      const Level& lvl = *levels_[j];
      const Level& next = *levels_[j + 1];
      if (!lvl.decomp) return false;
      std::map<std::pair<int, int>, Count> expected;
      for (Vertex u : lvl.graph.live_vertices()) {
        const int a = lvl.decomp->cluster_of(u);
        for (const auto& [v, mult] : lvl.graph.neighbors(u)) {
          if (u >= v) continue;
          const int b = lvl.decomp->cluster_of(v);
          if (a == b) continue;
          expected[{std::min(a, b), std::max(a, b)}] += mult;
        }
      }
      std::map<std::pair<int, int>, Count> actual;
      for (Vertex u : next.graph.live_vertices())
        for (const auto& [v, mult] : next.graph.neighbors(u))
          if (u < v) actual[{u, v}] += mult;
      if (expected != actual) return false;
      std::vector<Vertex> ids;
      for (const auto& [cid, cl] : lvl.decomp->clusters()) ids.push_back(cid);
      if (ids != next.graph.live_vertices()) return false;
    }
    return true;
  }

  /// Per-level CSV: level, nodes, edges, clusters, frozen, intercluster
  /// edges, ops received by this level in the last update.
  template <typename Stream>
  void dump_levels_csv(Stream& out) const {
    out << "level,nodes,edges,clusters,frozen,intercluster_edges,recourse\n";
    for (int j = 0; j < static_cast<int>(levels_.size()); ++j) {
      const Level& lvl = *levels_[j];
      std::size_t nclusters = 0;
      long long frozen = 0;
      Count inter = 0;
      if (lvl.decomp) {
        nclusters = lvl.decomp->clusters().size();
        for (const auto& [cid, cl] : lvl.decomp->clusters())
          if (cl->frozen) ++frozen;
        inter = lvl.decomp->intercluster_edge_count();
      }
      out << j << ',' << lvl.graph.num_vertices() << ',' << lvl.graph.num_edges()
          << ',' << nclusters << ',' << frozen << ',' << inter << ','
          << lvl.ops_last_update << '\n';
    }
  }

 private:
  struct Level {
    enum class Kind { Full, Terminal, Trivial };
    DynamicGraph graph;
    Kind kind = Kind::Trivial;
    std::unique_ptr<ExpanderDecomposition> expander;
    std::unique_ptr<ClusterDecomposition> decomp;
    long long updates_since_restart = 0;
    long long restart_period = 1;
    long long ops_last_update = 0;

    explicit Level(DynamicGraph g) : graph(std::move(g)) {}
  };

  static InstanceAnswer below_min() {
    InstanceAnswer a;
    a.kind = InstanceAnswer::Kind::BelowMin;
    return a;
  }

  long long period_for(Count m) const {
    const double raw =
        std::floor(static_cast<double>(m) * params_.phi / params_.rho) *
        params_.restart_factor;
    return std::max(1LL, static_cast<long long>(std::floor(raw)));
  }

  /// (Re)builds structures for level j (graph kept) and every level below.
  void build_from(int j) {
    for (std::size_t d = static_cast<std::size_t>(j); d < levels_.size(); ++d)
      if (levels_[d]->decomp)
        retired_split_cost_ += levels_[d]->decomp->cumulative_split_cost();
    levels_.resize(j + 1);
    bool force_terminal = false;
    for (int cur = j;; ++cur) {
      Level& lvl = *levels_[cur];
      lvl.expander.reset();
      lvl.decomp.reset();
      lvl.updates_since_restart = 0;
      lvl.restart_period = period_for(lvl.graph.num_edges());

      const int nodes = lvl.graph.num_vertices();
      const double vol = 2.0 * static_cast<double>(lvl.graph.num_edges());
      if (nodes <= 2) {
        lvl.kind = Level::Kind::Trivial;
        return;
      }
      if (force_terminal || vol <= params_.lambda_max / params_.phi ||
          cur + 1 >= params_.max_depth) {
        lvl.kind = Level::Kind::Terminal;
        lvl.decomp = std::make_unique<ClusterDecomposition>(
            &lvl.graph, &params_, level_seed(cur), true);
        lvl.decomp->init_single_cluster();
        lvl.decomp->drain_translations();
        return;
      }

      lvl.kind = Level::Kind::Full;
      ExpanderConfig cfg;
      cfg.exhaustive_limit = params_.exhaustive_limit;
      cfg.seed = level_seed(cur) ^ 0xEDEC;
      lvl.expander = std::make_unique<ExpanderDecomposition>(
          lvl.graph, params_.alpha, params_.phi, cfg);
      lvl.decomp = std::make_unique<ClusterDecomposition>(
          &lvl.graph, &params_, level_seed(cur), false);
      lvl.decomp->init_from_parts(*lvl.expander);
      lvl.decomp->drain_translations();  // initial build cascades via contraction

      bool progress = false;
      for (const auto& [cid, cl] : lvl.decomp->clusters())
        if (cl->members.size() >= 2) progress = true;

      DynamicGraph next(0);
      for (const auto& [cid, cl] : lvl.decomp->clusters())
        next.add_vertex_with_id(cid);
      for (Vertex u : lvl.graph.live_vertices()) {
        const int a = lvl.decomp->cluster_of(u);
        for (const auto& [v, mult] : lvl.graph.neighbors(u)) {
          if (u >= v) continue;
          const int b = lvl.decomp->cluster_of(v);
          if (a == b) continue;
          for (Count i = 0; i < mult; ++i) next.insert_edge(a, b);
        }
      }
      levels_.push_back(std::make_unique<Level>(std::move(next)));
      force_terminal = !progress;  // contraction stalled: stop one level down
    }
  }

  void process_at(int j, const std::vector<LevelOp>& ops) {
    if (j >= static_cast<int>(levels_.size()))
      throw std::logic_error("process_at: missing level");
    Level& lvl = *levels_[j];
    lvl.ops_last_update += static_cast<long long>(ops.size());
    ops_received_total_ += static_cast<long long>(ops.size());
    for (const LevelOp& op : ops) {
      switch (op.kind) {
        case LevelOp::Kind::Insert:
        case LevelOp::Kind::Delete: {
          const bool ins = op.kind == LevelOp::Kind::Insert;
          const UpdateOp edge =
              ins ? insert_op(op.u, op.v) : delete_op(op.u, op.v);
          apply_op(lvl.graph, edge);
          if (lvl.kind == Level::Kind::Trivial) break;
          lvl.decomp->apply_edge_op(edge);
          if (lvl.kind == Level::Kind::Full) {
            const ExpanderUpdateReport report = lvl.expander->apply_update(edge);
            for (const PartSplit& split : report.splits)
              lvl.decomp->force_partition_refinement(split.moved);
            std::set<int> affected;
            auto note = [&](Vertex x) {
              if (x >= 0) affected.insert(lvl.decomp->cluster_of(x));
            };
            note(op.u);
            note(op.v);
            for (const RecourseEvent& ev : report.events) {
              note(ev.u);
              note(ev.v);
            }
            for (int cid : affected)
              if (lvl.decomp->clusters().count(cid) &&
                  !lvl.decomp->cluster(cid).frozen)
                lvl.decomp->unchecked_budget_mark(cid);
            lvl.decomp->settle();
          }
          break;
        }
        case LevelOp::Kind::AddNode:
          lvl.graph.add_vertex_with_id(op.u);
          if (lvl.kind == Level::Kind::Full) {
            lvl.expander->add_singleton(op.u);
            lvl.decomp->add_singleton_cluster(op.u);
          } else if (lvl.kind == Level::Kind::Terminal) {
            lvl.decomp->terminal_add_member(op.u);
          }
          break;
        case LevelOp::Kind::RemoveNode:
          lvl.graph.remove_vertex(op.u);
          if (lvl.kind == Level::Kind::Full) {
            lvl.expander->remove_isolated(op.u);
            lvl.decomp->remove_member(op.u);
          } else if (lvl.kind == Level::Kind::Terminal) {
            lvl.decomp->remove_member(op.u);
          }
          break;
      }
      ++lvl.updates_since_restart;
    }

    if (lvl.updates_since_restart >= lvl.restart_period) {
      ++restarts_;
      build_from(j);
      return;
    }
    if (lvl.kind == Level::Kind::Trivial) {
      if (lvl.graph.num_vertices() > 2) build_from(j);
      return;
    }
    if (lvl.kind == Level::Kind::Full && lvl.graph.num_vertices() <= 2) {
      build_from(j);
      return;
    }
    std::vector<LevelOp> out = lvl.decomp->drain_translations();
    if (lvl.kind == Level::Kind::Terminal) return;  // bottom of the stack
    if (!out.empty()) process_at(j + 1, out);
  }

  std::uint64_t level_seed(int level) const {
    return hash_combine(params_.seed, 0x11BB00 + static_cast<std::uint64_t>(level));
  }

  Params params_;
  std::vector<std::unique_ptr<Level>> levels_;
  long long restarts_ = 0;
  Count retired_split_cost_ = 0;
  long long ops_received_total_ = 0;
};

}  // namespace dyncut
