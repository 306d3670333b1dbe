#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "dyncut/expander.hpp"
#include "dyncut/graph.hpp"
#include "dyncut/io.hpp"
#include "dyncut/local_cut.hpp"
#include "dyncut/mirror.hpp"
#include "dyncut/params.hpp"
#include "dyncut/rng.hpp"

namespace dyncut {

/// Op forwarded from one hierarchy level to the next (contracted) one.
struct LevelOp {
  enum class Kind { Insert, Delete, AddNode, RemoveNode };
  Kind kind = Kind::Insert;
  int u = -1;
  int v = -1;
};

/// One cluster of a level's decomposition.
struct Cluster {
  int id = -1;
  VertexSet members;
  Count boundary_size = 0;
  bool frozen = false;
  std::vector<UpdateOp> pending;  // ops awaiting marking, queued while frozen
  std::set<Vertex> unchecked;
  std::unique_ptr<MirrorEngine> engine;
};

/// Φ(C) = max{0, ∂C − 2.1·λmax}, the split-potential diagnostic.
inline double cluster_potential(Count boundary_size, double lambda_max) {
  return std::max(0.0, static_cast<double>(boundary_size) - 2.1 * lambda_max);
}

struct SplitRecord {
  int parent_id = -1;
  int kept_id = -1;
  int new_id = -1;
  Count parent_boundary = 0;  // ∂C at split time
  Count kept_boundary = 0;    // ∂(C∖S) after
  Count new_boundary = 0;     // ∂S after
  Count w_cross = 0;          // w(S, C∖S) at split time
  Count smaller_volume = 0;   // instrumented split cost
  bool forced = false;        // expander-forced refinement
  Vertex trigger = -1;        // starting vertex of the discovering run
};

/// Partition of one level's vertices into clusters, with the engines,
/// checked marks, freezing and split machinery of the decomposition loop.
/// Ops arrive after the level graph has been mutated; translations for the
/// next level accumulate until drained.
class ClusterDecomposition {
 public:
  enum class FindOutcome { Split, Frozen, AllChecked };

  ClusterDecomposition(const DynamicGraph* g, const Params* params,
                       std::uint64_t seed, bool terminal)
      : g_(g), params_(params), seed_(seed), terminal_(terminal) {
    cluster_of_.assign(g_->capacity(), -1);
    ext_adj_.assign(g_->capacity(), {});
  }

  ClusterDecomposition(const ClusterDecomposition&) = delete;
  ClusterDecomposition& operator=(const ClusterDecomposition&) = delete;

  bool terminal() const { return terminal_; }

  /// Fresh decomposition from expander parts: clusters mirror the parts,
  /// vertices incident to an inter-expander edge start unchecked, engines
  /// come up (and freeze) per cluster, then the find-and-cut loop runs.
  void init_from_parts(const ExpanderDecomposition& ed, bool run_settle = true) {
    std::vector<VertexSet> parts;
    for (const auto& [pid, part] : ed.parts()) parts.push_back(part);
    init_from_partition(parts, run_settle);
  }

  /// Same, from an explicit partition (cross-part edges play the role of
  /// inter-expander edges for the initial marking).
  void init_from_partition(const std::vector<VertexSet>& parts,
                           bool run_settle = true) {
    for (const VertexSet& part : parts) {
      const int cid = next_id_++;
      auto cl = std::make_unique<Cluster>();
      cl->id = cid;
      cl->members = part;
      for (Vertex v : part.members) cluster_of_[v] = cid;
      clusters_[cid] = std::move(cl);
    }
    rebuild_ext();
    for (Vertex v = 0; v < static_cast<Vertex>(ext_adj_.size()); ++v)
      if (!ext_adj_[v].empty()) mark_unchecked(v);
    for (auto& [cid, cl] : clusters_) attach_engine(*cl);
    if (run_settle) settle();
  }

  /// Terminal level: everything in one cluster; all cuts there are local,
  /// so the mirror store alone covers them and no splitting is needed.
  void init_single_cluster() {
    const std::vector<Vertex> live = g_->live_vertices();
    if (live.empty()) return;
    const int cid = next_id_++;
    auto cl = std::make_unique<Cluster>();
    cl->id = cid;
    cl->members = VertexSet(live);
    for (Vertex v : live) cluster_of_[v] = cid;
    clusters_[cid] = std::move(cl);
    attach_engine(*clusters_[cid]);
  }

  const std::map<int, std::unique_ptr<Cluster>>& clusters() const {
    return clusters_;
  }
  const Cluster& cluster(int id) const { return *clusters_.at(id); }

  int cluster_of(Vertex v) const {
    if (v < 0 || v >= static_cast<int>(cluster_of_.size()) || cluster_of_[v] < 0)
      throw std::invalid_argument("cluster_of: unknown vertex");
    return cluster_of_[v];
  }

  bool any_frozen() const {
    for (const auto& [id, cl] : clusters_)
      if (cl->frozen) return true;
    return false;
  }

  std::vector<LevelOp> drain_translations() {
    std::vector<LevelOp> out;
    out.swap(translations_);
    return out;
  }

  const std::vector<SplitRecord>& split_log() const { return split_log_; }
  const std::map<Vertex, int>& responsibility() const { return responsibility_; }
  Count cumulative_split_cost() const { return split_cost_; }

  /// Def 2.3 test against the cached boundary size: w(U,C∖U) <
  /// (1−ε)·min{w(U,V∖C), ∂C − w(U,V∖C)}.
  bool is_boundary_sparse(int cluster_id, const VertexSet& u) const {
    const Cluster& c = cluster(cluster_id);
    if (u.empty() || u.size() >= c.members.size())
      throw std::invalid_argument("is_boundary_sparse: need ∅ ⊊ U ⊊ C");
    Count w_in = 0, w_out = 0;
    for (Vertex x : u.members) {
      if (!c.members.contains(x))
        throw std::invalid_argument("is_boundary_sparse: U not inside C");
      for (const auto& [y, mult] : g_->neighbors(x)) {
        if (u.contains(y)) continue;
        if (c.members.contains(y))
          w_in += mult;
        else
          w_out += mult;
      }
    }
    return sparse_test(w_in, w_out, c.boundary_size);
  }

  /// One edge op (already applied to the level graph): engine feeds,
  /// boundary bookkeeping, marking or queueing, translation emission.
  void apply_edge_op(const UpdateOp& op) {
    const bool ins = op.kind == UpdateOp::Kind::Insert;
    const int a = cluster_of(op.u);
    const int b = cluster_of(op.v);
    Cluster& ca = *clusters_.at(a);
    if (a == b) {
      ca.engine->edge_op_internal(ins, op.u, op.v);
      sync_frozen(ca);
      mark_or_queue(ca, op);
      return;
    }
    Cluster& cb = *clusters_.at(b);
    bump_ext(op.u, op.v, ins ? 1 : -1);
    bump_ext(op.v, op.u, ins ? 1 : -1);
    ca.boundary_size += ins ? 1 : -1;
    cb.boundary_size += ins ? 1 : -1;
    ca.engine->edge_op_boundary(ins, op.u);
    cb.engine->edge_op_boundary(ins, op.v);
    translations_.push_back(
        {ins ? LevelOp::Kind::Insert : LevelOp::Kind::Delete, a, b});
    sync_frozen(ca);
    sync_frozen(cb);
    mark_or_queue(ca, op);
    mark_or_queue(cb, op);
  }

  /// Marks up to ⌈2λmax⌉ checked boundary endpoints of C unchecked, in
  /// deterministic boundary-list order.
  void unchecked_budget_mark(int cluster_id) {
    Cluster& c = *clusters_.at(cluster_id);
    long long budget = params_->budget_mark_count();
    for (Vertex x : c.members.members) {
      if (budget <= 0) break;
      if (ext_adj_[x].empty()) continue;
      if (c.unchecked.count(x)) continue;
      c.unchecked.insert(x);
      --budget;
    }
  }

  /// The expander reclassified `moved` into a new part: every cluster
  /// straddling the new boundary is split along it.
  void force_partition_refinement(const VertexSet& moved) {
    std::vector<std::pair<int, VertexSet>> jobs;
    for (const auto& [cid, cl] : clusters_) {
      VertexSet inside = set_intersect(cl->members, moved);
      if (inside.empty() || inside.size() == cl->members.size()) continue;
      jobs.emplace_back(cid, std::move(inside));
    }
    for (auto& [cid, side] : jobs) split_cluster(cid, side, -1, true);
  }

  /// Processes unchecked vertices of one unfrozen cluster: a batch of
  /// local-cut runs per vertex, sparse test per returned prefix. First
  /// sparse cut below λmin freezes the cluster; otherwise it splits.
  FindOutcome find_and_cut(int cluster_id) {
    Cluster* c = clusters_.at(cluster_id).get();
    if (c->frozen)
      throw std::invalid_argument("find_and_cut: cluster is frozen");
    if (c->boundary_size == 0) {
      // No boundary: no subset can be boundary-sparse.
      c->unchecked.clear();
      return FindOutcome::AllChecked;
    }

    // Induced subgraph of the cluster, in compact local ids.
    const std::vector<Vertex>& mem = c->members.members;
    const int nloc = static_cast<int>(mem.size());
    std::map<Vertex, int> local;
    for (int i = 0; i < nloc; ++i) local[mem[i]] = i;
    DynamicGraph induced(nloc);
    std::vector<Count> ext_deg(nloc, 0);
    for (int i = 0; i < nloc; ++i) {
      for (const auto& [y, mult] : g_->neighbors(mem[i])) {
        auto it = local.find(y);
        if (it == local.end())
          ext_deg[i] += mult;
        else if (i < it->second)
          for (Count r = 0; r < mult; ++r) induced.insert_edge(i, it->second);
      }
    }
    LocalCutBatchRunner runner(induced);
    NestedCutChain chain;

    while (!c->unchecked.empty()) {
      const Vertex v = *c->unchecked.begin();
      LocalCutParams lp;
      lp.nu = params_->lambda_max / params_->phi;
      lp.k = params_->lambda_max;
      lp.trials = 1;
      lp.seed = hash_combine(seed_, ++batch_counter_);
      const long long trials = params_->find_and_cut_trials();
      std::optional<VertexSet> sparse_side;
      Count sparse_bg = 0;
      for (long long run = 0; run < trials && !sparse_side; ++run) {
        runner.run_into(local.at(v), lp, static_cast<std::uint64_t>(run), chain);
        for (const auto& cp : chain.checkpoints) {
          if (cp.prefix_len >= nloc) continue;  // S must be ⊊ C
          Count w_out = 0;
          for (int i = 0; i < cp.prefix_len; ++i)
            w_out += ext_deg[chain.growth_order[i]];
          if (!sparse_test(cp.boundary, w_out, c->boundary_size)) continue;
          VertexSet side;  // growth order is in local ids; map back
          for (int i = 0; i < cp.prefix_len; ++i)
            side.members.push_back(mem[chain.growth_order[i]]);
          side.normalize();
          sparse_side = std::move(side);
          sparse_bg = cp.boundary + w_out;  // ∂ in the level graph
          break;
        }
      }
      if (sparse_side) {
        if (static_cast<double>(sparse_bg) < params_->lambda_min) {
          // Below λmin: freeze instead of splitting; the buffer owns the
          // stored cut from here on.
          c->engine->force_small_cut(*sparse_side, false);
          sync_frozen(*c);
          return FindOutcome::Frozen;
        }
        split_cluster(cluster_id, *sparse_side, v, false);
        return FindOutcome::Split;
      }
      c->unchecked.erase(v);
    }
    return FindOutcome::AllChecked;
  }

  /// Runs find_and_cut until no unfrozen cluster has an unchecked vertex.
  void settle() {
    for (long long guard = 0;; ++guard) {
      if (guard > 1'000'000)
        throw std::logic_error("settle: did not quiesce");
      int pick = -1;
      for (const auto& [cid, cl] : clusters_)
        if (!cl->frozen && !cl->unchecked.empty()) {
          pick = cid;
          break;
        }
      if (pick < 0) return;
      find_and_cut(pick);
    }
  }

  /// Splits C along S. The smaller-volume side (lockstep comparison) gets
  /// a fresh engine; the larger keeps the parent's via a set deletion.
  /// Both children take fresh ids: the next level sees the parent node
  /// replaced by two new nodes.
  std::pair<int, int> split_cluster(int cluster_id, const VertexSet& s,
                                    Vertex trigger, bool forced) {
    Cluster& parent = *clusters_.at(cluster_id);
    if (s.empty() || s.size() >= parent.members.size())
      throw std::invalid_argument("split_cluster: need ∅ ⊊ S ⊊ C");
    for (Vertex x : s.members)
      if (!parent.members.contains(x))
        throw std::invalid_argument("split_cluster: S not inside C");

    const VertexSet rest = set_minus(parent.members, s);
    // Lockstep volume comparison; the accumulated smaller volume is the
    // instrumented cost of this split.
    Count vol_s = 0, vol_r = 0;
    {
      std::size_t is = 0, ir = 0;
      while (is < s.size() && ir < rest.size()) {
        if (vol_s <= vol_r)
          vol_s += g_->degree(s.members[is++]);
        else
          vol_r += g_->degree(rest.members[ir++]);
      }
      while (is < s.size()) vol_s += g_->degree(s.members[is++]);
      while (ir < rest.size()) vol_r += g_->degree(rest.members[ir++]);
    }
    bool s_is_small = vol_s < vol_r;
    if (vol_s == vol_r)
      s_is_small = s.members.front() == parent.members.members.front();
    const VertexSet& small = s_is_small ? s : rest;
    const VertexSet& large = s_is_small ? rest : s;
    const Count smaller_volume = std::min(vol_s, vol_r);
    split_cost_ += smaller_volume;

    // Translation: the parent node disappears with its edges, two new
    // nodes arrive with the children's boundary lists.
    std::map<int, Count> parent_adj;
    for (Vertex x : parent.members.members)
      for (const auto& [y, mult] : ext_adj_[x]) parent_adj[cluster_of_[y]] += mult;
    for (const auto& [nbr, count] : parent_adj)
      for (Count i = 0; i < count; ++i)
        translations_.push_back({LevelOp::Kind::Delete, cluster_id, nbr});
    translations_.push_back({LevelOp::Kind::RemoveNode, cluster_id, -1});

    // Child clusters: S keeps the sparse side's identity in the split
    // record; engines follow volume.
    const int id_s = next_id_++;
    const int id_rest = next_id_++;
    auto cl_s = std::make_unique<Cluster>();
    auto cl_rest = std::make_unique<Cluster>();
    cl_s->id = id_s;
    cl_s->members = s;
    cl_rest->id = id_rest;
    cl_rest->members = rest;

    Count w_cross = 0;
    std::vector<std::pair<Vertex, Vertex>> cut_endpoints;
    for (Vertex x : small.members)
      for (const auto& [y, mult] : g_->neighbors(x))
        if (large.contains(y)) {
          w_cross += mult;
          bump_ext(x, y, mult);
          bump_ext(y, x, mult);
          cut_endpoints.emplace_back(x, y);
        }

    Count s_old_ext = 0;
    for (Vertex x : s.members)
      for (const auto& [y, mult] : ext_adj_[x])
        if (!rest.contains(y) && !s.contains(y)) s_old_ext += mult;
    cl_s->boundary_size = s_old_ext + w_cross;
    cl_rest->boundary_size = parent.boundary_size - s_old_ext + w_cross;

    // Engines: larger side inherits via set deletion, smaller is rebuilt.
    std::unique_ptr<MirrorEngine> inherited = std::move(parent.engine);
    inherited->set_delete(small);
    auto fresh = std::make_unique<MirrorEngine>(
        *g_, small, params_, hash_combine(seed_, 0xC0FFEE + next_id_));
    (s_is_small ? cl_s : cl_rest)->engine = std::move(fresh);
    (s_is_small ? cl_rest : cl_s)->engine = std::move(inherited);

    // Distribute marks: surviving unchecked marks, endpoints of newly cut
    // edges, and (organic splits) the trigger stays unchecked.
    for (Vertex x : parent.unchecked)
      (s.contains(x) ? cl_s : cl_rest)->unchecked.insert(x);
    for (const auto& [x, y] : cut_endpoints) {
      (s.contains(x) ? cl_s : cl_rest)->unchecked.insert(x);
      (s.contains(y) ? cl_s : cl_rest)->unchecked.insert(y);
    }
    if (trigger >= 0)
      (s.contains(trigger) ? cl_s : cl_rest)->unchecked.insert(trigger);

    for (Vertex x : s.members) cluster_of_[x] = id_s;
    for (Vertex x : rest.members) cluster_of_[x] = id_rest;

    cl_s->frozen = cl_s->engine->has_small_cut();
    cl_rest->frozen = cl_rest->engine->has_small_cut();
    for (const UpdateOp& op : parent.pending) {
      for (Cluster* child : {cl_s.get(), cl_rest.get()}) {
        const bool iu = child->members.contains(op.u);
        const bool iv = child->members.contains(op.v);
        if (!iu && !iv) continue;
        if (child->frozen) {
          child->pending.push_back(op);
        } else {
          if (iu) child->unchecked.insert(op.u);
          if (iv) child->unchecked.insert(op.v);
        }
      }
    }

    emit_node_birth(*cl_s, id_rest);
    emit_node_birth(*cl_rest, id_s);
    for (Count i = 0; i < w_cross; ++i)
      translations_.push_back({LevelOp::Kind::Insert, id_s, id_rest});

    SplitRecord rec;
    rec.parent_id = cluster_id;
    rec.kept_id = id_rest;
    rec.new_id = id_s;
    rec.parent_boundary = parent.boundary_size;
    rec.kept_boundary = cl_rest->boundary_size;
    rec.new_boundary = cl_s->boundary_size;
    rec.w_cross = w_cross;
    rec.smaller_volume = smaller_volume;
    rec.forced = forced;
    rec.trigger = trigger;
    split_log_.push_back(rec);
    if (!forced && trigger >= 0) responsibility_[trigger] += 1;

    clusters_.erase(cluster_id);
    clusters_[id_s] = std::move(cl_s);
    clusters_[id_rest] = std::move(cl_rest);
    return {id_rest, id_s};
  }

  /// Explicit freeze; requires the buffer to actually report a small cut.
  void freeze(int cluster_id) {
    Cluster& c = *clusters_.at(cluster_id);
    if (!c.engine->has_small_cut())
      throw std::invalid_argument("freeze: buffer reports no small cut");
    c.frozen = true;
  }

  /// Explicit unfreeze: replays the queued ops through the marking path.
  void unfreeze_and_replay(int cluster_id) {
    Cluster& c = *clusters_.at(cluster_id);
    if (c.engine->has_small_cut())
      throw std::invalid_argument(
          "unfreeze_and_replay: a cut below lambda_min still exists");
    c.frozen = false;
    std::vector<UpdateOp> pend = std::move(c.pending);
    c.pending.clear();
    for (const UpdateOp& op : pend) {
      if (c.members.contains(op.u)) c.unchecked.insert(op.u);
      if (c.members.contains(op.v)) c.unchecked.insert(op.v);
    }
    unchecked_budget_mark(cluster_id);
  }

  /// New contracted node arrives as its own singleton cluster.
  void add_singleton_cluster(Vertex v) {
    const int cid = next_id_++;
    if (v >= static_cast<int>(cluster_of_.size())) {
      cluster_of_.resize(v + 1, -1);
      ext_adj_.resize(v + 1);
    }
    auto cl = std::make_unique<Cluster>();
    cl->id = cid;
    cl->members = {v};
    cluster_of_[v] = cid;
    clusters_[cid] = std::move(cl);
    attach_engine(*clusters_[cid]);
    translations_.push_back({LevelOp::Kind::AddNode, cid, -1});
  }

  /// Terminal level: the single cluster absorbs a new node.
  void terminal_add_member(Vertex v) {
    if (v >= static_cast<int>(cluster_of_.size())) {
      cluster_of_.resize(v + 1, -1);
      ext_adj_.resize(v + 1);
    }
    if (clusters_.empty()) {
      init_single_cluster_for(v);
      return;
    }
    Cluster& c = *clusters_.begin()->second;
    c.members.insert(v);
    cluster_of_[v] = c.id;
    c.engine->add_member(v);
    sync_frozen(c);
  }

  /// A contracted node was removed (it is already isolated in the graph).
  void remove_member(Vertex v) {
    const int cid = cluster_of(v);
    Cluster& c = *clusters_.at(cid);
    if (!ext_adj_[v].empty()) {
      std::string msg = "remove_member: vertex " + std::to_string(v) +
                        " still has boundary entries:";
      for (const auto& [y, m] : ext_adj_[v])
        msg += " (" + std::to_string(y) + "," + std::to_string(m) + ")";
      throw std::logic_error(msg);
    }
    if (c.members.size() == 1) {
      translations_.push_back({LevelOp::Kind::RemoveNode, cid, -1});
      clusters_.erase(cid);
    } else {
      c.engine->set_delete(VertexSet{v});
      c.members.erase(v);
      c.unchecked.erase(v);
      sync_frozen(c);
    }
    cluster_of_[v] = -1;
  }

  /// Per-cluster CSV: id, member count, boundary, frozen, unchecked, Φ.
  template <typename Stream>
  void dump_csv(Stream& out) const {
    out << "id,members,boundary_size,frozen,unchecked,phi\n";
    for (const auto& [cid, cl] : clusters_)
      out << cid << ',' << cl->members.size() << ',' << cl->boundary_size << ','
          << (cl->frozen ? 1 : 0) << ',' << cl->unchecked.size() << ','
          << cluster_potential(cl->boundary_size, params_->lambda_max) << '\n';
  }

  /// Revalidates the partition and the cached boundary bookkeeping
  /// against the graph: clusters disjointly cover the live vertices and
  /// every boundary cache matches a recomputation.
  bool check_boundary_coherence() const {
    std::map<Vertex, int> seen;
    for (const auto& [cid, cl] : clusters_)
      for (Vertex x : cl->members.members) {
        if (seen.count(x) || cluster_of_[x] != cid) return false;
        seen[x] = cid;
      }
    for (Vertex v : g_->live_vertices())
      if (!seen.count(v)) return false;
    for (const auto& [cid, cl] : clusters_) {
      Count recomputed = 0;
      for (Vertex x : cl->members.members) {
        std::map<Vertex, Count> ext;
        for (const auto& [y, mult] : g_->neighbors(x))
          if (cluster_of_[y] != cid) {
            ext[y] = mult;
            recomputed += mult;
          }
        if (ext != ext_adj_[x]) return false;
      }
      if (recomputed != cl->boundary_size) return false;
    }
    return true;
  }

  Count intercluster_edge_count() const {
    Count total = 0;
    for (const auto& [cid, cl] : clusters_) total += cl->boundary_size;
    return total / 2;
  }

 private:
  bool sparse_test(Count w_in, Count w_out, Count boundary_size) const {
    const Count w_rest = boundary_size - w_out;
    return static_cast<double>(w_in) <
           (1.0 - params_->eps) * static_cast<double>(std::min(w_out, w_rest));
  }

  void mark_unchecked(Vertex v) {
    const int cid = cluster_of_[v];
    if (cid >= 0) clusters_.at(cid)->unchecked.insert(v);
  }

  void mark_or_queue(Cluster& c, const UpdateOp& op) {
    if (c.frozen) {
      c.pending.push_back(op);
      return;
    }
    if (c.members.contains(op.u)) c.unchecked.insert(op.u);
    if (c.members.contains(op.v)) c.unchecked.insert(op.v);
  }

  void sync_frozen(Cluster& c) {
    if (!c.frozen && c.engine->has_small_cut()) {
      freeze(c.id);
    } else if (c.frozen && !c.engine->has_small_cut()) {
      unfreeze_and_replay(c.id);
    }
  }

  void bump_ext(Vertex u, Vertex v, Count delta) {
    auto& m = ext_adj_[u];
    const Count now = (m[v] += delta);
    if (now < 0) throw std::logic_error("ext_adj went negative");
    if (now == 0) m.erase(v);
  }

  void rebuild_ext() {
    for (auto& m : ext_adj_) m.clear();
    for (Vertex u : g_->live_vertices())
      for (const auto& [w, mult] : g_->neighbors(u))
        if (cluster_of_[u] != cluster_of_[w]) ext_adj_[u][w] = mult;
    for (auto& [cid, cl] : clusters_) {
      cl->boundary_size = 0;
      for (Vertex x : cl->members.members)
        for (const auto& [y, mult] : ext_adj_[x]) cl->boundary_size += mult;
    }
  }

  void attach_engine(Cluster& c) {
    c.engine = std::make_unique<MirrorEngine>(
        *g_, c.members, params_, hash_combine(seed_, 0xE116 + c.id));
    c.frozen = c.engine->has_small_cut();
  }

  void init_single_cluster_for(Vertex v) {
    const int cid = next_id_++;
    auto cl = std::make_unique<Cluster>();
    cl->id = cid;
    cl->members = {v};
    cluster_of_[v] = cid;
    clusters_[cid] = std::move(cl);
    attach_engine(*clusters_[cid]);
  }

  /// AddNode for a fresh child plus its boundary edges, except those to
  /// the split sibling (emitted once, by the caller).
  void emit_node_birth(const Cluster& c, int sibling_id) {
    translations_.push_back({LevelOp::Kind::AddNode, c.id, -1});
    std::map<int, Count> adj;
    for (Vertex x : c.members.members)
      for (const auto& [y, mult] : ext_adj_[x]) adj[cluster_of_[y]] += mult;
    for (const auto& [nbr, count] : adj) {
      if (nbr == sibling_id) continue;
      for (Count i = 0; i < count; ++i)
        translations_.push_back({LevelOp::Kind::Insert, c.id, nbr});
    }
  }

  const DynamicGraph* g_;
  const Params* params_;
  std::uint64_t seed_;
  bool terminal_;
  std::uint64_t batch_counter_ = 0;
  int next_id_ = 0;
  std::map<int, std::unique_ptr<Cluster>> clusters_;
  std::vector<int> cluster_of_;
  std::vector<std::map<Vertex, Count>> ext_adj_;  // per-vertex boundary edges
  std::vector<LevelOp> translations_;
  std::vector<SplitRecord> split_log_;
  std::map<Vertex, int> responsibility_;
  Count split_cost_ = 0;
};

}  // namespace dyncut
