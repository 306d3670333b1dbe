#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "dyncut/graph.hpp"
#include "dyncut/local_cut.hpp"
#include "dyncut/params.hpp"
#include "dyncut/rng.hpp"

namespace dyncut {

/// Update against a mirror graph, in the engine's local vertex ids.
struct MirrorOp {
  enum class Kind { Insert, Delete, SetDelete, AddVertex };
  Kind kind = Kind::Insert;
  int u = -1;
  int v = -1;
  std::vector<int> set;  // SetDelete payload

  Count op_volume(const DynamicGraph& working) const {
    if (kind != Kind::SetDelete) return 1;
    Count vol = 0;
    for (int x : set) vol += working.degree(x);
    return vol;
  }
};

/// Store of mirror cuts over the forwarded graph: for each vertex, the
/// cheapest known local cut through it with value ≤ λmax, with full
/// back-pointers so updates can touch exactly the records they cross.
class MirrorCutStore {
 public:
  struct Record {
    std::vector<int> members;  // sorted local ids, may include `outside`
    Count value = 0;
    Count volume = 0;
    std::set<int> mirror_of;  // vertices this record is the stored cut of
  };

  MirrorCutStore(const DynamicGraph* forwarded, const Params* params, int outside,
                 std::uint64_t seed, std::function<int()> proper_limit)
      : g_(forwarded),
        params_(params),
        outside_(outside),
        seed_(seed),
        proper_limit_(std::move(proper_limit)) {}

  bool initialized() const { return initialized_; }
  const std::map<int, Record>& records() const { return records_; }

  std::optional<std::pair<int, Count>> stored_for(int v) const {
    auto it = stored_.find(v);
    if (it == stored_.end()) return std::nullopt;
    return std::make_pair(it->second, records_.at(it->second).value);
  }

  /// Full preprocessing: process every cluster vertex.
  void preprocess() {
    initialized_ = true;
    for (Vertex v : g_->live_vertices())
      if (v != outside_) process(v);
  }

  /// Batch of local-cut runs from v; every output of value ≤ λmax updates
  /// the stored cut of each of its members if strictly smaller.
  void process(int v) {
    if (v == outside_ || !g_->is_live(v)) return;
    LocalCutParams lp;
    lp.nu = params_->mirror_nu();
    lp.k = params_->lambda_max;
    lp.trials = params_->mirror_trials();
    lp.seed = hash_combine(seed_, ++batch_counter_);
    std::vector<Cut> cuts = batch_local_k_cut(*g_, v, lp);
    std::sort(cuts.begin(), cuts.end(), [](const Cut& a, const Cut& b) {
      if (a.boundary != b.boundary) return a.boundary < b.boundary;
      if (a.volume != b.volume) return a.volume < b.volume;
      return a.side < b.side;
    });
    const int limit = proper_limit_();
    for (const Cut& cut : cuts) {
      if (static_cast<double>(cut.boundary) > params_->lambda_max) continue;
      if (static_cast<int>(cut.side.size()) >= limit) continue;
      apply_candidate(cut);
    }
  }

  /// Removes u from the record's mirror-of list; the record itself is
  /// dropped once nobody points at it.
  void mirror_delete(int record_id, int u) {
    auto it = records_.find(record_id);
    if (it == records_.end() || !it->second.mirror_of.count(u))
      throw std::invalid_argument("mirror_delete: u is not in the mirror-of list");
    it->second.mirror_of.erase(u);
    auto st = stored_.find(u);
    if (st != stored_.end() && st->second == record_id) stored_.erase(st);
    if (it->second.mirror_of.empty())

      drop_record(record_id);
  }

  /// Stored cut of minimum value; ties by volume then lexicographic set.
  std::optional<Cut> min_mirror_cut() const {
    const Record* best = nullptr;
    const int limit = proper_limit_();
    for (const auto& [id, rec] : records_) {
      if (rec.mirror_of.empty()) continue;
      if (static_cast<int>(rec.members.size()) >= limit) continue;
      if (!best || rec.value < best->value ||
          (rec.value == best->value &&
           (rec.volume < best->volume ||
            (rec.volume == best->volume && rec.members < best->members))))
        best = &rec;
    }
    if (!best) return std::nullopt;
    Cut c;
    c.side = VertexSet(best->members);
    c.boundary = best->value;
    c.volume = best->volume;
    return c;
  }

  // -- update handlers; the forwarded graph is already mutated --

  void handle_insert(int u, int v) {
    std::set<int> touched = records_containing(u);
    for (int id : records_containing(v)) touched.insert(id);
    std::vector<int> increased;
    for (int id : touched) {
      Record& rec = records_.at(id);
      const bool cu = member_of(rec, u), cv = member_of(rec, v);
      if (cu != cv) {
        rec.value += 1;
        for (int w : rec.mirror_of) increased.push_back(w);
      }
      rec.volume += (cu ? 1 : 0) + (cv ? 1 : 0);
      if (!(static_cast<double>(rec.volume) < params_->mirror_nu()))
        for (int w : rec.mirror_of) increased.push_back(w);
    }
    std::sort(increased.begin(), increased.end());
    increased.erase(std::unique(increased.begin(), increased.end()),
                    increased.end());
    for (int w : increased) process(w);
    retire_invalid_assignments(increased);
  }

  void handle_delete(int u, int v) {
    std::set<int> touched = records_containing(u);
    for (int id : records_containing(v)) touched.insert(id);
    for (int id : touched) {
      Record& rec = records_.at(id);
      const bool cu = member_of(rec, u), cv = member_of(rec, v);
      if (cu != cv) rec.value -= 1;
      rec.volume -= (cu ? 1 : 0) + (cv ? 1 : 0);
    }
    process(u);
    process(v);
  }

  /// `adjacent` lists the surviving vertices that had an edge into the
  /// deleted set (computed by the engine before the graph was rewritten).
  void handle_set_delete(const std::vector<int>& deleted,
                         const std::vector<int>& adjacent) {
    std::vector<int> reprocess = adjacent;
    // Fix every record exactly: membership shrinks, values and volumes are
    // recomputed on the rewritten graph, emptied or overweight records go.
    std::vector<int> ids;
    for (const auto& [id, rec] : records_) ids.push_back(id);
    const int live = g_->num_vertices();
    for (int id : ids) {
      Record& rec = records_.at(id);
      std::vector<int> kept;
      for (int m : rec.members)
        if (!std::binary_search(deleted.begin(), deleted.end(), m))
          kept.push_back(m);
      const bool members_changed = kept.size() != rec.members.size();
      const Count old_value = rec.value;
      if (kept.empty() || static_cast<int>(kept.size()) >= live) {
        for (int w : rec.mirror_of) reprocess.push_back(w);
        drop_record(id);
        continue;
      }
      if (members_changed && !reindex_record(id, kept)) continue;
      Record& alive = records_.at(id);
      VertexSet side{kept};
      alive.value = g_->boundary(side);
      alive.volume = g_->volume(side);
      const bool invalid =
          static_cast<double>(alive.value) > params_->lambda_max ||
          !(static_cast<double>(alive.volume) < params_->mirror_nu());
      if (invalid || alive.value > old_value)
        for (int w : alive.mirror_of) reprocess.push_back(w);
      if (invalid) drop_record(id);
    }
    for (int x : deleted) {
      stored_.erase(x);
      contained_in_.erase(x);
    }
    std::sort(reprocess.begin(), reprocess.end());
    reprocess.erase(std::unique(reprocess.begin(), reprocess.end()),
                    reprocess.end());
    for (int w : reprocess)
      if (g_->is_live(w)) process(w);
    retire_invalid_assignments(reprocess);
  }

  void handle_add_vertex(int v) { process(v); }

 private:
  bool member_of(const Record& rec, int v) const {
    return std::binary_search(rec.members.begin(), rec.members.end(), v);
  }

  std::set<int> records_containing(int v) const {
    auto it = contained_in_.find(v);
    return it == contained_in_.end() ? std::set<int>{} : it->second;
  }

  void apply_candidate(const Cut& cut) {
    for (Vertex u : cut.side.members) {
      if (u == outside_) continue;
      auto st = stored_.find(u);
      if (st != stored_.end() &&
          records_.at(st->second).value <= cut.boundary)
        continue;
      const int id = intern_record(cut);
      if (st != stored_.end()) mirror_delete(st->second, u);
      records_.at(id).mirror_of.insert(u);
      stored_[u] = id;
    }
  }

  int intern_record(const Cut& cut) {
    auto it = index_.find(cut.side.members);
    if (it != index_.end()) return it->second;
    const int id = next_id_++;
    Record rec;
    rec.members = cut.side.members;
    rec.value = cut.boundary;
    rec.volume = cut.volume;
    records_[id] = std::move(rec);
    index_[cut.side.members] = id;
    for (int m : cut.side.members) contained_in_[m].insert(id);
    return id;
  }

  /// Rekeys a record to its surviving members. A shrunken record can
  /// collide with an existing identical one; it is folded in and dies.
  /// Returns whether the record id is still alive.
  bool reindex_record(int id, std::vector<int> new_members) {
    Record& rec = records_.at(id);
    index_.erase(rec.members);
    for (int m : rec.members) contained_in_[m].erase(id);
    auto clash = index_.find(new_members);
    if (clash != index_.end() && clash->second != id) {
      Record& other = records_.at(clash->second);
      for (int w : rec.mirror_of) {
        other.mirror_of.insert(w);
        stored_[w] = clash->second;
      }
      records_.erase(id);
      return false;
    }
    rec.members = std::move(new_members);
    index_[rec.members] = id;
    for (int m : rec.members) contained_in_[m].insert(id);
    return true;
  }

  void drop_record(int id) {
    auto it = records_.find(id);
    if (it == records_.end()) return;
    for (int w : it->second.mirror_of) {
      auto st = stored_.find(w);
      if (st != stored_.end() && st->second == id) stored_.erase(st);
    }
    for (int m : it->second.members) {
      auto ci = contained_in_.find(m);
      if (ci != contained_in_.end()) ci->second.erase(id);
    }
    index_.erase(it->second.members);
    records_.erase(it);
  }

  /// After reprocessing, anything still stored above λmax has no valid
  /// replacement and simply ceases to have a mirror cut.
  void retire_invalid_assignments(const std::vector<int>& vertices) {
    for (int w : vertices) {
      auto st = stored_.find(w);
      if (st == stored_.end()) continue;
      const Record& rec = records_.at(st->second);
      if (static_cast<double>(rec.value) > params_->lambda_max ||
          !(static_cast<double>(rec.volume) < params_->mirror_nu()))
        mirror_delete(st->second, w);
    }
  }

  const DynamicGraph* g_;
  const Params* params_;
  int outside_;
  std::uint64_t seed_;
  std::function<int()> proper_limit_;
  std::uint64_t batch_counter_ = 0;
  bool initialized_ = false;
  int next_id_ = 0;
  std::map<int, Record> records_;
  std::map<std::vector<int>, int> index_;
  std::map<int, std::set<int>> contained_in_;
  std::map<int, int> stored_;  // vertex -> record id
};

/// One cluster's mirror machinery: the mirror graph G̃/(V∖C) in local ids,
/// the buffer that gates updates on "no local cut below λmin", and the
/// mirror-cut store fed from the buffer's flushes.
class MirrorEngine {
 public:
  MirrorEngine(const DynamicGraph& level_graph, const VertexSet& members,
               const Params* params, std::uint64_t seed)
      : params_(params),
        seed_(seed),
        level_graph_(&level_graph),
        working_(static_cast<int>(members.size()) + 1),
        forwarded_(static_cast<int>(members.size()) + 1),
        outside_(static_cast<int>(members.size())),
        store_(&forwarded_, params, static_cast<int>(members.size()),
               hash_combine(seed, 0x51), [this] { return proper_cut_limit(); }) {
    for (std::size_t i = 0; i < members.size(); ++i) {
      to_local_[members.members[i]] = static_cast<int>(i);
      to_global_[static_cast<int>(i)] = members.members[i];
    }
    // Preprocessing: the whole mirror graph enters as buffered insertions
    // with every vertex marked, then one batch update runs.
    for (Vertex u : members.members) {
      const int lu = to_local_.at(u);
      for (const auto& [w, mult] : level_graph.neighbors(u)) {
        auto it = to_local_.find(w);
        if (it != to_local_.end()) {
          if (u < w)
            for (Count i = 0; i < mult; ++i)
              raw_apply({MirrorOp::Kind::Insert, lu, it->second, {}});
        } else {
          for (Count i = 0; i < mult; ++i)
            raw_apply({MirrorOp::Kind::Insert, lu, outside_, {}});
        }
      }
    }
    for (int v = 0; v <= outside_; ++v) buf_marked_.insert(v);
    batch_update();
  }

  MirrorEngine(const MirrorEngine&) = delete;
  MirrorEngine& operator=(const MirrorEngine&) = delete;

  // -- buffer outputs --
  bool has_small_cut() const { return has_small_cut_; }
  Count small_cut_value() const { return small_cut_value_; }
  VertexSet small_cut_global() const {
    VertexSet s;
    for (int x : small_cut_)
      if (x != outside_) s.members.push_back(to_global_.at(x));
    s.normalize();
    return s;
  }
  bool small_cut_contains_outside() const {
    return std::binary_search(small_cut_.begin(), small_cut_.end(), outside_);
  }
  const DynamicGraph& forwarded() const { return forwarded_; }
  const DynamicGraph& working() const { return working_; }
  std::size_t buffered_ops() const { return buf_queue_.size(); }
  std::size_t marked_count() const { return buf_marked_.size(); }
  Count update_volume() const { return update_volume_; }
  int outside_local() const { return outside_; }
  int local_id(Vertex global) const { return to_local_.at(global); }
  Vertex global_id(int local) const { return to_global_.at(local); }
  const MirrorCutStore& store() const { return store_; }
  MirrorCutStore& store() { return store_; }

  struct MinCut {
    Count value;
    VertexSet cluster_side;  // global members of the stored side, sans outside
    bool contains_outside;
    Count volume;
  };

  std::optional<MinCut> min_mirror_cut() const {
    auto local = store_.min_mirror_cut();
    if (!local) return std::nullopt;
    MinCut out;
    out.value = local->boundary;
    out.volume = local->volume;
    out.contains_outside = local->side.contains(outside_);
    for (int x : local->side.members)
      if (x != outside_) out.cluster_side.members.push_back(to_global_.at(x));
    out.cluster_side.normalize();
    return out;
  }

  // -- cluster-level update entry points (global ids) --

  void edge_op_internal(bool insert, Vertex gu, Vertex gv) {
    apply({insert ? MirrorOp::Kind::Insert : MirrorOp::Kind::Delete,
           to_local_.at(gu), to_local_.at(gv), {}});
  }

  void edge_op_boundary(bool insert, Vertex gu) {
    apply({insert ? MirrorOp::Kind::Insert : MirrorOp::Kind::Delete,
           to_local_.at(gu), outside_, {}});
  }

  /// Cluster loses `s` (a split): the engine keeps serving C∖s.
  void set_delete(const VertexSet& s) {
    MirrorOp op;
    op.kind = MirrorOp::Kind::SetDelete;
    for (Vertex g : s.members) op.set.push_back(to_local_.at(g));
    std::sort(op.set.begin(), op.set.end());
    // Mappings shrink first so the in-flight batch sees the new extent.
    for (Vertex g : s.members) to_local_.erase(g);
    for (int x : op.set) to_global_.erase(x);
    apply(op);
  }

  /// Terminal clusters absorb freshly contracted nodes.
  void add_member(Vertex gv) {
    const int lu = working_.add_vertex();
    const int lf = forwarded_.add_vertex();
    if (lu != lf) throw std::logic_error("mirror: graphs out of sync");
    to_local_[gv] = lu;
    to_global_[lu] = gv;
    apply({MirrorOp::Kind::AddVertex, lu, -1, {}});
  }

  /// find_and_cut discovered a below-λmin cut on its own; record it so the
  /// frozen state is owned by the buffer like every other small cut.
  void force_small_cut(const VertexSet& global_side, bool with_outside) {
    std::vector<int> side;
    for (Vertex g : global_side.members) side.push_back(to_local_.at(g));
    if (with_outside) side.push_back(outside_);
    std::sort(side.begin(), side.end());
    if (static_cast<int>(side.size()) >= proper_cut_limit())
      throw std::invalid_argument("force_small_cut: not a proper mirror cut");
    const Count value = working_.boundary(VertexSet{side});
    if (!(static_cast<double>(value) < params_->lambda_min))
      throw std::invalid_argument("force_small_cut: cut is not below lambda_min");
    has_small_cut_ = true;
    small_cut_ = std::move(side);
    small_cut_value_ = value;
  }

 public:
  /// The mirror of a cluster covering the whole level graph has no real
  /// outside vertex (G/∅ = G); its phantom never makes a cut side.
  bool covers_level_graph() const {
    return static_cast<int>(to_local_.size()) == level_graph_->num_vertices();
  }

  /// Cut sides with at least this many vertices are not proper cuts.
  int proper_cut_limit() const {
    return working_.num_vertices() - (covers_level_graph() ? 1 : 0);
  }

 private:
  bool crosses_small_cut(int u, int v) const {
    const bool cu = std::binary_search(small_cut_.begin(), small_cut_.end(), u);
    const bool cv = std::binary_search(small_cut_.begin(), small_cut_.end(), v);
    return cu != cv;
  }

  void apply(const MirrorOp& op) {
    raw_apply(op);
    batch_update();
  }

  /// "Handling an update" sans the batch step: queue, track the stored
  /// small cut, mark deletion-incident vertices.
  void raw_apply(const MirrorOp& op) {
    update_volume_ += op.kind == MirrorOp::Kind::SetDelete
                          ? op.op_volume(working_)
                          : 1;
    switch (op.kind) {
      case MirrorOp::Kind::Insert:
        working_.insert_edge(op.u, op.v);
        if (has_small_cut_ && crosses_small_cut(op.u, op.v)) {
          ++small_cut_value_;
          if (!(static_cast<double>(small_cut_value_) < params_->lambda_min))
            has_small_cut_ = false;
        }
        break;
      case MirrorOp::Kind::Delete:
        working_.delete_edge(op.u, op.v);
        if (has_small_cut_ && crosses_small_cut(op.u, op.v)) --small_cut_value_;
        buf_marked_.insert(op.u);
        buf_marked_.insert(op.v);
        break;
      case MirrorOp::Kind::AddVertex:
        buf_marked_.insert(op.u);
        break;
      case MirrorOp::Kind::SetDelete: {
        // Mark survivors incident to the deleted set, then rewrite edges:
        // inside edges vanish, crossing edges re-attach to `outside`.
        std::vector<std::pair<std::pair<int, int>, Count>> edges;
        for (int x : op.set)
          for (const auto& [y, mult] : working_.neighbors(x)) {
            if (std::binary_search(op.set.begin(), op.set.end(), y)) {
              if (x < y) edges.push_back({{x, y}, mult});
            } else {
              edges.push_back({{x, y}, mult});
              buf_marked_.insert(y);
            }
          }
        for (const auto& [e, mult] : edges)
          for (Count i = 0; i < mult; ++i) {
            working_.delete_edge(e.first, e.second);
            const bool inside =
                std::binary_search(op.set.begin(), op.set.end(), e.second);
            if (!inside && e.second != outside_)
              working_.insert_edge(e.second, outside_);
          }
        for (int x : op.set) {
          working_.remove_vertex(x);
          buf_marked_.erase(x);
        }
        if (has_small_cut_) {
          std::vector<int> kept;
          for (int m : small_cut_)
            if (!std::binary_search(op.set.begin(), op.set.end(), m))
              kept.push_back(m);
          small_cut_ = std::move(kept);
          if (small_cut_.empty() ||
              static_cast<int>(small_cut_.size()) >= proper_cut_limit()) {
            has_small_cut_ = false;
          } else {
            small_cut_value_ = working_.boundary(VertexSet{small_cut_});
            has_small_cut_ =
                static_cast<double>(small_cut_value_) < params_->lambda_min;
          }
        }
        break;
      }
    }
    buf_queue_.push_back(op);
  }

  /// Probe marked vertices for a below-λmin local cut in H∪Buffer; flush
  /// the buffer once none remains and no stored small cut survives.
  void batch_update() {
    while (!has_small_cut_ && !buf_marked_.empty()) {
      const int v = *buf_marked_.begin();
      if (!working_.is_live(v) || (v == outside_ && covers_level_graph())) {
        buf_marked_.erase(v);
        continue;
      }
      LocalCutParams lp;
      lp.nu = params_->local_cut_bound();
      lp.k = params_->lambda_min;
      lp.trials = params_->buffer_trials();
      lp.seed = hash_combine(seed_, ++batch_counter_);
      const int limit = proper_cut_limit();
      const bool found = for_each_local_cut(
          working_, v, lp, [&](const VertexSet& side, Count bnd) {
            if (!(static_cast<double>(bnd) < params_->lambda_min)) return false;
            if (static_cast<int>(side.size()) >= limit) return false;
            has_small_cut_ = true;
            small_cut_ = side.members;
            small_cut_value_ = bnd;
            return true;
          });
      if (found) break;  // v stays marked
      buf_marked_.erase(v);
    }
    if (!has_small_cut_) flush();
  }

  void flush() {
    if (buf_queue_.empty()) {
      if (!store_.initialized()) store_.preprocess();
      return;
    }
    // Insertions are forwarded before deletions so the forwarded graph
    // never dips below λmin mid-flush. Vertex additions go first of all.
    std::vector<MirrorOp> ordered;
    for (const MirrorOp& op : buf_queue_)
      if (op.kind == MirrorOp::Kind::AddVertex) ordered.push_back(op);
    for (const MirrorOp& op : buf_queue_)
      if (op.kind == MirrorOp::Kind::Insert) ordered.push_back(op);
    for (const MirrorOp& op : buf_queue_)
      if (op.kind == MirrorOp::Kind::Delete ||
          op.kind == MirrorOp::Kind::SetDelete)
        ordered.push_back(op);
    buf_queue_.clear();
    const bool live_store = store_.initialized();
    for (const MirrorOp& op : ordered) {
      switch (op.kind) {
        case MirrorOp::Kind::Insert:
          forwarded_.insert_edge(op.u, op.v);
          if (live_store) store_.handle_insert(op.u, op.v);
          break;
        case MirrorOp::Kind::Delete:
          forwarded_.delete_edge(op.u, op.v);
          if (live_store) store_.handle_delete(op.u, op.v);
          break;
        case MirrorOp::Kind::AddVertex:
          if (live_store) store_.handle_add_vertex(op.u);
          break;
        case MirrorOp::Kind::SetDelete: {
          std::vector<int> adjacent;
          std::vector<std::pair<std::pair<int, int>, Count>> edges;
          for (int x : op.set)
            for (const auto& [y, mult] : forwarded_.neighbors(x)) {
              if (std::binary_search(op.set.begin(), op.set.end(), y)) {
                if (x < y) edges.push_back({{x, y}, mult});
              } else {
                edges.push_back({{x, y}, mult});
                if (y != outside_) adjacent.push_back(y);
              }
            }
          for (const auto& [e, mult] : edges)
            for (Count i = 0; i < mult; ++i) {
              forwarded_.delete_edge(e.first, e.second);
              const bool inside =
                  std::binary_search(op.set.begin(), op.set.end(), e.second);
              if (!inside && e.second != outside_)
                forwarded_.insert_edge(e.second, outside_);
            }
          for (int x : op.set) forwarded_.remove_vertex(x);
          std::sort(adjacent.begin(), adjacent.end());
          adjacent.erase(std::unique(adjacent.begin(), adjacent.end()),
                         adjacent.end());
          if (live_store) store_.handle_set_delete(op.set, adjacent);
          break;
        }
      }
    }
    if (!store_.initialized()) store_.preprocess();
  }

  const Params* params_;
  std::uint64_t seed_;
  const DynamicGraph* level_graph_;
  std::uint64_t batch_counter_ = 0;
  DynamicGraph working_;    // H ∪ Buffer
  DynamicGraph forwarded_;  // H, the graph the store runs on
  int outside_;
  std::map<Vertex, int> to_local_;
  std::map<int, Vertex> to_global_;

  std::vector<MirrorOp> buf_queue_;
  std::set<int> buf_marked_;
  bool has_small_cut_ = false;
  std::vector<int> small_cut_;  // sorted local ids
  Count small_cut_value_ = 0;
  Count update_volume_ = 0;

  MirrorCutStore store_;
};

}  // namespace dyncut
