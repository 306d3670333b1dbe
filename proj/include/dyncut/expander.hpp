#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dyncut/graph.hpp"
#include "dyncut/io.hpp"
#include "dyncut/rng.hpp"

namespace dyncut {

struct ExpanderConfig {
  int exhaustive_limit = 18;   // exact conductance scan up to this size
  int heuristic_samples = 256; // random cuts tried above the limit
  std::uint64_t seed = 0;
};

namespace expander_detail {

/// Dense view of G[U]^{α/φ}: multiplicities within U plus per-vertex loop
/// counts from the boundary padding.
struct PaddedView {
  std::vector<Vertex> verts;
  std::vector<std::vector<Count>> w;
  std::vector<Count> vol;  // degree incl. padded loops
  Count total_vol = 0;

  PaddedView(const DynamicGraph& g, const VertexSet& u, double alpha, double phi) {
    verts = u.members;
    const int n = static_cast<int>(verts.size());
    std::vector<int> index(g.capacity(), -1);
    for (int i = 0; i < n; ++i) index[verts[i]] = i;
    w.assign(n, std::vector<Count>(n, 0));
    vol.assign(n, 0);
    const Count pad = static_cast<Count>(std::ceil(alpha / phi));
    for (int i = 0; i < n; ++i) {
      Count boundary_deg = 0;
      for (const auto& [nb, mult] : g.neighbors(verts[i])) {
        if (index[nb] >= 0) {
          w[i][index[nb]] = mult;
          vol[i] += mult;
        } else {
          boundary_deg += mult;
        }
      }
      vol[i] += boundary_deg * pad + g.self_loops(verts[i]);
      total_vol += vol[i];
    }
  }

  int n() const { return static_cast<int>(verts.size()); }

  /// Conductance of the cut given by `mask`; +inf for the 0/0 case.
  double conductance_of(std::uint32_t mask, Count cross, Count vol_side) const {
    const Count denom = std::min(vol_side, total_vol - vol_side);
    if (denom == 0) return std::numeric_limits<double>::infinity();
    return static_cast<double>(cross) / static_cast<double>(denom);
  }
};

struct CutCandidate {
  VertexSet side;  // subset of U, in original ids
  double conductance = std::numeric_limits<double>::infinity();
};

/// Exact minimum-conductance cut of the padded graph, 2^{|U|-1} scan.
/// Ties break toward the lexicographically smallest member list.
inline CutCandidate min_conductance_exhaustive(const PaddedView& view) {
  const int n = view.n();
  CutCandidate best;
  const std::size_t total = std::size_t{1} << n;
  std::vector<Count> cross(total, 0), vols(total, 0);
  for (std::size_t mask = 1; mask + 1 < total; ++mask) {
    const int v = std::countr_zero(mask);
    const std::size_t prev = mask & (mask - 1);
    Count to_prev = 0, row = 0;
    for (int j = 0; j < n; ++j) {
      if (j == v) continue;
      row += view.w[v][j];
      if (prev >> j & 1) to_prev += view.w[v][j];
    }
    cross[mask] = cross[prev] + row - 2 * to_prev;
    vols[mask] = vols[prev] + view.vol[v];
    if (!(mask & 1)) continue;  // canonical side holds the first vertex
    const double cond = view.conductance_of(static_cast<std::uint32_t>(mask),
                                            cross[mask], vols[mask]);
    if (cond < best.conductance) {
      best.conductance = cond;
      best.side.members.clear();
      for (int j = 0; j < n; ++j)
        if (mask >> j & 1) best.side.members.push_back(view.verts[j]);
    } else if (cond == best.conductance) {
      VertexSet cand;
      for (int j = 0; j < n; ++j)
        if (mask >> j & 1) cand.members.push_back(view.verts[j]);
      if (cand < best.side) best.side = std::move(cand);
    }
  }
  return best;
}

/// Degree-ordered sweep plus random sampling; a heuristic upper bound on
/// the minimum conductance for parts above the exhaustive limit.
inline CutCandidate min_conductance_heuristic(const PaddedView& view,
                                              const ExpanderConfig& cfg) {
  const int n = view.n();
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (view.vol[a] != view.vol[b]) return view.vol[a] < view.vol[b];
    return view.verts[a] < view.verts[b];
  });

  CutCandidate best;
  std::vector<char> in_side(n, 0);
  auto eval = [&](const std::vector<char>& side) {
    Count cross = 0, vol_side = 0;
    bool nonempty = false, proper = false;
    for (int i = 0; i < n; ++i) {
      if (side[i]) {
        nonempty = true;
        vol_side += view.vol[i];
        for (int j = 0; j < n; ++j)
          if (!side[j]) cross += view.w[i][j];
      } else {
        proper = true;
      }
    }
    if (!nonempty || !proper) return;
    const Count denom = std::min(vol_side, view.total_vol - vol_side);
    const double cond = denom == 0
                            ? std::numeric_limits<double>::infinity()
                            : static_cast<double>(cross) / static_cast<double>(denom);
    if (cond < best.conductance) {
      best.conductance = cond;
      best.side.members.clear();
      for (int i = 0; i < n; ++i)
        if (side[i]) best.side.members.push_back(view.verts[i]);
      best.side.normalize();
    }
  };

  for (int take = 0; take + 1 < n; ++take) {
    in_side[order[take]] = 1;
    eval(in_side);
  }
  Rng rng(cfg.seed, 0xE0E0);
  std::vector<char> coin(n, 0);
  for (int s = 0; s < cfg.heuristic_samples; ++s) {
    for (int i = 0; i < n; ++i) coin[i] = rng.next_u64() & 1;
    eval(coin);
  }
  return best;
}

}  // namespace expander_detail

struct ExpanderCheck {
  bool passed = false;
  bool exhaustive = true;  // false: certified only by the heuristic
  expander_detail::CutCandidate witness;
};

/// Detailed check that G[U]^{α/φ} is a φ-expander.
inline ExpanderCheck check_boundary_linked_expander(const DynamicGraph& g,
                                                    const VertexSet& u,
                                                    double alpha, double phi,
                                                    const ExpanderConfig& cfg = {}) {
  if (u.empty())
    throw std::invalid_argument("expander check: empty U");
  ExpanderCheck result;
  if (u.size() == 1) {
    result.passed = true;
    return result;
  }
  expander_detail::PaddedView view(g, u, alpha, phi);
  if (static_cast<int>(u.size()) <= cfg.exhaustive_limit) {
    result.witness = expander_detail::min_conductance_exhaustive(view);
    result.passed = !(result.witness.conductance < phi);
  } else {
    result.exhaustive = false;
    result.witness = expander_detail::min_conductance_heuristic(view, cfg);
    result.passed = !(result.witness.conductance < phi);
  }
  return result;
}

/// True iff every cut of G[U]^{α/φ} has conductance ≥ φ.
inline bool is_boundary_linked_expander(const DynamicGraph& g, const VertexSet& u,
                                        double alpha, double phi,
                                        const ExpanderConfig& cfg = {}) {
  return check_boundary_linked_expander(g, u, alpha, phi, cfg).passed;
}

struct RecourseEvent {
  bool became_inter = true;  // false: edge left inter-expander status
  Vertex u = 0;
  Vertex v = 0;
  Count count = 1;
};

struct PartSplit {
  int old_part = -1;
  int new_part = -1;
  VertexSet moved;  // members that received the new part id
};

struct ExpanderUpdateReport {
  std::vector<RecourseEvent> events;
  std::vector<PartSplit> splits;
};

/// Rebuild-based reference implementation of the (α,φ)-boundary-linked
/// expander decomposition. Parts only split between rebuilds; inter-part
/// edge changes are reported per update together with the forced splits.
///
/// The owner mutates the graph first and then feeds the same op here.
class ExpanderDecomposition {
 public:
  ExpanderDecomposition(const DynamicGraph& g, double alpha, double phi,
                        ExpanderConfig cfg = {})
      : g_(&g), alpha_(alpha), phi_(phi), cfg_(cfg) {
    build();
  }

  double alpha() const { return alpha_; }
  double phi() const { return phi_; }
  bool heuristic_used() const { return heuristic_used_; }

  int part_of(Vertex v) const {
    if (v < 0 || v >= static_cast<int>(part_of_.size()) || part_of_[v] < 0)
      throw std::invalid_argument("part_of: unknown vertex");
    return part_of_[v];
  }

  const std::map<int, VertexSet>& parts() const { return parts_; }

  const std::map<std::pair<Vertex, Vertex>, Count>& interexpander_edges() const {
    return inter_edges_;
  }

  Count interexpander_edge_count() const {
    Count total = 0;
    for (const auto& [e, c] : inter_edges_) total += c;
    return total;
  }

  const std::vector<RecourseEvent>& recourse_log() const { return recourse_log_; }

  /// Handles one edge update (already applied to the graph).
  ExpanderUpdateReport apply_update(const UpdateOp& op) {
    ExpanderUpdateReport report;
    const int pu = part_of(op.u);
    const int pv = part_of(op.v);
    if (op.kind == UpdateOp::Kind::Insert) {
      if (pu != pv) {
        add_inter(op.u, op.v, 1, report);
        // Boundary padding grew on both sides; either part may now fail.
        reverify(pu, report);
        reverify(part_of(op.v), report);
      } else {
        reverify(pu, report);
      }
    } else {
      if (pu != pv) {
        remove_inter(op.u, op.v, 1, report);
        // Losing padding only lowers volumes, so conductances only grow.
      } else {
        reverify(pu, report);
      }
    }
    return report;
  }

  /// New vertex enters as its own singleton part.
  void add_singleton(Vertex v) {
    if (v >= static_cast<int>(part_of_.size())) part_of_.resize(v + 1, -1);
    if (part_of_[v] != -1)
      throw std::invalid_argument("add_singleton: vertex already present");
    const int id = next_part_id_++;
    part_of_[v] = id;
    parts_[id].members = {v};
  }

  /// Removes a vertex that has no incident edges left.
  void remove_isolated(Vertex v) {
    const int p = part_of(v);
    parts_[p].erase(v);
    part_of_[v] = -1;
    if (parts_[p].members.empty()) parts_.erase(p);
  }

 private:
  void build() {
    part_of_.assign(g_->capacity(), -1);
    parts_.clear();
    inter_edges_.clear();
    recourse_log_.clear();
    next_part_id_ = 0;
    heuristic_used_ = false;

    // Seed the split queue with connected components.
    std::vector<char> seen(g_->capacity(), 0);
    std::deque<VertexSet> queue;
    for (Vertex v : g_->live_vertices()) {
      if (seen[v]) continue;
      VertexSet comp;
      std::vector<Vertex> stack{v};
      seen[v] = 1;
      while (!stack.empty()) {
        Vertex u = stack.back();
        stack.pop_back();
        comp.members.push_back(u);
        for (const auto& [w, mult] : g_->neighbors(u))
          if (!seen[w]) {
            seen[w] = 1;
            stack.push_back(w);
          }
      }
      comp.normalize();
      queue.push_back(std::move(comp));
    }

    std::vector<VertexSet> final_parts;
    while (!queue.empty()) {
      VertexSet u = std::move(queue.front());
      queue.pop_front();
      const ExpanderCheck check =
          check_boundary_linked_expander(*g_, u, alpha_, phi_, cfg_);
      if (!check.exhaustive) heuristic_used_ = true;
      if (check.passed) {
        final_parts.push_back(std::move(u));
        continue;
      }
      const VertexSet& side = check.witness.side;
      queue.push_back(set_minus(u, side));
      queue.push_back(side);
    }
    std::sort(final_parts.begin(), final_parts.end());
    for (VertexSet& p : final_parts) {
      const int id = next_part_id_++;
      for (Vertex v : p.members) part_of_[v] = id;
      parts_[id].members = std::move(p.members);
    }
    // Initial inter-part edges (not recourse; the log starts empty).
    for (Vertex v : g_->live_vertices())
      for (const auto& [w, mult] : g_->neighbors(v))
        if (v < w && part_of_[v] != part_of_[w])
          inter_edges_[{v, w}] = mult;
  }

  void add_inter(Vertex u, Vertex v, Count count, ExpanderUpdateReport& report) {
    if (u > v) std::swap(u, v);
    inter_edges_[{u, v}] += count;
    recourse_log_.push_back({true, u, v, count});
    report.events.push_back({true, u, v, count});
  }

  void remove_inter(Vertex u, Vertex v, Count count, ExpanderUpdateReport& report) {
    if (u > v) std::swap(u, v);
    auto it = inter_edges_.find({u, v});
    if (it == inter_edges_.end() || it->second < count)
      throw std::logic_error("expander: removing unknown inter edge");
    it->second -= count;
    if (it->second == 0) inter_edges_.erase(it);
    recourse_log_.push_back({false, u, v, count});
    report.events.push_back({false, u, v, count});
  }

  /// Re-checks one part, splitting it (recursively) while it fails.
  void reverify(int part_id, ExpanderUpdateReport& report) {
    std::deque<int> pending{part_id};
    while (!pending.empty()) {
      const int pid = pending.front();
      pending.pop_front();
      auto it = parts_.find(pid);
      if (it == parts_.end()) continue;
      const ExpanderCheck check =
          check_boundary_linked_expander(*g_, it->second, alpha_, phi_, cfg_);
      if (!check.exhaustive) heuristic_used_ = true;
      if (check.passed) continue;

      // Split: the side without the part's smallest member moves out.
      VertexSet moved = check.witness.side;
      if (moved.contains(it->second.members.front()))
        moved = set_minus(it->second, moved);
      VertexSet kept = set_minus(it->second, moved);
      const int new_id = next_part_id_++;
      for (Vertex v : moved.members) part_of_[v] = new_id;
      parts_[new_id].members = moved.members;
      parts_[pid].members = kept.members;
      for (Vertex a : moved.members)
        for (const auto& [b, mult] : g_->neighbors(a))
          if (kept.contains(b)) add_inter(a, b, mult, report);
      report.splits.push_back({pid, new_id, moved});
      pending.push_back(pid);
      pending.push_back(new_id);
    }
  }

  const DynamicGraph* g_;
  double alpha_;
  double phi_;
  ExpanderConfig cfg_;
  std::vector<int> part_of_;
  std::map<int, VertexSet> parts_;
  std::map<std::pair<Vertex, Vertex>, Count> inter_edges_;
  std::vector<RecourseEvent> recourse_log_;
  int next_part_id_ = 0;
  bool heuristic_used_ = false;
};

}  // namespace dyncut
