#pragma once

#include <cstdint>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <stdexcept>
#include <vector>

#include "dyncut/graph.hpp"
#include "dyncut/params.hpp"
#include "dyncut/rng.hpp"

namespace dyncut {

struct LocalCutParams {
  double nu = 1.0;       // volume budget
  double k = 1.0;        // cut-size budget
  long long trials = 1;  // batch repetitions
  std::uint64_t seed = 0;
  // The cardinality budget σ of the (x,ν,σ,k)-set definition has no role
  // in the implemented growth procedure; nothing downstream consumes it.

  void validate() const {
    if (!(nu >= 1.0)) throw std::invalid_argument("local cut: nu must be >= 1");
    if (k < 0.0) throw std::invalid_argument("local cut: k must be >= 0");
    if (trials < 1) throw std::invalid_argument("local cut: trials must be >= 1");
  }
};

/// Result of one growth run. The prefix sets of growth_order are nested by
/// construction; checkpoints records every prefix whose boundary fit the
/// budget, so the whole family is encoded in O(ν) space.
struct NestedCutChain {
  std::vector<Vertex> growth_order;  // starts at the seed vertex
  struct Checkpoint {
    int prefix_len;
    Count boundary;
  };
  std::vector<Checkpoint> checkpoints;

  VertexSet prefix_set(int len) const {
    return VertexSet(std::vector<Vertex>(growth_order.begin(),
                                         growth_order.begin() + len));
  }
};

/// Repeated-run workspace: a flat adjacency snapshot of the graph plus
/// reusable scratch, so a batch of a few hundred runs does not touch the
/// ordered adjacency maps or allocate per run.
class LocalCutBatchRunner {
 public:
  explicit LocalCutBatchRunner(const DynamicGraph& g) {
    const int cap = g.capacity();
    offsets_.assign(cap + 1, 0);
    degree_.assign(cap, 0);
    degree_noloop_.assign(cap, 0);
    stamp_.assign(cap, 0);
    live_total_ = g.num_vertices();
    for (Vertex v = 0; v < cap; ++v) {
      if (g.is_live(v)) {
        offsets_[v + 1] = offsets_[v] + static_cast<int>(g.neighbors(v).size());
        degree_[v] = g.degree(v);
        degree_noloop_[v] = degree_[v] - g.self_loops(v);
      } else {
        offsets_[v + 1] = offsets_[v];
      }
    }
    entries_.reserve(offsets_[cap]);
    for (Vertex v = 0; v < cap; ++v)
      if (g.is_live(v))
        for (const auto& [w, mult] : g.neighbors(v)) entries_.push_back({w, mult});
  }

  /// One growth run from v. X starts as {v}; while Vol(X) < ν the boundary
  /// edge of minimum priority is absorbed, with fresh uniform priorities
  /// for every newly exposed boundary edge (one independent draw per
  /// multiplicity unit). Every proper prefix with boundary ≤ k and volume
  /// < ν is recorded; an empty frontier ends the run early.
  NestedCutChain run(Vertex v, const LocalCutParams& p, std::uint64_t run_index) {
    NestedCutChain chain;
    run_into(v, p, run_index, chain);
    return chain;
  }

  /// Same, reusing the chain's buffers across runs.
  void run_into(Vertex v, const LocalCutParams& p, std::uint64_t run_index,
                NestedCutChain& chain) {
    if (v < 0 || v >= static_cast<int>(degree_.size()))
      throw std::invalid_argument("local_k_cut: bad start vertex");
    ++current_stamp_;
    heap_.clear();
    chain.growth_order.clear();
    chain.checkpoints.clear();
    // splitmix64 stream keyed by (seed, run): one mix per priority draw
    const std::uint64_t stream_base = hash_combine(p.seed, run_index);
    std::uint64_t exposure_counter = 0;

    auto expose = [&](Vertex u) {
      for (int e = offsets_[u]; e < offsets_[u + 1]; ++e) {
        const auto [w, mult] = entries_[e];
        if (stamp_[w] == current_stamp_) continue;
        for (Count i = 0; i < mult; ++i) {
          const std::uint64_t prio =
              mix64(stream_base + 0x9e3779b97f4a7c15ULL * (exposure_counter + 1));
          heap_.push_back({prio, exposure_counter, w});
          std::push_heap(heap_.begin(), heap_.end(), HeapGreater{});
          ++exposure_counter;
        }
      }
    };

    stamp_[v] = current_stamp_;
    chain.growth_order.push_back(v);
    Count vol = degree_[v];
    Count bnd = degree_noloop_[v];
    expose(v);

    for (;;) {
      if (static_cast<double>(vol) >= p.nu) break;
      if (static_cast<double>(bnd) <= p.k &&
          static_cast<int>(chain.growth_order.size()) < live_total_)
        chain.checkpoints.push_back(
            {static_cast<int>(chain.growth_order.size()), bnd});
      while (!heap_.empty() && stamp_[heap_.front().to] == current_stamp_) {
        std::pop_heap(heap_.begin(), heap_.end(), HeapGreater{});
        heap_.pop_back();
      }
      if (heap_.empty()) break;
      const Vertex u = heap_.front().to;
      std::pop_heap(heap_.begin(), heap_.end(), HeapGreater{});
      heap_.pop_back();
      stamp_[u] = current_stamp_;
      chain.growth_order.push_back(u);
      Count to_x = 0;
      for (int e = offsets_[u]; e < offsets_[u + 1]; ++e)
        if (stamp_[entries_[e].first] == current_stamp_) to_x += entries_[e].second;
      vol += degree_[u];
      bnd += degree_noloop_[u] - 2 * to_x;
      expose(u);
    }
  }

 private:
  struct HeapEdge {
    std::uint64_t priority;
    std::uint64_t exposure;  // tie-break: earlier exposure wins
    Vertex to;
  };
  struct HeapGreater {
    bool operator()(const HeapEdge& a, const HeapEdge& b) const {
      if (a.priority != b.priority) return a.priority > b.priority;
      return a.exposure > b.exposure;
    }
  };

  std::vector<int> offsets_;
  std::vector<std::pair<Vertex, Count>> entries_;
  std::vector<Count> degree_;
  std::vector<Count> degree_noloop_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t current_stamp_ = 0;
  std::vector<HeapEdge> heap_;
  int live_total_ = 0;
};

/// One growth run from v (single-shot convenience over the batch runner).
inline NestedCutChain local_k_cut(const DynamicGraph& g, Vertex v,
                                  const LocalCutParams& p,
                                  std::uint64_t run_index = 0) {
  p.validate();
  if (!g.is_live(v)) throw std::invalid_argument("local_k_cut: bad start vertex");
  LocalCutBatchRunner runner(g);
  return runner.run(v, p, run_index);
}

/// Streams the qualifying prefixes of `trials` independent runs in run
/// order then chain order. fn returns true to stop early (first hit wins).
/// Returns whether fn ever stopped the scan.
template <typename Fn>
bool for_each_local_cut(const DynamicGraph& g, Vertex v, const LocalCutParams& p,
                        Fn&& fn) {
  p.validate();
  if (!g.is_live(v)) throw std::invalid_argument("local_k_cut: bad start vertex");
  LocalCutBatchRunner runner(g);
  NestedCutChain chain;
  for (long long run = 0; run < p.trials; ++run) {
    runner.run_into(v, p, static_cast<std::uint64_t>(run), chain);
    for (const auto& cp : chain.checkpoints) {
      VertexSet side = chain.prefix_set(cp.prefix_len);
      if (fn(side, cp.boundary)) return true;
    }
  }
  return false;
}

/// Union of all qualifying prefixes over `trials` runs, deduplicated by
/// vertex set and revalidated against the graph.
inline std::vector<Cut> batch_local_k_cut(const DynamicGraph& g, Vertex v,
                                          const LocalCutParams& p) {
  std::map<VertexSet, Cut> found;
  for_each_local_cut(g, v, p, [&](const VertexSet& side, Count bnd) {
    if (found.count(side)) return false;
    const Count check_bnd = g.boundary(side);
    const Count check_vol = g.volume(side);
    if (check_bnd != bnd)
      throw std::logic_error("local_k_cut: checkpoint boundary mismatch");
    if (static_cast<double>(check_bnd) <= p.k &&
        static_cast<double>(check_vol) < p.nu)
      found.emplace(side, Cut{side, check_bnd, check_vol});
    return false;
  });
  std::vector<Cut> out;
  out.reserve(found.size());
  for (auto& [side, cut] : found) out.push_back(cut);
  return out;
}

/// Global contraction baseline: contract uniformly random surviving edges
/// until two supernodes remain; returns the smaller side (lexicographic
/// tie-break). Used as a calibration oracle, not in the dynamic pipeline.
inline Cut karger_global(const DynamicGraph& g, std::uint64_t seed) {
  const std::vector<Vertex> verts = g.live_vertices();
  const int n = static_cast<int>(verts.size());
  if (n < 2) throw std::invalid_argument("karger_global: need at least 2 vertices");

  std::vector<std::pair<Vertex, Vertex>> edges;
  for (Vertex u : verts)
    for (const auto& [w, mult] : g.neighbors(u))
      if (u < w)
        for (Count i = 0; i < mult; ++i) edges.emplace_back(u, w);

  // connectivity check
  {
    std::map<Vertex, char> seen;
    std::vector<Vertex> stack{verts[0]};
    seen[verts[0]] = 1;
    while (!stack.empty()) {
      Vertex u = stack.back();
      stack.pop_back();
      for (const auto& [w, mult] : g.neighbors(u))
        if (!seen.count(w)) {
          seen[w] = 1;
          stack.push_back(w);
        }
    }
    if (static_cast<int>(seen.size()) != n)
      throw std::invalid_argument("karger_global: graph is disconnected");
  }

  std::vector<int> parent(g.capacity());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };

  Rng rng(seed);
  int components = n;
  std::vector<std::pair<Vertex, Vertex>> pool = edges;
  while (components > 2) {
    if (pool.empty())
      throw std::logic_error("karger_global: ran out of edges");
    const std::size_t idx = rng.next_below(pool.size());
    auto [u, w] = pool[idx];
    const int ru = find(u), rw = find(w);
    if (ru == rw) {
      pool[idx] = pool.back();
      pool.pop_back();
      continue;
    }
    parent[ru] = rw;
    --components;
  }

  const int root0 = find(verts[0]);
  VertexSet side_a, side_b;
  for (Vertex u : verts)
    (find(u) == root0 ? side_a : side_b).members.push_back(u);
  VertexSet side = side_a;
  if (side_b.size() < side_a.size() ||
      (side_b.size() == side_a.size() && side_b < side_a))
    side = side_b;
  return Cut{side, g.boundary(side), g.volume(side)};
}

}  // namespace dyncut
