#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dyncut {

using Vertex = int;
using Count = long long;

/// Sorted set of vertex ids. Small enough sets cache a bitmask so the
/// exhaustive oracles can test membership in O(1).
struct VertexSet {
  std::vector<Vertex> members;

  VertexSet() = default;
  explicit VertexSet(std::vector<Vertex> vs) : members(std::move(vs)) { normalize(); }
  VertexSet(std::initializer_list<Vertex> vs) : members(vs) { normalize(); }

  void normalize() {
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
  }

  bool contains(Vertex v) const {
    return std::binary_search(members.begin(), members.end(), v);
  }
  std::size_t size() const { return members.size(); }
  bool empty() const { return members.empty(); }

  void insert(Vertex v) {
    auto it = std::lower_bound(members.begin(), members.end(), v);
    if (it == members.end() || *it != v) members.insert(it, v);
  }
  void erase(Vertex v) {
    auto it = std::lower_bound(members.begin(), members.end(), v);
    if (it != members.end() && *it == v) members.erase(it);
  }

  /// Bitmask over ids < 64; only valid when max member fits a word.
  std::uint64_t mask() const {
    std::uint64_t m = 0;
    for (Vertex v : members) m |= (std::uint64_t{1} << v);
    return m;
  }

  bool operator==(const VertexSet& o) const { return members == o.members; }
  bool operator<(const VertexSet& o) const { return members < o.members; }
};

inline VertexSet set_minus(const VertexSet& a, const VertexSet& b) {
  VertexSet r;
  std::set_difference(a.members.begin(), a.members.end(), b.members.begin(),
                      b.members.end(), std::back_inserter(r.members));
  return r;
}

inline VertexSet set_union(const VertexSet& a, const VertexSet& b) {
  VertexSet r;
  std::set_union(a.members.begin(), a.members.end(), b.members.begin(),
                 b.members.end(), std::back_inserter(r.members));
  return r;
}

inline VertexSet set_intersect(const VertexSet& a, const VertexSet& b) {
  VertexSet r;
  std::set_intersection(a.members.begin(), a.members.end(), b.members.begin(),
                        b.members.end(), std::back_inserter(r.members));
  return r;
}

/// One side of a cut with its cached boundary and volume.
struct Cut {
  VertexSet side;
  Count boundary = 0;
  Count volume = 0;
};

/// Unweighted multigraph over a vertex universe fixed at construction.
/// Parallel edges are stored as multiplicities; deleting an absent edge is
/// an error. Contracted level graphs additionally add and remove vertices,
/// so vertices carry a live flag; the top-level graph never uses that.
///
/// Loop convention: a self-loop adds 1 to its vertex's degree and volume
/// and 1 to m. Loops are only produced by induced_with_loops and never
/// cross a cut.
class DynamicGraph {
 public:
  explicit DynamicGraph(int n)
      : adj_(n), loops_(n, 0), live_(n, 1), live_count_(n) {}

  int capacity() const { return static_cast<int>(adj_.size()); }
  int num_vertices() const { return live_count_; }
  Count num_edges() const { return m_; }
  bool is_live(Vertex v) const {
    return v >= 0 && v < capacity() && live_[v];
  }

  void insert_edge(Vertex u, Vertex v) {
    check_pair(u, v);
    adj_[u][v] += 1;
    adj_[v][u] += 1;
    m_ += 1;
  }

  void delete_edge(Vertex u, Vertex v) {
    check_pair(u, v);
    auto it = adj_[u].find(v);
    if (it == adj_[u].end())
      throw std::invalid_argument("delete_edge: edge (" + std::to_string(u) +
                                  "," + std::to_string(v) + ") not present");
    if (--it->second == 0) adj_[u].erase(it);
    auto jt = adj_[v].find(u);
    if (--jt->second == 0) adj_[v].erase(jt);
    m_ -= 1;
  }

  Count multiplicity(Vertex u, Vertex v) const {
    check_vertex(u);
    check_vertex(v);
    auto it = adj_[u].find(v);
    return it == adj_[u].end() ? 0 : it->second;
  }

  void add_self_loops(Vertex v, Count k) {
    check_vertex(v);
    loops_[v] += k;
    m_ += k;
  }
  Count self_loops(Vertex v) const {
    check_vertex(v);
    return loops_[v];
  }

  /// Degree with multiplicity; each self-loop counts once.
  Count degree(Vertex v) const {
    check_vertex(v);
    Count d = loops_[v];
    for (const auto& [w, mult] : adj_[v]) d += mult;
    return d;
  }

  const std::map<Vertex, Count>& neighbors(Vertex v) const {
    check_vertex(v);
    return adj_[v];
  }

  std::vector<Vertex> live_vertices() const {
    std::vector<Vertex> vs;
    vs.reserve(live_count_);
    for (Vertex v = 0; v < capacity(); ++v)
      if (live_[v]) vs.push_back(v);
    return vs;
  }

  /// Vol(S): sum of degrees of the members.
  Count volume(const VertexSet& s) const {
    Count total = 0;
    for (Vertex v : s.members) total += degree(v);
    return total;
  }

  /// ∂S = |E(S, V∖S)| with multiplicity; S must be nonempty.
  Count boundary(const VertexSet& s) const {
    if (s.empty()) throw std::invalid_argument("boundary: empty set");
    Count total = 0;
    for (Vertex v : s.members) {
      check_vertex(v);
      for (const auto& [w, mult] : adj_[v])
        if (!s.contains(w)) total += mult;
    }
    return total;
  }

  /// w(A,B) for disjoint A, B.
  Count cross_weight(const VertexSet& a, const VertexSet& b) const {
    if (!set_intersect(a, b).empty())
      throw std::invalid_argument("cross_weight: sets intersect");
    Count total = 0;
    for (Vertex v : a.members) {
      check_vertex(v);
      for (const auto& [w, mult] : adj_[v])
        if (b.contains(w)) total += mult;
    }
    return total;
  }

  /// φ(U) = w(U, V∖U) / min(Vol(U), Vol(V∖U)).
  /// A zero denominator forces a zero numerator (crossing edges add volume
  /// to both sides), so the 0/0 case is reported as +infinity.
  double conductance(const VertexSet& u) const {
    VertexSet rest;
    for (Vertex v : live_vertices())
      if (!u.contains(v)) rest.members.push_back(v);
    if (u.empty() || rest.empty())
      throw std::invalid_argument("conductance: not a cut");
    const Count w = boundary(u);
    const Count denom = std::min(volume(u), volume(rest));
    if (denom == 0) return std::numeric_limits<double>::infinity();
    return static_cast<double>(w) / static_cast<double>(denom);
  }

  /// G/partition: one node per part, inter-part multiplicities preserved,
  /// intra-part edges and loops dropped. Also returns original→part map.
  std::pair<DynamicGraph, std::vector<int>> contract(
      const std::vector<VertexSet>& partition) const {
    std::vector<int> part_of(capacity(), -1);
    for (std::size_t p = 0; p < partition.size(); ++p)
      for (Vertex v : partition[p].members) {
        check_vertex(v);
        if (part_of[v] != -1)
          throw std::invalid_argument("contract: overlapping partition");
        part_of[v] = static_cast<int>(p);
      }
    for (Vertex v : live_vertices())
      if (part_of[v] == -1)
        throw std::invalid_argument("contract: partition does not cover V");
    DynamicGraph out(static_cast<int>(partition.size()));
    for (Vertex v = 0; v < capacity(); ++v) {
      if (!live_[v]) continue;
      for (const auto& [w, mult] : adj_[v]) {
        if (v < w && part_of[v] != part_of[w]) {
          for (Count i = 0; i < mult; ++i)
            out.insert_edge(part_of[v], part_of[w]);
        }
      }
    }
    return {std::move(out), std::move(part_of)};
  }

  /// G[U]^r: the induced subgraph on U plus ⌈r⌉ self-loops at the
  /// U-endpoint of every boundary edge. Vertex ids are preserved; vertices
  /// outside U are dead in the result.
  DynamicGraph induced_with_loops(const VertexSet& u, double r) const {
    if (u.empty()) throw std::invalid_argument("induced_with_loops: empty U");
    DynamicGraph out(capacity());
    for (Vertex v = 0; v < capacity(); ++v)
      if (!live_[v] || !u.contains(v)) out.kill_vertex(v);
    const Count loops_per_edge = static_cast<Count>(std::ceil(r));
    for (Vertex v : u.members) {
      check_vertex(v);
      Count boundary_deg = 0;
      for (const auto& [w, mult] : adj_[v]) {
        if (u.contains(w)) {
          if (v < w)
            for (Count i = 0; i < mult; ++i) out.insert_edge(v, w);
        } else {
          boundary_deg += mult;
        }
      }
      if (boundary_deg > 0 && loops_per_edge > 0)
        out.add_self_loops(v, boundary_deg * loops_per_edge);
      if (loops_[v] > 0) out.add_self_loops(v, loops_[v]);
    }
    return out;
  }

  // Vertex-universe edits, used only by contracted level graphs.
  Vertex add_vertex() {
    adj_.emplace_back();
    loops_.push_back(0);
    live_.push_back(1);
    ++live_count_;
    return capacity() - 1;
  }

  /// Grows capacity so that `v` exists, then revives it. Intermediate ids
  /// created by growth stay dead.
  void add_vertex_with_id(Vertex v) {
    if (v < 0) throw std::invalid_argument("add_vertex_with_id: negative id");
    while (capacity() <= v) {
      adj_.emplace_back();
      loops_.push_back(0);
      live_.push_back(0);
    }
    if (live_[v]) throw std::invalid_argument("add_vertex_with_id: already live");
    live_[v] = 1;
    ++live_count_;
  }

  void remove_vertex(Vertex v) {
    check_vertex(v);
    if (!adj_[v].empty() || loops_[v] != 0)
      throw std::invalid_argument("remove_vertex: vertex not isolated");
    live_[v] = 0;
    --live_count_;
  }

  bool operator==(const DynamicGraph& o) const {
    if (capacity() != o.capacity() || m_ != o.m_) return false;
    return adj_ == o.adj_ && loops_ == o.loops_ && live_ == o.live_;
  }

 private:
  void kill_vertex(Vertex v) {
    if (live_[v]) {
      live_[v] = 0;
      --live_count_;
    }
  }

  void check_vertex(Vertex v) const {
    if (v < 0 || v >= capacity() || !live_[v])
      throw std::invalid_argument("vertex " + std::to_string(v) +
                                  " out of range or not live");
  }
  void check_pair(Vertex u, Vertex v) const {
    check_vertex(u);
    check_vertex(v);
    if (u == v)
      throw std::invalid_argument("self-loop (" + std::to_string(u) +
                                  "," + std::to_string(v) + ") rejected");
  }

  std::vector<std::map<Vertex, Count>> adj_;
  std::vector<Count> loops_;
  std::vector<char> live_;
  int live_count_ = 0;
  Count m_ = 0;
};

}  // namespace dyncut
