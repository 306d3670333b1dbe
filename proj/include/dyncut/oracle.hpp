#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dyncut/graph.hpp"

namespace dyncut {
namespace oracle {

/// Hard caps for the exhaustive scans. Exceeding a cap is an error, never
/// a silent truncation: these functions are ground truth for tests.
struct OracleLimits {
  int max_subset_vertices = 20;
  Count max_enumeration_volume = 1'000'000;
};

namespace detail {

/// Dense view of the live part of a graph, indexed 0..n-1, with per-mask
/// boundary/volume tables filled incrementally (O(2^n · n)).
struct DenseView {
  std::vector<Vertex> verts;          // index -> original id
  std::vector<std::vector<Count>> w;  // multiplicity matrix
  std::vector<Count> deg;             // includes self-loops
  std::vector<Count> deg_noloop;

  explicit DenseView(const DynamicGraph& g) {
    verts = g.live_vertices();
    const int n = static_cast<int>(verts.size());
    std::vector<int> index(g.capacity(), -1);
    for (int i = 0; i < n; ++i) index[verts[i]] = i;
    w.assign(n, std::vector<Count>(n, 0));
    deg.assign(n, 0);
    deg_noloop.assign(n, 0);
    for (int i = 0; i < n; ++i) {
      for (const auto& [nb, mult] : g.neighbors(verts[i]))
        w[i][index[nb]] = mult;
      deg[i] = g.degree(verts[i]);
      deg_noloop[i] = deg[i] - g.self_loops(verts[i]);
    }
  }

  int n() const { return static_cast<int>(verts.size()); }

  VertexSet to_set(std::uint32_t mask) const {
    VertexSet s;
    for (int i = 0; i < n(); ++i)
      if (mask >> i & 1) s.members.push_back(verts[i]);
    std::sort(s.members.begin(), s.members.end());
    return s;
  }

  /// boundary[mask] (loops never cross) and volume[mask] for all masks.
  void fill_tables(std::vector<Count>& bnd, std::vector<Count>& vol) const {
    const std::size_t total = std::size_t{1} << n();
    bnd.assign(total, 0);
    vol.assign(total, 0);
    for (std::size_t mask = 1; mask < total; ++mask) {
      const int v = std::countr_zero(mask);
      const std::size_t prev = mask & (mask - 1);
      Count to_prev = 0;
      for (std::size_t rest = prev; rest;) {
        const int j = std::countr_zero(rest);
        rest &= rest - 1;
        to_prev += w[v][j];
      }
      bnd[mask] = bnd[prev] + deg_noloop[v] - 2 * to_prev;
      vol[mask] = vol[prev] + deg[v];
    }
  }

  bool connected_mask(std::uint32_t mask) const {
    if (mask == 0) return false;
    const int start = std::countr_zero(mask);
    std::uint32_t seen = std::uint32_t{1} << start;
    std::vector<int> stack{start};
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int j = 0; j < n(); ++j)
        if ((mask >> j & 1) && !(seen >> j & 1) && w[u][j] > 0) {
          seen |= std::uint32_t{1} << j;
          stack.push_back(j);
        }
    }
    return seen == mask;
  }
};

inline void check_limit(int n, const OracleLimits& lim, const char* who) {
  if (n > lim.max_subset_vertices)
    throw std::invalid_argument(std::string(who) + ": " + std::to_string(n) +
                                " vertices exceeds exhaustive limit " +
                                std::to_string(lim.max_subset_vertices));
}

}  // namespace detail

/// Exhaustive global minimum cut: scans every side containing the first
/// live vertex; ties broken by lexicographically smallest member list.
inline Cut min_cut_subset_scan(const DynamicGraph& g,
                               const OracleLimits& lim = {}) {
  detail::DenseView view(g);
  const int n = view.n();
  if (n < 2) throw std::invalid_argument("min cut: need at least 2 vertices");
  detail::check_limit(n, lim, "min_cut_subset_scan");
  std::vector<Count> bnd, vol;
  view.fill_tables(bnd, vol);
  const std::uint32_t full = (n == 32) ? ~0u : ((std::uint32_t{1} << n) - 1);
  Count best = std::numeric_limits<Count>::max();
  std::uint32_t best_mask = 0;
  for (std::uint32_t mask = 1; mask < full; ++mask) {
    if (!(mask & 1)) continue;  // canonical side holds the first vertex
    if (bnd[mask] < best ||
        (bnd[mask] == best && view.to_set(mask) < view.to_set(best_mask))) {
      best = bnd[mask];
      best_mask = mask;
    }
  }
  VertexSet side = view.to_set(best_mask);
  return Cut{side, best, vol[best_mask]};
}

/// Deterministic Stoer–Wagner global minimum cut with multiplicities as
/// weights. The independent second route for the oracle cross-check.
inline Cut min_cut_stoer_wagner(const DynamicGraph& g) {
  detail::DenseView view(g);
  const int n = view.n();
  if (n < 2) throw std::invalid_argument("min cut: need at least 2 vertices");
  std::vector<std::vector<Count>> w = view.w;
  std::vector<std::vector<int>> groups(n);
  for (int i = 0; i < n; ++i) groups[i] = {i};
  std::vector<char> merged(n, 0);

  Count best = std::numeric_limits<Count>::max();
  std::vector<int> best_group;
  for (int phase = 0; phase < n - 1; ++phase) {
    std::vector<Count> conn(n, 0);
    std::vector<char> added(n, 0);
    int prev = -1, last = -1;
    for (int step = 0; step + phase < n; ++step) {
      int pick = -1;
      for (int j = 0; j < n; ++j) {
        if (merged[j] || added[j]) continue;
        if (pick == -1 || conn[j] > conn[pick]) pick = j;
      }
      added[pick] = 1;
      prev = last;
      last = pick;
      for (int j = 0; j < n; ++j)
        if (!merged[j] && !added[j]) conn[j] += w[pick][j];
    }
    const Count cut_of_phase = conn[last];
    if (cut_of_phase < best ||
        (cut_of_phase == best && best_group.empty())) {
      best = cut_of_phase;
      best_group = groups[last];
    }
    // merge last into prev
    merged[last] = 1;
    for (int j = 0; j < n; ++j) {
      w[prev][j] += w[last][j];
      w[j][prev] += w[j][last];
    }
    groups[prev].insert(groups[prev].end(), groups[last].begin(),
                        groups[last].end());
  }
  VertexSet side;
  for (int i : best_group) side.members.push_back(view.verts[i]);
  side.normalize();
  return Cut{side, g.boundary(side), g.volume(side)};
}

/// Exact global minimum cut; subset scan under the limit, Stoer–Wagner
/// above it. A disconnected graph yields a boundary-0 cut.
inline Cut exact_min_cut(const DynamicGraph& g, const OracleLimits& lim = {}) {
  if (g.num_vertices() <= lim.max_subset_vertices)
    return min_cut_subset_scan(g, lim);
  return min_cut_stoer_wagner(g);
}

/// All extreme sets with boundary ≤ k and volume ≤ nu. S is extreme iff
/// every nonempty strict subset has strictly larger boundary.
inline std::vector<Cut> enumerate_extreme_sets(const DynamicGraph& g, double k,
                                               double nu,
                                               const OracleLimits& lim = {}) {
  detail::DenseView view(g);
  const int n = view.n();
  detail::check_limit(n, lim, "enumerate_extreme_sets");
  std::vector<Count> bnd, vol;
  view.fill_tables(bnd, vol);
  const std::size_t total = std::size_t{1} << n;
  // minb[mask] = min boundary over nonempty submasks of mask
  std::vector<Count> minb(total, std::numeric_limits<Count>::max());
  std::vector<Cut> out;
  for (std::size_t mask = 1; mask < total; ++mask) {
    Count strict = std::numeric_limits<Count>::max();
    for (std::size_t rest = mask; rest;) {
      const int v = std::countr_zero(rest);
      rest &= rest - 1;
      const std::size_t sub = mask & ~(std::size_t{1} << v);
      if (sub) strict = std::min(strict, minb[sub]);
    }
    minb[mask] = std::min(bnd[mask], strict);
    if (mask + 1 == total) continue;  // S must be a strict subset of V
    if (static_cast<double>(bnd[mask]) <= k &&
        static_cast<double>(vol[mask]) <= nu && strict > bnd[mask])
      out.push_back(Cut{view.to_set(static_cast<std::uint32_t>(mask)),
                        bnd[mask], vol[mask]});
  }
  std::sort(out.begin(), out.end(),
            [](const Cut& a, const Cut& b) { return a.side < b.side; });
  return out;
}

struct GammaExtremeSet {
  Cut cut;
  bool connected = false;
};

/// All γ-extreme sets (every nonempty strict subset T has ∂T > γ·∂S) with
/// boundary ≤ k and volume ≤ nu, tagged with connectivity.
inline std::vector<GammaExtremeSet> enumerate_gamma_extreme(
    const DynamicGraph& g, double gamma, double k, double nu,
    const OracleLimits& lim = {}) {
  detail::DenseView view(g);
  const int n = view.n();
  detail::check_limit(n, lim, "enumerate_gamma_extreme");
  std::vector<Count> bnd, vol;
  view.fill_tables(bnd, vol);
  const std::size_t total = std::size_t{1} << n;
  std::vector<Count> minb(total, std::numeric_limits<Count>::max());
  std::vector<GammaExtremeSet> out;
  for (std::size_t mask = 1; mask < total; ++mask) {
    Count strict = std::numeric_limits<Count>::max();
    for (std::size_t rest = mask; rest;) {
      const int v = std::countr_zero(rest);
      rest &= rest - 1;
      const std::size_t sub = mask & ~(std::size_t{1} << v);
      if (sub) strict = std::min(strict, minb[sub]);
    }
    minb[mask] = std::min(bnd[mask], strict);
    if (mask + 1 == total) continue;
    const bool is_gamma_extreme =
        strict == std::numeric_limits<Count>::max() ||
        static_cast<double>(strict) > gamma * static_cast<double>(bnd[mask]);
    if (is_gamma_extreme && static_cast<double>(bnd[mask]) <= k &&
        static_cast<double>(vol[mask]) <= nu) {
      const auto m32 = static_cast<std::uint32_t>(mask);
      out.push_back({Cut{view.to_set(m32), bnd[mask], vol[mask]},
                     view.connected_mask(m32)});
    }
  }
  std::sort(out.begin(), out.end(), [](const GammaExtremeSet& a,
                                       const GammaExtremeSet& b) {
    return a.cut.side < b.cut.side;
  });
  return out;
}

/// One (1−ε)-boundary-sparse cut of a cluster, with the quantities the
/// sparseness test used.
struct SparseCutRecord {
  VertexSet side;        // U ⊊ C
  Count w_in = 0;        // w(U, C∖U)
  Count w_out = 0;       // w(U, V∖C)
  Count boundary_g = 0;  // ∂_G(U) = w_in + w_out
  Count volume = 0;      // Vol_G(U)
};

/// All U ⊊ C with w(U,C∖U) < (1−ε)·min{w(U,V∖C), w(C∖U,V∖C)}, restricted
/// to ∂_G(U) ≤ k and Vol(U) ≤ nu.
inline std::vector<SparseCutRecord> enumerate_boundary_sparse(
    const DynamicGraph& g, const VertexSet& c, double eps, double k, double nu,
    const OracleLimits& lim = {}) {
  const int nc = static_cast<int>(c.size());
  detail::check_limit(nc, lim, "enumerate_boundary_sparse");
  std::vector<Vertex> cv = c.members;
  std::vector<Count> ext(nc, 0), deg(nc, 0);
  std::vector<std::vector<Count>> win(nc, std::vector<Count>(nc, 0));
  std::vector<int> index_of(g.capacity(), -1);
  for (int i = 0; i < nc; ++i) index_of[cv[i]] = i;
  Count c_out = 0;
  for (int i = 0; i < nc; ++i) {
    deg[i] = g.degree(cv[i]);
    for (const auto& [nb, mult] : g.neighbors(cv[i])) {
      if (nb < g.capacity() && index_of[nb] >= 0)
        win[i][index_of[nb]] = mult;
      else
        ext[i] += mult;
    }
    c_out += ext[i];
  }
  std::vector<SparseCutRecord> out;
  const std::size_t total = std::size_t{1} << nc;
  std::vector<Count> w_in_tab(total, 0), w_out_tab(total, 0), vol_tab(total, 0);
  for (std::size_t mask = 1; mask + 1 < total; ++mask) {
    const int v = std::countr_zero(mask);
    const std::size_t prev = mask & (mask - 1);
    Count to_prev = 0;
    Count in_c = 0;
    for (int j = 0; j < nc; ++j) {
      if (j == v) continue;
      if (prev >> j & 1) to_prev += win[v][j];
      in_c += win[v][j];
    }
    w_in_tab[mask] = w_in_tab[prev] + in_c - 2 * to_prev;
    w_out_tab[mask] = w_out_tab[prev] + ext[v];
    vol_tab[mask] = vol_tab[prev] + deg[v];
    const Count w_in = w_in_tab[mask];
    const Count w_out = w_out_tab[mask];
    const Count w_rest_out = c_out - w_out;
    const double rhs =
        (1.0 - eps) * static_cast<double>(std::min(w_out, w_rest_out));
    if (static_cast<double>(w_in) < rhs &&
        static_cast<double>(w_in + w_out) <= k &&
        static_cast<double>(vol_tab[mask]) <= nu) {
      SparseCutRecord rec;
      for (int j = 0; j < nc; ++j)
        if (mask >> j & 1) rec.side.members.push_back(cv[j]);
      rec.side.normalize();
      rec.w_in = w_in;
      rec.w_out = w_out;
      rec.boundary_g = w_in + w_out;
      rec.volume = vol_tab[mask];
      out.push_back(std::move(rec));
    }
  }
  std::sort(out.begin(), out.end(),
            [](const SparseCutRecord& a, const SparseCutRecord& b) {
              return a.side < b.side;
            });
  return out;
}

/// Exact minimum over cuts S ∋ v with Vol(S) ≤ bound_volume and
/// ∂S ≤ bound_value; ties by (value, volume, lexicographic side).
inline std::optional<Cut> min_local_cut_through(const DynamicGraph& g, Vertex v,
                                                double bound_volume,
                                                double bound_value,
                                                const OracleLimits& lim = {}) {
  detail::DenseView view(g);
  const int n = view.n();
  detail::check_limit(n, lim, "min_local_cut_through");
  int vi = -1;
  for (int i = 0; i < n; ++i)
    if (view.verts[i] == v) vi = i;
  if (vi < 0) throw std::invalid_argument("min_local_cut_through: bad vertex");
  std::vector<Count> bnd, vol;
  view.fill_tables(bnd, vol);
  const std::size_t total = std::size_t{1} << n;
  std::optional<Cut> best;
  for (std::size_t mask = 1; mask + 1 < total; ++mask) {
    if (!(mask >> vi & 1)) continue;
    if (static_cast<double>(vol[mask]) > bound_volume) continue;
    if (static_cast<double>(bnd[mask]) > bound_value) continue;
    Cut cand{view.to_set(static_cast<std::uint32_t>(mask)), bnd[mask], vol[mask]};
    if (!best || cand.boundary < best->boundary ||
        (cand.boundary == best->boundary &&
         (cand.volume < best->volume ||
          (cand.volume == best->volume && cand.side < best->side))))
      best = std::move(cand);
  }
  return best;
}

}  // namespace oracle
}  // namespace dyncut
