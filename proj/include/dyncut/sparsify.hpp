#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dyncut/graph.hpp"
#include "dyncut/io.hpp"
#include "dyncut/rng.hpp"

namespace dyncut {

/// p_i = min(1, 54·ln n / (ε²·b)). Small thresholds clamp to 1: oversampling
/// is harmless for correctness.
inline double probability_for(double b, double eps, double n) {
  if (!(b >= 1.0)) throw std::invalid_argument("probability_for: b must be >= 1");
  return std::min(1.0, 54.0 * std::log(n) / (eps * eps * b));
}

/// Uniform edge sampler maintained under the update stream.
///
/// An edge instance is identified by (min u, max v, per-pair sequence
/// number); the keep decision is a pure hash of (seed, identity), so a
/// delete always mirrors the decision of the insert it cancels. Deletions
/// remove the most recent live instance of the pair.
class Sparsifier {
 public:
  Sparsifier(int n, double p, std::uint64_t seed)
      : p_(p), seed_(seed), shadow_(n) {
    if (p_ < 0.0 || p_ > 1.0)
      throw std::invalid_argument("sparsifier: p must be in [0,1]");
  }

  double p() const { return p_; }
  const DynamicGraph& shadow() const { return shadow_; }

  bool sample_decision(Vertex u, Vertex v, Count sequence) const {
    if (p_ >= 1.0) return true;
    if (p_ <= 0.0) return false;
    if (u > v) std::swap(u, v);
    const std::uint64_t key = hash_combine(
        hash_combine(seed_, (static_cast<std::uint64_t>(u) << 32) ^
                                static_cast<std::uint64_t>(v)),
        static_cast<std::uint64_t>(sequence));
    const double unit = static_cast<double>(mix64(key) >> 11) * 0x1.0p-53;
    return unit < p_;
  }

  /// Feeds one source update; returns the op to forward to the instance,
  /// if the affected instance was sampled.
  std::optional<UpdateOp> apply_update(const UpdateOp& op) {
    auto key = std::minmax(op.u, op.v);
    PairState& st = pairs_[key];
    if (op.kind == UpdateOp::Kind::Insert) {
      const Count seq = st.next_sequence++;
      st.live.push_back(seq);
      if (sample_decision(op.u, op.v, seq)) {
        shadow_.insert_edge(op.u, op.v);
        return op;
      }
      return std::nullopt;
    }
    if (st.live.empty())
      throw std::invalid_argument("sparsifier: deleting instance never inserted");
    const Count seq = st.live.back();
    st.live.pop_back();
    if (sample_decision(op.u, op.v, seq)) {
      shadow_.delete_edge(op.u, op.v);
      return op;
    }
    return std::nullopt;
  }

 private:
  struct PairState {
    Count next_sequence = 0;
    std::vector<Count> live;  // stack of live sequence numbers
  };

  double p_;
  std::uint64_t seed_;
  DynamicGraph shadow_;
  std::map<std::pair<Vertex, Vertex>, PairState> pairs_;
};

}  // namespace dyncut
