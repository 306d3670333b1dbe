#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "dyncut/graph.hpp"
#include "dyncut/hierarchy.hpp"
#include "dyncut/io.hpp"
#include "dyncut/params.hpp"
#include "dyncut/sparsify.hpp"

namespace dyncut {

/// The global algorithm: a ladder of bounded-mincut instances, one per
/// threshold b_i = 1.1^i, each behind an independent uniform sparsifier.
/// A query returns the smallest-index instance whose answer lies in
/// [λmin, λmax], scaled back by 1/p_i.
class Master {
 public:
  struct Instance {
    int index = 0;  // ladder index i
    double b = 1.0;
    double p = 1.0;
    std::unique_ptr<Sparsifier> sparsifier;
    std::unique_ptr<Hierarchy> hierarchy;
  };

  struct QueryResult {
    double value = 0.0;       // instance value scaled by 1/p_j
    int ladder_index = 0;     // the winning i
    Count instance_value = 0; // cut value inside the sampled graph
    InstanceAnswer answer;    // for extraction
  };

  struct ExtractResult {
    VertexSet side;
    Count source_boundary = 0;    // boundary in the full graph
    Count instance_boundary = 0;  // boundary in the winning sampled graph
  };

  Master(int n, const Params& base) : n_(n), source_(n) {
    params_ = base;
    params_.n_context = static_cast<double>(n);
    if (params_.mode == Mode::Paper) {
      const double x = 54.0 * std::log(n) / (params_.eps * params_.eps);
      params_.lambda_min = (1.0 - params_.eps) * x;
      params_.lambda_max = 1.1 * (1.0 + params_.eps) * x;
    }
    params_.validate();
    const int top = static_cast<int>(
        std::ceil(std::log(static_cast<double>(n) * n) / std::log(1.1)));
    for (int i = 1; i <= top; ++i) {
      Instance inst;
      inst.index = i;
      inst.b = std::pow(1.1, i);
      inst.p = sampling_probability(inst.b);
      inst.sparsifier = std::make_unique<Sparsifier>(
          n, inst.p, hash_combine(params_.seed, 0x5A00 + i));
      Params ip = params_;
      ip.seed = hash_combine(params_.seed, 0x1000 + i);
      inst.hierarchy =
          std::make_unique<Hierarchy>(inst.sparsifier->shadow(), ip);
      instances_.push_back(std::move(inst));
    }
  }

  int n() const { return n_; }
  std::size_t ladder_size() const { return instances_.size(); }
  const Instance& instance(std::size_t idx) const { return instances_.at(idx); }
  const DynamicGraph& source() const { return source_; }
  const Params& params() const { return params_; }

  void apply_update(const UpdateOp& op) {
    apply_op(source_, op);
    for (Instance& inst : instances_) {
      const std::optional<UpdateOp> forwarded = inst.sparsifier->apply_update(op);
      if (forwarded) inst.hierarchy->apply_update(*forwarded);
    }
  }

  /// Same fan-out with instances partitioned across workers. Instances are
  /// mutually independent, so the result is identical to the serial path.
  void apply_update_parallel(const UpdateOp& op, int workers) {
    if (workers <= 1) {
      apply_update(op);
      return;
    }
    apply_op(source_, op);
    std::vector<std::thread> pool;
    const int stride = std::max(1, static_cast<int>(
        (instances_.size() + workers - 1) / workers));
    for (int w = 0; w < workers; ++w) {
      const std::size_t lo = static_cast<std::size_t>(w) * stride;
      if (lo >= instances_.size()) break;
      const std::size_t hi = std::min(instances_.size(), lo + stride);
      pool.emplace_back([this, op, lo, hi] {
        for (std::size_t i = lo; i < hi; ++i) {
          const auto forwarded = instances_[i].sparsifier->apply_update(op);
          if (forwarded) instances_[i].hierarchy->apply_update(*forwarded);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }

  /// Smallest ladder index whose instance answers a value in range wins.
  std::optional<QueryResult> query() const {
    for (const Instance& inst : instances_) {
      const InstanceAnswer ans = inst.hierarchy->query();
      if (ans.kind != InstanceAnswer::Kind::Value) continue;
      QueryResult out;
      out.value = static_cast<double>(ans.value) / inst.p;
      out.ladder_index = inst.index;
      out.instance_value = ans.value;
      out.answer = ans;
      return out;
    }
    return std::nullopt;
  }

  ExtractResult extract_cut(const QueryResult& qr) const {
    const Instance& inst = instances_.at(qr.ladder_index - 1);
    ExtractResult out;
    out.side = inst.hierarchy->extract_cut(qr.answer);
    out.source_boundary = source_.boundary(out.side);
    out.instance_boundary = inst.hierarchy->level_graph(0).boundary(out.side);
    return out;
  }

 private:
  double sampling_probability(double b) const {
    if (params_.mode == Mode::Paper)
      return probability_for(b, params_.eps, static_cast<double>(n_));
    // Desk thresholds pin λmin directly; the anchor keeps paper mode's
    // identity p_i·b_i = λmin/(1−ε).
    const double anchor = params_.lambda_min / (1.0 - params_.eps);
    return std::min(1.0, anchor / b);
  }

  int n_;
  Params params_;
  DynamicGraph source_;
  std::vector<Instance> instances_;
};

}  // namespace dyncut
