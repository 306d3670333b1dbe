// Acceptance suite: one criterion per test case, each printing a single
// PASS/FAIL line with its measured numbers. Tolerances are pinned here.

#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <cmath>
#include <iostream>
#include <sstream>

#include "dyncut/hierarchy.hpp"
#include "dyncut/master.hpp"
#include "dyncut/oracle.hpp"
#include "dyncut/sparsify.hpp"
#include "test_support.hpp"

using namespace dyncut;
using namespace dyncut::testing;

namespace {

Params desk_params(std::uint64_t seed) {
  Params p;
  p.mode = Mode::Desk;
  p.lambda_min = 4.0;
  p.lambda_max = 4.8;
  p.phi = 0.5;
  p.alpha = 0.25;
  p.eps = 0.1;
  p.desk_p = 0.05;
  p.desk_c = 4.0;
  p.restart_factor = 4.0;
  p.seed = seed;
  return p;
}

struct StreamGen {
  Rng rng;
  DynamicGraph shadow;
  Count target_m;
  bool hold_density;
  explicit StreamGen(const DynamicGraph& g, std::uint64_t seed,
                     bool hold = true)
      : rng(seed), shadow(g), target_m(g.num_edges()), hold_density(hold) {}

  /// Random update. In hold mode it hovers around the initial edge count,
  /// so the min cut stays near its starting band instead of drifting up.
  std::optional<UpdateOp> next() {
    const bool want_delete =
        hold_density ? (shadow.num_edges() > target_m ||
                        (shadow.num_edges() == target_m && rng.next_below(2) == 0))
                     : rng.next_below(2) == 0;
    for (int attempts = 0; attempts < 40; ++attempts) {
      const int n = shadow.capacity();
      const int u = static_cast<int>(rng.next_below(n));
      const int v = static_cast<int>(rng.next_below(n));
      if (u == v) continue;
      const bool has = shadow.multiplicity(u, v) > 0;
      if (want_delete != has) continue;
      UpdateOp op = has ? delete_op(u, v) : insert_op(u, v);
      apply_op(shadow, op);
      return op;
    }
    return std::nullopt;
  }
};

void report(int criterion, bool pass, const std::string& detail) {
  std::cout << "criterion " << criterion << ": " << (pass ? "PASS" : "FAIL")
            << " (" << detail << ")" << std::endl;
}

/// Invariant 1 over one decomposition, exhaustively.
bool invariant_one_holds(const DynamicGraph& g, const ClusterDecomposition& cd,
                         const Params& prm) {
  for (const auto& [cid, cl] : cd.clusters()) {
    if (cl->frozen || cl->members.size() < 2) continue;
    if (g.volume(cl->members) > 30) continue;  // out of the checked regime
    const auto sparse =
        oracle::enumerate_boundary_sparse(g, cl->members, prm.eps, 1e18, 1e18);
    for (const auto& rec : sparse) {
      if (static_cast<double>(rec.volume) > prm.lambda_max / prm.phi) continue;
      if (static_cast<double>(rec.w_in) > prm.lambda_max) continue;
      if (static_cast<double>(rec.w_in) < prm.lambda_min) continue;
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("criterion 1: end-to-end approximation on the master ladder") {
  const auto t0 = std::chrono::steady_clock::now();
  const double eps = 0.1;
  const int h_cap = 3;
  const double band_hi = std::pow(1.0 + 2.0 * eps, h_cap) * (1.0 + eps) * (1.0 + eps);

  long long queries_returned = 0, in_band = 0;
  long long instance_boundary_matches = 0, instance_boundary_checks = 0;
  int triples = 0;

  for (int t = 0; t < 50; ++t) {
    const std::uint64_t seed = hash_combine(0xACC1, t);
    const int family = t % 5;
    DynamicGraph g(0);
    if (family == 4) {
      g = block_pair(5, 1);  // dumbbell: min cut 1, below the band
    } else if (family == 3 || family == 0) {
      g = block_pair(6, 4);  // expander pair, K6 blocks, min cut 4
    } else if (family == 2) {
      g = block_pair(5 + t % 3, 4);
    } else {
      // G(n, p) with the starting min cut inside the instrument's band
      const int n = 10 + t % 5;
      g = gnp(n, 0.42, seed);
      for (std::uint64_t attempt = 0;
           attempt < 60 && (g.num_edges() > 50 ||
                            oracle::exact_min_cut(g).boundary > 4);
           ++attempt)
        g = gnp(n, 0.42, hash_combine(seed, 0xF11 + attempt));
    }
    if (g.num_edges() > 50 || oracle::exact_min_cut(g).boundary > 4) continue;
    ++triples;

    Params prm = desk_params(hash_combine(seed, 1));
    Master master(g.capacity(), prm);
    StreamGen gen(g, hash_combine(seed, 2));
    Rng toggles(hash_combine(seed, 12));
    std::optional<std::pair<int, int>> pending_reinsert;
    for (const UpdateOp& op : edges_as_inserts(g)) master.apply_update(op);

    for (int step = 1; step <= 100; ++step) {
      std::optional<UpdateOp> op;
      if (family == 3 || family == 0 || family == 2) {
        // A bridge dips out and returns between queries (the cut breathes
        // 4 -> 3 -> 4), with paired internal churn filling the other steps,
        // so every query lands on a settled min cut of 4.
        const int half = g.capacity() / 2;
        const int phase = step % 10;
        if (phase == 1) {
          const int b = (step / 10) % 4;
          op = delete_op(b % half, half + b % half);
        } else if (phase == 4) {
          const int b = (step / 10) % 4;
          op = insert_op(b % half, half + b % half);
        } else if (phase % 2 == 0 && pending_reinsert) {
          op = insert_op(pending_reinsert->first, pending_reinsert->second);
          pending_reinsert.reset();
        } else {
          const int u = static_cast<int>(toggles.next_below(half - 1));
          if (gen.shadow.multiplicity(u, u + 1) > 0) {
            op = delete_op(u, u + 1);
            pending_reinsert = std::make_pair(u, u + 1);
          } else {
            op = insert_op(u, u + 1);
          }
        }
        apply_op(gen.shadow, *op);
      } else {
        op = gen.next();
      }
      if (op) master.apply_update(*op);
      if (step % 5 != 0) continue;
      const auto qr = master.query();
      if (!qr) continue;
      ++queries_returned;
      const Count lambda = oracle::exact_min_cut(gen.shadow).boundary;
      if (lambda > 0) {
        const double ratio = qr->value / static_cast<double>(lambda);
        if (ratio >= 1.0 - 1e-9 && ratio <= band_hi + 1e-9) ++in_band;
      }
      const auto ex = master.extract_cut(*qr);
      ++instance_boundary_checks;
      if (ex.instance_boundary == qr->instance_value) ++instance_boundary_matches;
    }
  }
  const double secs =
      std::chrono::duration_cast<std::chrono::milliseconds>(
          std::chrono::steady_clock::now() - t0)
          .count() /
      1000.0;

  const bool band_ok = in_band * 100 >= queries_returned * 95;
  const bool exact_ok = instance_boundary_matches == instance_boundary_checks;
  const bool time_ok = secs < 300.0;
  std::ostringstream detail;
  detail << "triples=" << triples << " returned=" << queries_returned
         << " in-band=" << in_band << " boundary-exact="
         << instance_boundary_matches << "/" << instance_boundary_checks
         << " time=" << secs << "s";
  report(1, band_ok && exact_ok && time_ok, detail.str());
  CHECK(queries_returned > 100);
  CHECK(band_ok);
  CHECK(exact_ok);
  CHECK(time_ok);
}

TEST_CASE("criterion 2: bounded-instance requirements at p=1") {
  long long in_range_steps = 0, in_range_hits = 0;
  long long above_steps = 0, above_ok = 0;
  for (int t = 0; t < 16; ++t) {
    const std::uint64_t seed = hash_combine(0xACC2, t);
    DynamicGraph g = gnp_connected(10 + t % 3, 0.5, seed);
    Params prm = desk_params(hash_combine(seed, 3));
    Hierarchy h(g, prm);
    StreamGen gen(g, hash_combine(seed, 4), /*hold=*/false);
    for (int step = 0; step < 60; ++step) {
      const auto op = gen.next();
      if (!op) continue;
      h.apply_update(*op);
      const Count lambda = oracle::exact_min_cut(gen.shadow).boundary;
      const InstanceAnswer a = h.query();
      if (lambda >= 4 && static_cast<double>(lambda) <= 4.8) {
        ++in_range_steps;
        const double band =
            std::pow(1.2, static_cast<double>(h.num_levels()));
        if (a.kind == InstanceAnswer::Kind::Value &&
            static_cast<double>(a.value) <=
                band * static_cast<double>(lambda) &&
            a.value >= lambda)
          ++in_range_hits;
      } else if (static_cast<double>(lambda) > 4.8) {
        ++above_steps;
        if (a.kind == InstanceAnswer::Kind::AboveMax ||
            (a.kind == InstanceAnswer::Kind::Value &&
             static_cast<double>(a.value) > 4.8))
          ++above_ok;
      }
    }
  }
  const bool in_range_ok = in_range_hits * 100 >= in_range_steps * 95;
  const bool above_all = above_ok == above_steps;
  std::ostringstream detail;
  detail << "in-range " << in_range_hits << "/" << in_range_steps
         << ", above-max " << above_ok << "/" << above_steps;
  report(2, in_range_ok && above_all, detail.str());
  CHECK(in_range_steps > 50);
  CHECK(above_steps > 50);
  CHECK(in_range_ok);
  CHECK(above_all);
}

TEST_CASE("criterion 3: Invariant 1 enforcement across settled states") {
  long long states = 0, clean = 0;
  for (int t = 0; t < 25; ++t) {
    const std::uint64_t seed = hash_combine(0xACC3, t);
    DynamicGraph g = gnp_connected(8 + t % 3, 0.5, seed);
    Params prm = desk_params(hash_combine(seed, 5));
    Hierarchy h(g, prm);
    StreamGen gen(g, hash_combine(seed, 6));

    auto check_state = [&]() {
      bool ok = true;
      for (int j = 0; j < h.num_levels(); ++j)
        if (const ClusterDecomposition* d = h.level_decomp(j))
          if (!invariant_one_holds(h.level_graph(j), *d, prm)) ok = false;
      ++states;
      if (ok) ++clean;
    };

    check_state();  // after static build
    for (int step = 0; step < 40; ++step) {
      const auto op = gen.next();
      if (!op) continue;
      h.apply_update(*op);
      check_state();
    }
  }
  const bool ok = clean * 100 >= states * 99;
  std::ostringstream detail;
  detail << "clean states " << clean << "/" << states;
  report(3, ok && states >= 1000, detail.str());
  CHECK(states >= 1000);
  CHECK(ok);
}

TEST_CASE("criterion 4: local contraction hit rates against the oracle") {
  // Ten-graph family with known extreme structure.
  std::vector<DynamicGraph> family;
  family.push_back(dumbbell());
  family.push_back(cycle(6));
  family.push_back(cycle(8));
  family.push_back(block_pair(3, 1));
  family.push_back(block_pair(4, 2));
  family.push_back(path(6));
  for (int i = 0; i < 4; ++i)
    family.push_back(gnp_connected(7, 0.5, hash_combine(0xFA, i)));

  const double K = 0.1;
  bool all_extreme_ok = true, all_gamma_positive = true;
  long long batches_total = 0, batches_hit = 0;
  int sets_tested = 0;

  for (std::size_t gi = 0; gi < family.size(); ++gi) {
    const DynamicGraph& g = family[gi];
    const auto extremes = oracle::enumerate_extreme_sets(g, 6, 24);
    for (const Cut& target : extremes) {
      if (target.side.size() > 5 || target.side.size() < 2) continue;
      if (sets_tested >= 8) break;
      ++sets_tested;
      const Vertex v = target.side.members.front();
      LocalCutParams lp;
      lp.nu = static_cast<double>(target.volume) + 1;
      lp.k = static_cast<double>(target.boundary);
      lp.seed = hash_combine(0xC4, gi);
      LocalCutBatchRunner runner(g);
      NestedCutChain chain;
      int hits = 0;
      const int runs = 10000;
      for (int r = 0; r < runs; ++r) {
        runner.run_into(v, lp, static_cast<std::uint64_t>(r), chain);
        for (const auto& cp : chain.checkpoints)
          if (cp.prefix_len == static_cast<int>(target.side.size()) &&
              chain.prefix_set(cp.prefix_len) == target.side) {
            ++hits;
            break;
          }
      }
      const double freq = static_cast<double>(hits) / runs;
      const double bound =
          K / std::pow(static_cast<double>(target.side.size()), 2.0);
      if (freq < bound) all_extreme_ok = false;

      // batch-level detection: 100 batches sized by trials_for with c=10
      LocalCutParams bp = lp;
      bp.trials = trials_for(bound, 10.0, static_cast<double>(g.num_vertices()));
      for (int b = 0; b < 100; ++b) {
        bp.seed = hash_combine(hash_combine(0xBA7C4, gi), b);
        bool found = false;
        for_each_local_cut(g, v, bp, [&](const VertexSet& side, Count) {
          if (side == target.side) {
            found = true;
            return true;
          }
          return false;
        });
        ++batches_total;
        if (found) ++batches_hit;
      }
    }
  }

  // gamma-extreme sets: positive frequency
  int gamma_tested = 0;
  for (std::size_t gi = 0; gi < 3; ++gi) {
    const auto gsets =
        oracle::enumerate_gamma_extreme(family[gi], 1.0 / 3.0, 5, 20);
    for (const auto& gs : gsets) {
      if (!gs.connected || gs.cut.side.size() < 2 || gs.cut.side.size() > 5)
        continue;
      if (gamma_tested >= 4) break;
      ++gamma_tested;
      LocalCutParams lp;
      lp.nu = static_cast<double>(gs.cut.volume) + 1;
      lp.k = static_cast<double>(gs.cut.boundary);
      lp.seed = hash_combine(0x6A, gi);
      LocalCutBatchRunner runner(family[gi]);
      NestedCutChain chain;
      int hits = 0;
      for (int r = 0; r < 10000; ++r) {
        runner.run_into(gs.cut.side.members.front(), lp,
                        static_cast<std::uint64_t>(r), chain);
        for (const auto& cp : chain.checkpoints)
          if (chain.prefix_set(cp.prefix_len) == gs.cut.side) {
            ++hits;
            break;
          }
      }
      if (hits == 0) all_gamma_positive = false;
    }
  }

  const bool batch_ok = batches_hit * 100 >= batches_total * 99;
  std::ostringstream detail;
  detail << "extreme sets=" << sets_tested << " gamma sets=" << gamma_tested
         << " batch detection " << batches_hit << "/" << batches_total;
  report(4, all_extreme_ok && all_gamma_positive && batch_ok, detail.str());
  CHECK(sets_tested >= 6);
  CHECK(all_extreme_ok);
  CHECK(all_gamma_positive);
  CHECK(batch_ok);
}

TEST_CASE("criterion 5: buffer and mirror store against exhaustive oracles") {
  Params prm = desk_params(0xACC5);
  prm.lambda_min = 3.0;
  prm.lambda_max = 3.6;
  long long flag_states = 0, flag_agree = 0;
  long long store_states = 0, store_agree = 0;
  long long stored_exact = 0, stored_checked = 0;
  int engines = 0;

  for (int t = 0; t < 200; ++t) {
    const std::uint64_t seed = hash_combine(0xACC5, t);
    const int n = 6 + t % 3;
    DynamicGraph g = gnp_connected(n, 0.55, seed);
    if (2 * g.num_edges() > 30) continue;  // mirror volume cap
    VertexSet cluster;
    for (int v = 0; v < n - 2; ++v) cluster.insert(v);
    MirrorEngine eng(g, cluster, &prm, hash_combine(seed, 7));
    ++engines;
    Rng rng(hash_combine(seed, 8));
    for (int step = 0; step < 50; ++step) {
      const Vertex u = cluster.members[rng.next_below(cluster.size())];
      const Vertex v = cluster.members[rng.next_below(cluster.size())];
      const int kind = static_cast<int>(rng.next_below(3));
      if (kind == 0 && u != v) {
        eng.edge_op_internal(true, u, v);
      } else if (kind == 1 && u != v &&
                 eng.working().multiplicity(eng.local_id(u), eng.local_id(v)) >
                     0) {
        eng.edge_op_internal(false, u, v);
      } else {
        eng.edge_op_boundary(true, u);
      }

      bool exists_small = false;
      for (Vertex w : eng.working().live_vertices()) {
        const auto c = oracle::min_local_cut_through(
            eng.working(), w, prm.local_cut_bound(), prm.lambda_min - 1e-9);
        if (c && static_cast<double>(c->boundary) < prm.lambda_min) {
          exists_small = true;
          break;
        }
      }
      ++flag_states;
      if (eng.has_small_cut() == exists_small) ++flag_agree;

      if (eng.has_small_cut()) {
        std::vector<int> side;
        for (Vertex w : eng.small_cut_global().members)
          side.push_back(eng.local_id(w));
        if (eng.small_cut_contains_outside()) side.push_back(eng.outside_local());
        ++stored_checked;
        if (eng.working().boundary(VertexSet{side}) == eng.small_cut_value())
          ++stored_exact;
      } else {
        // min_mirror_cut against the exhaustive minimum
        std::optional<Count> truth;
        for (Vertex w : eng.forwarded().live_vertices()) {
          if (w == eng.outside_local()) continue;
          const auto c = oracle::min_local_cut_through(
              eng.forwarded(), w, prm.mirror_nu() - 1e-9, prm.lambda_max);
          if (c && (!truth || c->boundary < *truth)) truth = c->boundary;
        }
        const auto mc = eng.min_mirror_cut();
        ++store_states;
        if (truth.has_value() == mc.has_value() &&
            (!truth || *truth == mc->value))
          ++store_agree;
        for (const auto& [id, rec] : eng.store().records()) {
          ++stored_checked;
          if (eng.forwarded().boundary(VertexSet{rec.members}) == rec.value)
            ++stored_exact;
        }
      }
    }
  }

  const bool flag_ok = flag_agree * 100 >= flag_states * 99;
  const bool store_ok = store_agree * 100 >= store_states * 99;
  const bool exact_ok = stored_exact == stored_checked;
  std::ostringstream detail;
  detail << "engines=" << engines << " flag " << flag_agree << "/" << flag_states
         << " store " << store_agree << "/" << store_states << " exact "
         << stored_exact << "/" << stored_checked;
  report(5, flag_ok && store_ok && exact_ok, detail.str());
  CHECK(engines >= 150);
  CHECK(flag_ok);
  CHECK(store_ok);
  CHECK(exact_ok);
}

TEST_CASE("criterion 6: sparsifier cut concentration") {
  const Count mult = 536;
  DynamicGraph g(12);
  for (int i = 0; i < 12; ++i)
    for (int j = i + 1; j < 12; ++j)
      if (j != i + 6)
        for (Count c = 0; c < mult; ++c) g.insert_edge(i, j);
  const Count lambda = oracle::exact_min_cut(g).boundary;
  REQUIRE(lambda == 10 * mult);
  const double eps = 0.5;
  const double p = probability_for(static_cast<double>(lambda), eps, 12.0);
  REQUIRE(p < 1.0);

  int in_band = 0;
  const int seeds = 200;
  for (int s = 0; s < seeds; ++s) {
    Sparsifier sp(12, p, hash_combine(0xACC6, s));
    for (const UpdateOp& op : edges_as_inserts(g)) sp.apply_update(op);
    const Cut sampled = oracle::exact_min_cut(sp.shadow());
    const double expect = p * static_cast<double>(lambda);
    if (static_cast<double>(sampled.boundary) >= (1.0 - eps) * expect &&
        static_cast<double>(sampled.boundary) <= (1.0 + eps) * expect)
      ++in_band;
  }
  const bool ok = in_band * 100 >= seeds * 95;
  std::ostringstream detail;
  detail << "in-band seeds " << in_band << "/" << seeds << " (p=" << p << ")";
  report(6, ok, detail.str());
  CHECK(ok);
}

TEST_CASE("criterion 7: determinism and amortization diagnostics") {
  // identical seeds -> identical traces
  auto run_trace = [](std::uint64_t seed) {
    const DynamicGraph g = gnp_connected(10, 0.45, 0xD0);
    Params prm = desk_params(seed);
    Master m(10, prm);
    for (const UpdateOp& op : edges_as_inserts(g)) m.apply_update(op);
    StreamGen gen(g, 0xD1);
    std::ostringstream trace;
    for (int step = 0; step < 30; ++step) {
      const auto op = gen.next();
      if (op) m.apply_update(*op);
      const auto qr = m.query();
      if (qr)
        trace << qr->ladder_index << ':' << qr->value << ';';
      else
        trace << "none;";
    }
    return trace.str();
  };
  const bool deterministic = run_trace(0xACC7) == run_trace(0xACC7);

  // split-cost amortization and responsibility bounds on live instances
  bool split_ok = true, resp_ok = true;
  for (int t = 0; t < 6; ++t) {
    const std::uint64_t seed = hash_combine(0xACC7, t);
    DynamicGraph g = gnp_connected(10, 0.5, seed);
    Params prm = desk_params(hash_combine(seed, 9));
    Hierarchy h(g, prm);
    StreamGen gen(g, hash_combine(seed, 10));
    const long long resp_bound =
        static_cast<long long>(
            std::ceil(prm.lambda_max / (prm.phi * prm.lambda_min))) +
        1;
    for (int step = 0; step < 60; ++step) {
      const auto op = gen.next();
      if (!op) continue;
      h.apply_update(*op);
      for (int j = 0; j < h.num_levels(); ++j)
        if (const ClusterDecomposition* d = h.level_decomp(j))
          for (const auto& [v, count] : d->responsibility())
            if (count > resp_bound) resp_ok = false;
    }
    const double m_plus_u = static_cast<double>(g.num_edges()) +
                            static_cast<double>(h.lifetime_ops_received());
    const double bound = 8.0 * m_plus_u * std::log2(std::max(4.0, m_plus_u));
    if (static_cast<double>(h.lifetime_split_cost()) > bound) split_ok = false;
  }

  std::ostringstream detail;
  detail << "deterministic=" << (deterministic ? "yes" : "no")
         << " split-cost-bound=" << (split_ok ? "ok" : "violated")
         << " responsibility-bound=" << (resp_ok ? "ok" : "violated");
  report(7, deterministic && split_ok && resp_ok, detail.str());
  CHECK(deterministic);
  CHECK(split_ok);
  CHECK(resp_ok);
}

TEST_CASE("criterion 8: global contraction calibration") {
  bool all_ok = true;
  std::ostringstream detail;
  std::vector<DynamicGraph> graphs;
  graphs.push_back(cycle(5));
  for (int i = 0; i < 4; ++i)
    graphs.push_back(gnp_connected(6 + i % 3, 0.55, hash_combine(0xACC8, i)));

  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    const DynamicGraph& g = graphs[gi];
    const int n = g.num_vertices();
    const Count lambda = oracle::exact_min_cut(g).boundary;
    const long long budget = static_cast<long long>(
        std::ceil(10.0 * std::log(n) * (n * (n - 1) / 2.0)));
    int successes = 0;
    for (int rep = 0; rep < 100; ++rep) {
      bool found = false;
      for (long long r = 0; r < budget && !found; ++r)
        if (karger_global(g, hash_combine(hash_combine(gi, rep), r)).boundary ==
            lambda)
          found = true;
      if (found) ++successes;
    }
    detail << (gi ? " " : "") << "g" << gi << "=" << successes << "/100";
    if (successes < 99) all_ok = false;
  }
  report(8, all_ok, detail.str());
  CHECK(all_ok);
}
