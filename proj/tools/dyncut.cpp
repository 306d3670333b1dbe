// dyncut: replay update streams against the dynamic approximate min-cut
// pipeline, or benchmark it on generated families with an exact oracle.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "dyncut/io.hpp"
#include "dyncut/master.hpp"
#include "dyncut/oracle.hpp"
#include "dyncut/params.hpp"

namespace {

using namespace dyncut;

struct CommonOpts {
  std::string mode = "desk";
  double eps = 0.1;
  double phi = 0.5;
  double alpha = 0.25;
  double rho = 1.0;
  double lambda_min = 4.0;
  double lambda_max = 4.8;
  double restart_factor = 4.0;
  double desk_p = 0.05;
  double desk_c = 4.0;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int parallel_instances = 1;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--mode", o.mode, "paper or desk")->check(CLI::IsMember({"paper", "desk"}));
  cmd->add_option("--eps", o.eps, "approximation parameter");
  cmd->add_option("--phi", o.phi, "expander conductance");
  cmd->add_option("--alpha", o.alpha, "boundary-linked padding");
  cmd->add_option("--rho", o.rho, "recourse parameter in the restart period");
  cmd->add_option("--lambda-min", o.lambda_min, "desk-mode lambda_min override");
  cmd->add_option("--lambda-max", o.lambda_max, "desk-mode lambda_max override");
  cmd->add_option("--restart-factor", o.restart_factor, "restart period factor");
  cmd->add_option("--desk-p", o.desk_p, "calibrated single-run hit probability");
  cmd->add_option("--desk-c", o.desk_c, "confidence exponent for batch sizes");
  cmd->add_option("--seed", o.seed, "PRNG seed (falls back to DYNCUT_SEED)")
      ->each([&o](const std::string&) { o.seed_given = true; });
  cmd->add_option("--parallel-instances", o.parallel_instances,
                  "fan ladder instances across this many workers");
}

Params to_params(const CommonOpts& o) {
  Params p;
  p.mode = o.mode == "paper" ? Mode::Paper : Mode::Desk;
  p.eps = o.eps;
  p.phi = o.phi;
  p.alpha = o.alpha;
  p.rho = o.rho;
  p.lambda_min = o.lambda_min;
  p.lambda_max = o.lambda_max;
  p.restart_factor = o.restart_factor;
  p.desk_p = o.desk_p;
  p.desk_c = o.desk_c;
  if (o.seed_given) {
    p.seed = o.seed;
  } else if (const char* env = std::getenv("DYNCUT_SEED")) {
    p.seed = std::strtoull(env, nullptr, 10);
  } else {
    p.seed = 1;
  }
  return p;
}

void fan_out(Master& m, const UpdateOp& op, int workers) {
  if (workers <= 1) {
    m.apply_update(op);
    return;
  }
  m.apply_update_parallel(op, workers);
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

void write_diagnostics(const Master& m, const std::string& dir, long long step,
                       int instance_index) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const Master::Instance& inst =
      m.instance(static_cast<std::size_t>(std::max(0, instance_index - 1)));
  {
    std::ofstream lv(dir + "/levels_step" + std::to_string(step) + ".csv");
    inst.hierarchy->dump_levels_csv(lv);
  }
  std::ofstream cl(dir + "/clusters_step" + std::to_string(step) + ".csv");
  for (int j = 0; j < inst.hierarchy->num_levels(); ++j) {
    if (const ClusterDecomposition* d = inst.hierarchy->level_decomp(j)) {
      cl << "# level " << j << "\n";
      d->dump_csv(cl);
    }
  }
}

int cmd_run(const std::string& graph_path, const std::string& stream_path,
            const CommonOpts& opts, bool emit_cut, bool with_oracle,
            const std::string& diag_dir) {
  std::ifstream gf(graph_path);
  if (!gf) {
    std::cerr << "cannot open graph file: " << graph_path << "\n";
    return 2;
  }
  DynamicGraph initial = read_graph(gf);
  std::ifstream sf(stream_path);
  if (!sf) {
    std::cerr << "cannot open stream file: " << stream_path << "\n";
    return 2;
  }
  const std::vector<StreamItem> stream = read_stream(sf);

  if (with_oracle && initial.capacity() > 20) {
    std::cerr << "--oracle requires n <= 20\n";
    return 2;
  }

  Master master(initial.capacity(), to_params(opts));
  for (const UpdateOp& op : [&] {
    std::vector<UpdateOp> ops;
    for (Vertex u = 0; u < initial.capacity(); ++u)
      for (const auto& [v, mult] : initial.neighbors(u))
        if (u < v)
          for (Count i = 0; i < mult; ++i) ops.push_back(insert_op(u, v));
    return ops;
  }())
    fan_out(master, op, opts.parallel_instances);

  long long step = 0;
  for (const StreamItem& item : stream) {
    ++step;
    if (item.op) {
      fan_out(master, *item.op, opts.parallel_instances);
      continue;
    }
    const auto qr = master.query();
    if (!qr) {
      std::cout << "value=none instance=-1 exact_boundary=-1";
    } else {
      const auto ex = master.extract_cut(*qr);
      std::cout << "value=" << fmt(qr->value) << " instance=" << qr->ladder_index
                << " exact_boundary=" << ex.source_boundary;
      if (emit_cut) {
        std::cout << " cut=";
        for (std::size_t i = 0; i < ex.side.members.size(); ++i)
          std::cout << (i ? " " : "") << ex.side.members[i];
      }
    }
    if (with_oracle) {
      const Cut mc = oracle::exact_min_cut(master.source());
      std::cout << " exact_min_cut=" << mc.boundary;
    }
    std::cout << "\n";
    if (!diag_dir.empty()) write_diagnostics(master, diag_dir, step,
                                             qr ? qr->ladder_index : 1);
  }
  return 0;
}

DynamicGraph make_family(const std::string& family, int n, double gnp_p,
                         std::uint64_t seed) {
  if (family == "dumbbell" || family == "expander-pair") {
    const int half = n / 2;
    DynamicGraph g(2 * half);
    for (int i = 0; i < half; ++i)
      for (int j = i + 1; j < half; ++j) {
        g.insert_edge(i, j);
        g.insert_edge(half + i, half + j);
      }
    const int bridges = family == "dumbbell" ? 1 : std::max(2, half / 2 + 1);
    for (int b = 0; b < bridges; ++b) g.insert_edge(b % half, half + (b % half));
    return g;
  }
  DynamicGraph g(n);
  Rng rng(hash_combine(seed, 0xFA31));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.next_double() < gnp_p) g.insert_edge(i, j);
  return g;
}

int cmd_bench(const std::string& family, int n, int ops, int trials,
              double gnp_p, int query_every, const CommonOpts& opts,
              bool with_oracle, const std::string& out_path) {
  if (with_oracle && n > 20) {
    std::cerr << "--oracle requires n <= 20\n";
    return 2;
  }
  std::ofstream out_file;
  std::ostream* out = &std::cout;
  if (!out_path.empty()) {
    out_file.open(out_path);
    if (!out_file) {
      std::cerr << "cannot open output file: " << out_path << "\n";
      return 2;
    }
    out = &out_file;
  }
  *out << "step,query_value,instance,exact_boundary";
  if (with_oracle) *out << ",exact_min_cut,ratio";
  *out << "\n";

  Params base = to_params(opts);
  for (int trial = 0; trial < trials; ++trial) {
    const std::uint64_t trial_seed = hash_combine(base.seed, 0xBE + trial);
    DynamicGraph g = make_family(family, n, gnp_p, trial_seed);
    Params prm = base;
    prm.seed = trial_seed;
    Master master(g.capacity(), prm);
    DynamicGraph shadow(g.capacity());
    for (Vertex u = 0; u < g.capacity(); ++u)
      for (const auto& [v, mult] : g.neighbors(u))
        if (u < v)
          for (Count i = 0; i < mult; ++i) {
            fan_out(master, insert_op(u, v), opts.parallel_instances);
            shadow.insert_edge(u, v);
          }

    Rng rng(hash_combine(trial_seed, 0x57));
    for (int step = 1; step <= ops; ++step) {
      // random update: delete an existing edge or insert a fresh one
      const int u = static_cast<int>(rng.next_below(g.capacity()));
      const int v = static_cast<int>(rng.next_below(g.capacity()));
      if (u == v) continue;
      UpdateOp op = shadow.multiplicity(u, v) > 0 && rng.next_below(2) == 0
                        ? delete_op(u, v)
                        : insert_op(u, v);
      apply_op(shadow, op);
      fan_out(master, op, opts.parallel_instances);
      if (step % query_every != 0) continue;

      const auto qr = master.query();
      *out << trial * ops + step << ',';
      if (qr) {
        const auto ex = master.extract_cut(*qr);
        *out << fmt(qr->value) << ',' << qr->ladder_index << ','
             << ex.source_boundary;
      } else {
        *out << "none,-1,-1";
      }
      if (with_oracle) {
        const Cut mc = oracle::exact_min_cut(shadow);
        *out << ',' << mc.boundary << ',';
        if (qr && mc.boundary > 0)
          *out << fmt(qr->value / static_cast<double>(mc.boundary));
        else
          *out << "na";
      }
      *out << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynamic approximate minimum cut"};
  app.require_subcommand(1);

  CommonOpts run_opts;
  std::string graph_path, stream_path, diag_dir;
  bool emit_cut = false, run_oracle = false;
  CLI::App* run = app.add_subcommand("run", "replay an update stream");
  run->add_option("--graph", graph_path, "graph file: \"n m\" then edges")
      ->required();
  run->add_option("--stream", stream_path, "updates: +/-/? lines")->required();
  run->add_flag("--emit-cut", emit_cut, "also print the cut's vertex set");
  run->add_flag("--oracle", run_oracle, "print the exact min cut per query");
  run->add_option("--diag-dir", diag_dir, "write per-query diagnostics CSVs");
  add_common(run, run_opts);

  CommonOpts bench_opts;
  std::string family = "gnp", out_path;
  int n = 12, ops = 100, trials = 10, query_every = 5;
  double gnp_p = 0.4;
  bool bench_oracle = false;
  CLI::App* bench = app.add_subcommand("bench", "generated-family benchmark");
  bench->add_option("--family", family, "gnp, dumbbell or expander-pair")
      ->check(CLI::IsMember({"gnp", "dumbbell", "expander-pair"}));
  bench->add_option("--n", n, "vertex count");
  bench->add_option("--ops", ops, "updates per trial");
  bench->add_option("--trials", trials, "independent (graph, stream) trials");
  bench->add_option("--p", gnp_p, "edge probability for gnp");
  bench->add_option("--query-every", query_every, "query cadence");
  bench->add_flag("--oracle", bench_oracle, "exact min cut and ratio columns");
  bench->add_option("--out", out_path, "CSV destination (default stdout)");
  add_common(bench, bench_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return cmd_run(graph_path, stream_path, run_opts, emit_cut, run_oracle,
                     diag_dir);
    return cmd_bench(family, n, ops, trials, gnp_p, query_every, bench_opts,
                     bench_oracle, out_path);
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
