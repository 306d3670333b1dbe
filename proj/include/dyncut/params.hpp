#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace dyncut {

enum class Mode { Paper, Desk };

/// ⌈c · ln(n) / p⌉ independent repetitions drive the per-batch failure
/// probability below n^{-c} when a single run succeeds with probability
/// at least p.
inline long long trials_for(double p_lower, double c, double n) {
  if (!(p_lower > 0.0) || p_lower > 1.0)
    throw std::invalid_argument("trials_for: p must be in (0,1]");
  const double raw = std::ceil(c * std::log(n) / p_lower);
  if (!(raw >= 0.0)) return 1;
  if (raw > 9e18) return std::numeric_limits<long long>::max();
  return std::max(1LL, static_cast<long long>(raw));
}

/// Shared thresholds and knobs for one bounded-mincut instance.
///
/// Paper mode keeps the batch-size formulas verbatim (they are
/// astronomically conservative and only meaningful asymptotically); desk
/// mode replaces them with trials_for() at a calibrated single-run
/// success probability so that small instances finish quickly.
struct Params {
  double eps = 0.1;
  double phi = 0.5;
  double alpha = 0.25;
  double lambda_min = 4.0;
  double lambda_max = 4.8;
  double gamma = 1.0 / 3.0;
  double batch_multiplier = 1.0;
  double restart_factor = 4.0;
  double rho = 1.0;
  Mode mode = Mode::Desk;
  std::uint64_t seed = 1;
  int exhaustive_limit = 18;
  int max_depth = 12;

  /// Calibrated worst-case single-run LocalKCut success probability over
  /// the desk test family, and the confidence exponent fed to trials_for.
  double desk_p = 0.05;
  double desk_c = 4.0;

  /// Vertex count of the instance's top-level graph; stands in for the
  /// paper's n inside the log-n factors of the batch sizes.
  double n_context = 16.0;

  void validate() const {
    if (lambda_min <= 0 || lambda_max < lambda_min)
      throw std::invalid_argument("params: need 0 < lambda_min <= lambda_max");
    if (lambda_max > 1.2 * lambda_min + 1e-9)
      throw std::invalid_argument("params: lambda_max/lambda_min must be <= 1.2");
    if (mode == Mode::Paper && eps > 0.04 + 1e-12)
      throw std::invalid_argument("params: paper mode requires eps <= 0.04");
    if (!(phi > 0) || !(eps > 0) || !(eps <= 1))
      throw std::invalid_argument("params: need phi > 0 and eps in (0,1]");
    const double inv = 1.0 / gamma;
    if (std::abs(inv - std::round(inv)) > 1e-9)
      throw std::invalid_argument("params: gamma must be the inverse of an integer");
  }

  double log_n() const { return std::log(std::max(2.718281828459045, n_context)); }

  /// Volume cap that makes a cut "local": 4·λmax/φ.
  double local_cut_bound() const { return 4.0 * lambda_max / phi; }

  /// Volume budget of the mirror-cut processing runs: 2·λmax/φ + 2·λmax,
  /// the uncrossing bound. Never exceeds local_cut_bound for φ ≤ 1.
  double mirror_nu() const { return 2.0 * lambda_max / phi + 2.0 * lambda_max; }

  /// Find-and-cut batch: 10·log n·(λmax/φ)^6·λmax^4 in paper mode.
  double find_and_cut_batch_formula() const {
    return 10.0 * log_n() * std::pow(lambda_max / phi, 6.0) *
           std::pow(lambda_max, 4.0);
  }
  /// Buffer batch: 10·log n·(4λmax/φ)^2 in paper mode.
  double buffer_batch_formula() const {
    return 10.0 * log_n() * std::pow(4.0 * lambda_max / phi, 2.0);
  }
  /// Mirror processing batch: same count as find-and-cut.
  double mirror_batch_formula() const { return find_and_cut_batch_formula(); }

  long long find_and_cut_trials() const { return clamp_trials(find_and_cut_batch_formula()); }
  long long buffer_trials() const { return clamp_trials(buffer_batch_formula()); }
  long long mirror_trials() const { return clamp_trials(mirror_batch_formula()); }

  /// Budget of boundary endpoints re-marked unchecked per affected cluster.
  long long budget_mark_count() const {
    return static_cast<long long>(std::ceil(2.0 * lambda_max));
  }

 private:
  long long clamp_trials(double formula) const {
    double t;
    if (mode == Mode::Paper) {
      t = batch_multiplier * formula;
    } else {
      t = batch_multiplier * static_cast<double>(trials_for(desk_p, desk_c, n_context));
    }
    if (t > 9e18) return std::numeric_limits<long long>::max();
    return std::max(1LL, static_cast<long long>(std::ceil(t)));
  }
};

}  // namespace dyncut
