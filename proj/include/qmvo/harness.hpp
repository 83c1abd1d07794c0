#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "qmvo/optimizers.hpp"
#include "qmvo/portfolio.hpp"
#include "qmvo/quality.hpp"

namespace qmvo {

/// Binomial coefficient nCB continued to real B via log-gamma:
/// exp(lnG(n+1) - lnG(B+1) - lnG(n-B+1)).
inline double binomial_gamma(double n, double budget) {
  if (n < 1.0 || budget < 0.0 || budget > n)
    throw std::invalid_argument("binomial_gamma: need n >= 1 and 0 <= B <= n");
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(budget + 1.0) -
                  std::lgamma(n - budget + 1.0));
}

/// Fitted model eta(B) = -a Gamma^{nCB}(B) + c.
struct TrendFit {
  int n = 0;
  double a = 0.0;
  double c = 0.0;
  double residual_rms = 0.0;
};

/// Linear least squares in (a, c) for points (B, mean_eta) at fixed n.
inline TrendFit fit_binomial_trend(const std::vector<std::pair<double, double>>& points,
                                   int n) {
  if (points.size() < 2)
    throw std::invalid_argument("fit_binomial_trend: need at least 2 points");
  const double m = static_cast<double>(points.size());
  double s_g = 0.0, s_gg = 0.0, s_y = 0.0, s_gy = 0.0;
  std::vector<double> gammas;
  gammas.reserve(points.size());
  for (const auto& [b, y] : points) {
    const double g = binomial_gamma(n, b);
    gammas.push_back(g);
    s_g += g;
    s_gg += g * g;
    s_y += y;
    s_gy += g * y;
  }
  const double det = s_gg * m - s_g * s_g;
  if (std::abs(det) <= 1e-12 * std::max(1.0, s_gg * m))
    throw std::invalid_argument("fit_binomial_trend: singular design (all Gamma equal)");

  TrendFit fit;
  fit.n = n;
  fit.a = (s_g * s_y - m * s_gy) / det;
  fit.c = (fit.a * s_g + s_y) / m;
  double ss = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double predicted = -fit.a * gammas[i] + fit.c;
    const double r = points[i].second - predicted;
    ss += r * r;
  }
  fit.residual_rms = std::sqrt(ss / m);
  return fit;
}

// ---------------------------------------------------------------------------
// Run organization

enum class SchemePreset { SoftMin, Soft100, DickeComplete, HammingRing };

inline std::string preset_name(SchemePreset preset) {
  switch (preset) {
    case SchemePreset::SoftMin: return "soft-min";
    case SchemePreset::Soft100: return "soft-100";
    case SchemePreset::DickeComplete: return "dicke-complete";
    case SchemePreset::HammingRing: return "hamming-ring";
  }
  throw std::logic_error("preset_name: unreachable");
}

inline SchemePreset preset_from_name(const std::string& name) {
  if (name == "soft-min") return SchemePreset::SoftMin;
  if (name == "soft-100") return SchemePreset::Soft100;
  if (name == "dicke-complete") return SchemePreset::DickeComplete;
  if (name == "hamming-ring") return SchemePreset::HammingRing;
  throw std::invalid_argument("unknown scheme preset: " + name);
}

/// Resolves a preset against a concrete instance (soft-min computes the
/// instance's minimal penalty factor).
inline ConstraintScheme make_scheme(SchemePreset preset, const ProblemInstance& inst,
                                    std::uint64_t init_seed = 0) {
  switch (preset) {
    case SchemePreset::SoftMin: return SoftPenalty{alpha_min(inst)};
    case SchemePreset::Soft100: return SoftPenalty{100.0};
    case SchemePreset::DickeComplete: return HardDickeComplete{};
    case SchemePreset::HammingRing: return HardHammingRing{init_seed};
  }
  throw std::logic_error("make_scheme: unreachable");
}

enum class OptimizerKind { Grid, Random, NelderMead, Powell, GradientDescent, Adam };

inline std::string optimizer_name(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::Grid: return "grid";
    case OptimizerKind::Random: return "random";
    case OptimizerKind::NelderMead: return "nelder-mead";
    case OptimizerKind::Powell: return "powell";
    case OptimizerKind::GradientDescent: return "gd";
    case OptimizerKind::Adam: return "adam";
  }
  throw std::logic_error("optimizer_name: unreachable");
}

inline OptimizerKind optimizer_from_name(const std::string& name) {
  if (name == "grid") return OptimizerKind::Grid;
  if (name == "random") return OptimizerKind::Random;
  if (name == "nelder-mead") return OptimizerKind::NelderMead;
  if (name == "powell") return OptimizerKind::Powell;
  if (name == "gd") return OptimizerKind::GradientDescent;
  if (name == "adam") return OptimizerKind::Adam;
  throw std::invalid_argument("unknown optimizer: " + name);
}

// Seed streams derived from a run seed. Documented so stand-alone runs can
// reproduce any harness cell exactly.
inline std::uint64_t x0_stream(std::uint64_t run_seed) { return derive_seed(run_seed, {1}); }
inline std::uint64_t shot_stream(std::uint64_t run_seed) { return derive_seed(run_seed, {2}); }
inline std::uint64_t quality_stream(std::uint64_t run_seed) { return derive_seed(run_seed, {3}); }
inline std::uint64_t init_stream(std::uint64_t run_seed) { return derive_seed(run_seed, {4}); }

/// Everything needed to execute (or replay) one optimization run.
struct RunSpec {
  ProblemInstance instance;
  std::uint64_t instance_seed = 0;  // informational; 0 when externally supplied
  SchemePreset preset = SchemePreset::Soft100;
  int depth = 1;
  OptimizerKind optimizer = OptimizerKind::NelderMead;
  std::string backend = "exact";  // "exact" | "shots"
  int shots = 2048;
  int budget = 500;
  int repeat = 0;
  std::uint64_t run_seed = 0;
  double trotter_eps = 0.25;
};

/// One run's results: self-contained and replayable from its seeds.
struct RunRecord {
  RunSpec spec;
  double alpha = 0.0;           // resolved soft penalty (0 for hard schemes)
  std::uint64_t init_seed = 0;  // hamming-ring initialization actually used
  Params best_params;
  double best_value = 0.0;
  int evals_used = 0;
  std::string terminated;
  QualityReport quality;
  double wall_time_s = 0.0;
};

/// One run with the full optimizer trajectory kept alongside the record.
struct SingleRun {
  RunRecord record;
  OptResult opt;
};

inline SingleRun run_single_full(const RunSpec& spec) {
  spec.instance.validate();
  if (spec.backend != "exact" && spec.backend != "shots")
    throw std::invalid_argument("run_single: backend must be 'exact' or 'shots'");
  const auto t0 = std::chrono::steady_clock::now();

  RunRecord record;
  record.spec = spec;
  // the grid defines its own explicit budget: the full lattice
  if (spec.optimizer == OptimizerKind::Grid)
    record.spec.budget = std::max(spec.budget, 50 * 25);
  record.init_seed = init_stream(spec.run_seed);
  const ConstraintScheme scheme = make_scheme(spec.preset, spec.instance, record.init_seed);
  if (const auto* soft = std::get_if<SoftPenalty>(&scheme)) record.alpha = soft->alpha;

  const AnsatzConfig config =
      make_ansatz_config(spec.instance, scheme, spec.depth, spec.trotter_eps);
  const CostTable table = cost_table(spec.instance, scheme);

  Backend backend = ExactBackend{};
  if (spec.backend == "shots") backend = ShotBackend{spec.shots, shot_stream(spec.run_seed)};

  BudgetedObjective obj = make_qaoa_objective(config, table, backend, record.spec.budget);

  OptResult opt;
  if (spec.optimizer == OptimizerKind::Grid) {
    opt = grid_search(obj);
  } else if (spec.optimizer == OptimizerKind::Random) {
    opt = random_search(obj, x0_stream(spec.run_seed));
  } else {
    Rng rng(x0_stream(spec.run_seed));
    std::vector<double> x0(2 * spec.depth);
    for (double& v : x0) v = rng.uniform(0.0, 2.0 * std::numbers::pi);
    switch (spec.optimizer) {
      case OptimizerKind::NelderMead: opt = nelder_mead(obj, x0); break;
      case OptimizerKind::Powell: opt = powell(obj, x0); break;
      case OptimizerKind::GradientDescent: opt = gradient_descent(obj, x0); break;
      case OptimizerKind::Adam: opt = adam(obj, x0); break;
      default: throw std::logic_error("run_single: unreachable optimizer");
    }
  }

  record.best_params = opt.best_params();
  record.best_value = opt.best_value;
  record.evals_used = opt.evals_used;
  record.terminated = terminated_name(opt.terminated);

  // Quality of the best ansatz, measured with the run's backend.
  const Statevector best_state = evolve_ansatz(config, record.best_params, table);
  if (spec.backend == "shots") {
    const ShotCounts counts = measure_counts(
        best_state, static_cast<std::uint64_t>(spec.shots), quality_stream(spec.run_seed));
    record.quality = make_quality_report(counts, table);
  } else {
    record.quality = make_quality_report(probabilities(best_state), table);
  }

  record.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {std::move(record), std::move(opt)};
}

inline RunRecord run_single(const RunSpec& spec) { return run_single_full(spec).record; }

/// Re-executes a record from its stored seeds.
inline RunRecord replay_record(const RunRecord& record) { return run_single(record.spec); }

// ---------------------------------------------------------------------------
// Experiments

/// B/n sweep: for each n in [n_lo, n_hi], each B in 1..n-1 and each of
/// instances_per_point fresh random instances, run the p=1 grid search on
/// the exact backend and record the solution quality.
inline std::vector<RunRecord> sweep_bn(int n_lo, int n_hi, int instances_per_point,
                                       std::uint64_t master_seed, SchemePreset preset,
                                       const RandomInstanceConfig& base_cfg = {},
                                       int n_guard = 12) {
  if (n_lo < 2 || n_hi < n_lo) throw std::invalid_argument("sweep_bn: bad n range");
  if (n_hi > n_guard)
    throw std::invalid_argument("sweep_bn: n exceeds resource guard (" +
                                std::to_string(n_guard) + ")");
  if (instances_per_point < 1)
    throw std::invalid_argument("sweep_bn: need at least one instance per point");

  std::vector<RunRecord> records;
  for (int n = n_lo; n <= n_hi; ++n) {
    for (int budget = 1; budget <= n - 1; ++budget) {
      for (int k = 0; k < instances_per_point; ++k) {
        const std::uint64_t inst_seed =
            derive_seed(master_seed, {static_cast<std::uint64_t>(n),
                                      static_cast<std::uint64_t>(budget),
                                      static_cast<std::uint64_t>(k)});
        RandomInstanceConfig cfg = base_cfg;
        cfg.budget = budget;
        RunSpec spec;
        spec.instance = random_instance(n, inst_seed, cfg);
        spec.instance_seed = inst_seed;
        spec.preset = preset;
        spec.depth = 1;
        spec.optimizer = OptimizerKind::Grid;
        spec.backend = "exact";
        spec.budget = 50 * 25;
        spec.run_seed = derive_seed(inst_seed, {0xabcd});
        records.push_back(run_single(spec));
      }
    }
  }
  return records;
}

/// Mean eta per budget B for records at problem size n (fit-trend input).
inline std::vector<std::pair<double, double>> mean_eta_by_budget(
    const std::vector<RunRecord>& records, int n) {
  std::map<int, std::pair<double, int>> acc;  // B -> (sum, count)
  for (const RunRecord& r : records) {
    if (r.spec.instance.n != n) continue;
    auto& [sum, count] = acc[r.spec.instance.budget];
    sum += r.quality.eta;
    ++count;
  }
  std::vector<std::pair<double, double>> points;
  for (const auto& [budget, sc] : acc)
    points.emplace_back(static_cast<double>(budget), sc.first / sc.second);
  return points;
}

struct CellAggregate {
  int instance_index = 0;
  SchemePreset preset = SchemePreset::Soft100;
  std::string backend;
  int depth = 1;
  OptimizerKind optimizer = OptimizerKind::Random;
  int repeats = 0;
  double best_eta = 0.0;
  double mean_eta = 0.0;
  double std_eta = 0.0;
};

struct BenchResult {
  std::vector<RunRecord> records;
  std::vector<CellAggregate> aggregates;
};

/// Deterministic per-cell run seed for the benchmark cross product.
inline std::uint64_t bench_run_seed(std::uint64_t master_seed, std::size_t instance_index,
                                    SchemePreset preset, const std::string& backend,
                                    int depth, OptimizerKind optimizer, int repeat) {
  return derive_seed(master_seed,
                     {static_cast<std::uint64_t>(instance_index),
                      static_cast<std::uint64_t>(preset),
                      backend == "exact" ? 0ULL : 1ULL, static_cast<std::uint64_t>(depth),
                      static_cast<std::uint64_t>(optimizer),
                      static_cast<std::uint64_t>(repeat)});
}

/// Optimizer benchmark matrix: instances x schemes x backends x depths x
/// optimizers x repeats, with per-cell aggregates of the achieved eta.
inline BenchResult optimizer_benchmark(const std::vector<ProblemInstance>& instances,
                                       const std::vector<SchemePreset>& presets,
                                       const std::vector<int>& depths,
                                       const std::vector<OptimizerKind>& optimizers,
                                       int repeats, const std::vector<std::string>& backends,
                                       int budget, int shots, std::uint64_t master_seed) {
  if (repeats < 1) throw std::invalid_argument("optimizer_benchmark: repeats must be >= 1");
  BenchResult result;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    for (SchemePreset preset : presets) {
      for (const std::string& backend : backends) {
        for (int depth : depths) {
          for (OptimizerKind optimizer : optimizers) {
            CellAggregate agg;
            agg.instance_index = static_cast<int>(i);
            agg.preset = preset;
            agg.backend = backend;
            agg.depth = depth;
            agg.optimizer = optimizer;
            agg.repeats = repeats;
            std::vector<double> etas;
            for (int repeat = 0; repeat < repeats; ++repeat) {
              RunSpec spec;
              spec.instance = instances[i];
              spec.preset = preset;
              spec.depth = depth;
              spec.optimizer = optimizer;
              spec.backend = backend;
              spec.shots = shots;
              spec.budget = budget;
              spec.repeat = repeat;
              spec.run_seed =
                  bench_run_seed(master_seed, i, preset, backend, depth, optimizer, repeat);
              result.records.push_back(run_single(spec));
              etas.push_back(result.records.back().quality.eta);
            }
            agg.best_eta = *std::max_element(etas.begin(), etas.end());
            double mean = 0.0;
            for (double e : etas) mean += e;
            mean /= etas.size();
            agg.mean_eta = mean;
            double ss = 0.0;
            for (double e : etas) ss += (e - mean) * (e - mean);
            agg.std_eta = etas.size() > 1 ? std::sqrt(ss / (etas.size() - 1)) : 0.0;
            result.aggregates.push_back(agg);
          }
        }
      }
    }
  }
  return result;
}

struct DepthRow {
  int n = 0;
  std::string scheme;
  int depth = 1;
  double wasserstein = 0.0;
  double eta = 0.0;
  // W(p) at this n dropped below the worst best-ansatz W at n-1, same scheme
  bool below_worst_smaller_n = false;
};

/// Best-ansatz W(p) per (n, scheme, p) across all repeats and optimizers,
/// with crossings against the previous problem size flagged.
inline std::vector<DepthRow> depth_scaling_report(const std::vector<RunRecord>& records) {
  std::map<std::tuple<int, std::string, int>, const RunRecord*> best;
  for (const RunRecord& r : records) {
    const auto key = std::make_tuple(r.spec.instance.n, preset_name(r.spec.preset),
                                     r.spec.depth);
    auto it = best.find(key);
    if (it == best.end() || r.quality.wasserstein < it->second->quality.wasserstein)
      best[key] = &r;
  }

  std::map<std::pair<int, std::string>, double> worst_by_n;  // max best-W over p
  for (const auto& [key, rec] : best) {
    const auto& [n, scheme, depth] = key;
    auto& w = worst_by_n[{n, scheme}];
    w = std::max(w, rec->quality.wasserstein);
  }

  std::vector<DepthRow> rows;
  for (const auto& [key, rec] : best) {
    const auto& [n, scheme, depth] = key;
    DepthRow row;
    row.n = n;
    row.scheme = scheme;
    row.depth = depth;
    row.wasserstein = rec->quality.wasserstein;
    row.eta = rec->quality.eta;
    const auto prev = worst_by_n.find({n - 1, scheme});
    row.below_worst_smaller_n =
        prev != worst_by_n.end() && row.wasserstein < prev->second;
    rows.push_back(row);
  }
  return rows;
}

struct VariabilityStats {
  std::vector<double> etas;     // one per repeat
  std::vector<double> pct_dev;  // 100 (eta_i - mean) / mean
  double mean_eta = 0.0;
  double sample_std = 0.0;
  double analytic_std = 0.0;  // multinomial delta-method prediction
};

/// Fixes the ansatz at the given parameters and re-measures eta with fresh
/// shot seeds, reporting the spread against the delta-method prediction.
/// With the exact backend every repeat is identical (zero spread).
inline VariabilityStats variability_study(const ProblemInstance& inst, SchemePreset preset,
                                          const Params& best_params,
                                          const std::string& backend, int shots,
                                          int repeats, std::uint64_t seed,
                                          double trotter_eps = 0.25) {
  if (repeats < 2) throw std::invalid_argument("variability_study: need >= 2 repeats");
  const std::uint64_t init_seed = init_stream(seed);
  const ConstraintScheme scheme = make_scheme(preset, inst, init_seed);
  const AnsatzConfig config =
      make_ansatz_config(inst, scheme, best_params.depth(), trotter_eps);
  const CostTable table = cost_table(inst, scheme);
  const Statevector state = evolve_ansatz(config, best_params, table);
  const Ranking ranking = rank_solutions(table);
  const std::vector<double> probs = probabilities(state);

  VariabilityStats stats;
  for (int r = 0; r < repeats; ++r) {
    double eta;
    if (backend == "shots") {
      const ShotCounts counts =
          measure_counts(state, static_cast<std::uint64_t>(shots),
                         derive_seed(seed, {0xe7a0, static_cast<std::uint64_t>(r)}));
      eta = ncwd(wasserstein_work(counts, ranking), table.n);
    } else {
      eta = ncwd(wasserstein_work(probs, ranking), table.n);
    }
    stats.etas.push_back(eta);
  }

  const bool all_equal =
      std::all_of(stats.etas.begin(), stats.etas.end(),
                  [&](double e) { return e == stats.etas.front(); });
  double mean = 0.0;
  for (double e : stats.etas) mean += e;
  mean /= stats.etas.size();
  if (all_equal) mean = stats.etas.front();  // spread of identical values is exactly zero
  stats.mean_eta = mean;
  double ss = 0.0;
  for (double e : stats.etas) ss += (e - mean) * (e - mean);
  stats.sample_std = std::sqrt(ss / (stats.etas.size() - 1));
  for (double e : stats.etas)
    stats.pct_dev.push_back(mean != 0.0 ? 100.0 * (e - mean) / mean : 0.0);

  // Var(W-hat) = (sum r^2 p - W^2) / shots for one multinomial sample.
  double w_mean = 0.0, r2_mean = 0.0;
  for (std::size_t l = 0; l < probs.size(); ++l) {
    const double rank = static_cast<double>(ranking.rank_of[l]);
    w_mean += rank * probs[l];
    r2_mean += rank * rank * probs[l];
  }
  const double var_w = std::max(0.0, r2_mean - w_mean * w_mean) / shots;
  const double norm = static_cast<double>((std::uint64_t{1} << table.n) - 1);
  stats.analytic_std = backend == "shots" ? std::sqrt(var_w) / norm : 0.0;
  return stats;
}

}  // namespace qmvo
