// qmvo command line: problem generation, ranking, single optimization runs
// and the benchmark experiments, all emitting JSON / JSON-lines.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qmvo/harness.hpp"
#include "qmvo/json_io.hpp"

namespace {

using namespace qmvo;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  out << text;
}

struct InstanceSource {
  std::string in_path;
  int n = 4;
  std::uint64_t seed = 1;
  std::optional<int> budget;

  void attach(CLI::App* cmd) {
    cmd->add_option("--in", in_path, "instance JSON file");
    cmd->add_option("--n", n, "asset count for generated instances");
    cmd->add_option("--seed", seed, "instance generation seed");
    cmd->add_option_function<int>(
        "--budget-b", [this](const int& v) { budget = v; }, "override budget B");
  }

  ProblemInstance resolve() const {
    if (!in_path.empty()) {
      ProblemInstance inst = instance_from_json(json::parse(read_file(in_path)));
      if (budget) {
        inst.budget = *budget;
        inst.validate();
      }
      return inst;
    }
    RandomInstanceConfig cfg;
    cfg.budget = budget;
    return random_instance(n, seed, cfg);
  }
};

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty())
    std::cout << text << '\n';
  else
    write_text(out_path, text + "\n");
}

int run_cli(int argc, char** argv) {
  CLI::App app{"QAOA benchmark kit for discrete mean-variance portfolio selection"};
  app.require_subcommand(1);

  // ---- instance gen / show
  auto* instance_cmd = app.add_subcommand("instance", "create or inspect problem instances");
  instance_cmd->require_subcommand(1);

  auto* gen = instance_cmd->add_subcommand("gen", "generate an instance");
  int gen_n = 4;
  std::uint64_t gen_seed = 1;
  int gen_budget = 0;
  double gen_lambda = 0.5;
  double sigma_scale = 0.1, mu_scale = 0.1;
  std::string gen_prices, gen_out;
  gen->add_option("--n", gen_n, "asset count");
  gen->add_option("--seed", gen_seed, "generation seed");
  gen->add_option("--budget-b", gen_budget, "budget B (default n/2 for random, required sense for market data)");
  gen->add_option("--lambda", gen_lambda, "risk appetite for market-data instances");
  gen->add_option("--sigma-scale", sigma_scale, "random covariance factor scale");
  gen->add_option("--mu-scale", mu_scale, "random returns scale");
  gen->add_option("--prices", gen_prices, "price CSV (date,<ticker>,... rows); builds mu/sigma from returns");
  gen->add_option("--out", gen_out, "output path (default stdout)");
  gen->callback([&] {
    ProblemInstance inst;
    if (!gen_prices.empty()) {
      PriceSeries series = load_price_csv(read_file(gen_prices));
      if (gen_n > 0 && gen_n < static_cast<int>(series.num_assets())) {
        // keep the first n tickers
        series.tickers.resize(gen_n);
        for (auto& row : series.prices) row.resize(gen_n);
      }
      auto [mu, sigma] = estimate_mu_sigma(series);
      inst.n = static_cast<int>(mu.size());
      inst.budget = gen_budget > 0 ? gen_budget : std::max(1, inst.n / 2);
      inst.lambda = gen_lambda;
      inst.mu = std::move(mu);
      inst.sigma = std::move(sigma);
      inst.validate();
    } else {
      RandomInstanceConfig cfg;
      cfg.sigma_scale = sigma_scale;
      cfg.mu_scale = mu_scale;
      if (gen_budget > 0) cfg.budget = gen_budget;
      inst = random_instance(gen_n, gen_seed, cfg);
    }
    emit(gen_out, to_json(inst).dump(2));
  });

  auto* show = instance_cmd->add_subcommand("show", "print an instance summary");
  std::string show_in;
  show->add_option("--in", show_in, "instance JSON file")->required();
  show->callback([&] {
    const ProblemInstance inst = instance_from_json(json::parse(read_file(show_in)));
    std::printf("n=%d B=%d lambda=%.6f\n", inst.n, inst.budget, inst.lambda);
    std::printf("mu:");
    for (double m : inst.mu) std::printf(" %.6g", m);
    std::printf("\nsigma:\n");
    for (const auto& row : inst.sigma) {
      for (double v : row) std::printf(" %11.4e", v);
      std::printf("\n");
    }
    const double amin = alpha_min(inst);
    std::printf("alpha_min=%.9g\n", amin);
  });

  // ---- rank
  auto* rank_cmd = app.add_subcommand("rank", "print the full ranked solution sequence");
  InstanceSource rank_src;
  rank_src.attach(rank_cmd);
  std::string rank_scheme = "soft-100";
  std::string rank_mode = "two-set";
  rank_cmd->add_option("--scheme", rank_scheme, "soft-min|soft-100|dicke-complete|hamming-ring")
      ->check(CLI::IsMember({"soft-min", "soft-100", "dicke-complete", "hamming-ring"}));
  rank_cmd->add_option("--mode", rank_mode, "two-set|by-violation")
      ->check(CLI::IsMember({"two-set", "by-violation"}));
  rank_cmd->callback([&] {
    const ProblemInstance inst = rank_src.resolve();
    const ConstraintScheme scheme = make_scheme(preset_from_name(rank_scheme), inst, 0);
    const CostTable table = cost_table(inst, scheme);
    const RankingMode mode =
        rank_mode == "two-set" ? RankingMode::TwoSet : RankingMode::ByViolationMagnitude;
    const Ranking ranking = rank_solutions(table, mode);
    std::printf("# scheme=%s mode=%s\n", table.scheme_tag.c_str(), rank_mode.c_str());
    std::printf("%-6s %-12s %-6s %-22s %s\n", "rank", "bits(x0..)", "index", "cost", "viable");
    for (std::uint64_t l : ranking.order())
      std::printf("%-6u %-12s %-6llu %-22.15g %s\n", ranking.rank_of[l],
                  bitstring(l, inst.n).c_str(), static_cast<unsigned long long>(l),
                  table.costs[l], table.viable[l] ? "yes" : "no");
  });

  // ---- optimize
  auto* opt_cmd = app.add_subcommand("optimize", "one budgeted optimization run");
  InstanceSource opt_src;
  opt_src.attach(opt_cmd);
  std::string opt_scheme = "soft-100", opt_optimizer = "nelder-mead", opt_backend = "exact";
  int opt_p = 1, opt_budget = 500, opt_shots = 2048;
  std::uint64_t opt_run_seed = 1;
  std::string opt_out;
  opt_cmd->add_option("--scheme", opt_scheme)
      ->check(CLI::IsMember({"soft-min", "soft-100", "dicke-complete", "hamming-ring"}));
  opt_cmd->add_option("--optimizer", opt_optimizer)
      ->check(CLI::IsMember({"grid", "random", "nelder-mead", "powell", "gd", "adam"}));
  opt_cmd->add_option("--backend", opt_backend)->check(CLI::IsMember({"exact", "shots"}));
  opt_cmd->add_option("--p", opt_p, "circuit depth");
  opt_cmd->add_option("--budget", opt_budget, "circuit evaluation budget");
  opt_cmd->add_option("--shots", opt_shots, "shots per evaluation");
  opt_cmd->add_option("--run-seed", opt_run_seed, "run seed (x0, shot streams)");
  opt_cmd->add_option("--out", opt_out, "output path (default stdout)");
  opt_cmd->callback([&] {
    RunSpec spec;
    spec.instance = opt_src.resolve();
    spec.instance_seed = opt_src.in_path.empty() ? opt_src.seed : 0;
    spec.preset = preset_from_name(opt_scheme);
    spec.depth = opt_p;
    spec.optimizer = optimizer_from_name(opt_optimizer);
    spec.backend = opt_backend;
    spec.shots = opt_shots;
    spec.budget = opt_budget;
    spec.run_seed = opt_run_seed;
    const SingleRun run = run_single_full(spec);
    json out = to_json(run.record);
    out["opt_result"] = to_json(run.opt);  // full trajectory
    emit(opt_out, out.dump(2));
  });

  // ---- sweep-bn
  auto* sweep_cmd = app.add_subcommand("sweep-bn", "B/n sweep with p=1 grid search");
  int sweep_nmin = 2, sweep_nmax = 5, sweep_instances = 50;
  std::uint64_t sweep_seed = 20210401;
  std::string sweep_scheme = "soft-100", sweep_out, sweep_csv;
  sweep_cmd->add_option("--n-min", sweep_nmin);
  sweep_cmd->add_option("--n-max", sweep_nmax);
  sweep_cmd->add_option("--instances", sweep_instances, "instances per (n, B) point");
  sweep_cmd->add_option("--seed", sweep_seed);
  sweep_cmd->add_option("--scheme", sweep_scheme)
      ->check(CLI::IsMember({"soft-min", "soft-100", "dicke-complete", "hamming-ring"}));
  sweep_cmd->add_option("--out", sweep_out, "JSON-lines output path");
  sweep_cmd->add_option("--csv", sweep_csv, "flat CSV output path");
  sweep_cmd->callback([&] {
    const auto records =
        sweep_bn(sweep_nmin, sweep_nmax, sweep_instances, sweep_seed,
                 preset_from_name(sweep_scheme));
    if (!sweep_out.empty()) append_records_jsonl(sweep_out, records);
    if (!sweep_csv.empty()) write_text(sweep_csv, records_to_csv(records));
    for (int n = sweep_nmin; n <= sweep_nmax; ++n)
      for (const auto& [b, eta] : mean_eta_by_budget(records, n))
        std::printf("n=%d B=%g mean_eta=%.6f\n", n, b, eta);
  });

  // ---- bench
  auto* bench_cmd = app.add_subcommand("bench", "optimizer benchmark matrix");
  int bench_n = 3, bench_instances = 1, bench_repeats = 10, bench_budget = 500,
      bench_shots = 2048;
  std::uint64_t bench_seed = 1;
  std::vector<std::string> bench_schemes = {"soft-min"};
  std::vector<std::string> bench_optimizers = {"random", "nelder-mead", "powell", "gd", "adam"};
  std::vector<std::string> bench_backends = {"exact"};
  std::vector<int> bench_ps = {1};
  std::string bench_out, bench_csv, bench_instance_file;
  bench_cmd->add_option("--n", bench_n, "problem size for generated instances");
  bench_cmd->add_option("--instances", bench_instances, "number of generated instances");
  bench_cmd->add_option("--in", bench_instance_file, "instance JSON (instead of generating)");
  bench_cmd->add_option("--schemes", bench_schemes, "constraint schemes")->delimiter(',');
  bench_cmd->add_option("--optimizers", bench_optimizers, "optimizer list")->delimiter(',');
  bench_cmd->add_option("--backends", bench_backends, "backend list")->delimiter(',');
  bench_cmd->add_option("--p", bench_ps, "depth list")->delimiter(',');
  bench_cmd->add_option("--repeats", bench_repeats);
  bench_cmd->add_option("--budget", bench_budget);
  bench_cmd->add_option("--shots", bench_shots);
  bench_cmd->add_option("--seed", bench_seed);
  bench_cmd->add_option("--out", bench_out, "JSON-lines output path");
  bench_cmd->add_option("--csv", bench_csv, "flat CSV output path");
  bench_cmd->callback([&] {
    std::vector<ProblemInstance> instances;
    if (!bench_instance_file.empty()) {
      instances.push_back(instance_from_json(json::parse(read_file(bench_instance_file))));
    } else {
      for (int k = 0; k < bench_instances; ++k)
        instances.push_back(
            random_instance(bench_n, derive_seed(bench_seed, {0x1257, static_cast<std::uint64_t>(k)})));
    }
    std::vector<SchemePreset> presets;
    for (const auto& s : bench_schemes) presets.push_back(preset_from_name(s));
    std::vector<OptimizerKind> optimizers;
    for (const auto& o : bench_optimizers) optimizers.push_back(optimizer_from_name(o));

    const BenchResult result =
        optimizer_benchmark(instances, presets, bench_ps, optimizers, bench_repeats,
                            bench_backends, bench_budget, bench_shots, bench_seed);
    if (!bench_out.empty()) {
      append_records_jsonl(bench_out, result.records);
      std::ofstream out(bench_out, std::ios::app);
      for (const CellAggregate& a : result.aggregates) out << to_json(a).dump() << '\n';
    }
    if (!bench_csv.empty()) write_text(bench_csv, records_to_csv(result.records));
    std::printf("%-10s %-8s %-3s %-12s %-9s %-9s %-9s\n", "scheme", "backend", "p",
                "optimizer", "best", "mean", "std");
    for (const CellAggregate& a : result.aggregates)
      std::printf("%-10s %-8s %-3d %-12s %-9.5f %-9.5f %-9.5f\n",
                  preset_name(a.preset).c_str(), a.backend.c_str(), a.depth,
                  optimizer_name(a.optimizer).c_str(), a.best_eta, a.mean_eta, a.std_eta);
  });

  // ---- depth-report
  auto* depth_cmd = app.add_subcommand("depth-report", "best-ansatz W(p) table from records");
  std::string depth_in, depth_csv;
  depth_cmd->add_option("--in", depth_in, "JSON-lines records")->required();
  depth_cmd->add_option("--csv", depth_csv, "CSV output path");
  depth_cmd->callback([&] {
    const auto rows = depth_scaling_report(read_records_jsonl(depth_in));
    std::printf("%-4s %-16s %-3s %-12s %-9s %s\n", "n", "scheme", "p", "W", "eta",
                "below-worst(n-1)");
    std::ostringstream csv;
    csv << "n,scheme,p,W,eta,below_worst_smaller_n\n";
    for (const DepthRow& row : rows) {
      std::printf("%-4d %-16s %-3d %-12.6f %-9.5f %s\n", row.n, row.scheme.c_str(), row.depth,
                  row.wasserstein, row.eta, row.below_worst_smaller_n ? "yes" : "no");
      csv << row.n << ',' << row.scheme << ',' << row.depth << ',' << row.wasserstein << ','
          << row.eta << ',' << (row.below_worst_smaller_n ? 1 : 0) << '\n';
    }
    if (!depth_csv.empty()) write_text(depth_csv, csv.str());
  });

  // ---- fit-trend
  auto* fit_cmd = app.add_subcommand("fit-trend", "fit mean eta(B) to the binomial curve");
  std::string fit_in;
  int fit_n = 4;
  bool fit_per_instance = false;
  fit_cmd->add_option("--in", fit_in, "JSON-lines records from sweep-bn")->required();
  fit_cmd->add_option("--n", fit_n, "problem size to fit");
  fit_cmd->add_flag("--per-instance", fit_per_instance,
                    "fit every record instead of the per-B means");
  fit_cmd->callback([&] {
    const auto records = read_records_jsonl(fit_in);
    std::vector<std::pair<double, double>> points;
    if (fit_per_instance) {
      for (const RunRecord& r : records)
        if (r.spec.instance.n == fit_n)
          points.emplace_back(static_cast<double>(r.spec.instance.budget), r.quality.eta);
    } else {
      points = mean_eta_by_budget(records, fit_n);
    }
    const TrendFit fit = fit_binomial_trend(points, fit_n);
    std::cout << to_json(fit).dump(2) << '\n';
  });

  // ---- variability
  auto* var_cmd = app.add_subcommand("variability", "shot-noise spread of eta at fixed params");
  InstanceSource var_src;
  var_src.attach(var_cmd);
  std::string var_scheme = "soft-min";
  int var_p = 1, var_shots = 2048, var_repeats = 50;
  std::uint64_t var_seed = 1;
  var_cmd->add_option("--scheme", var_scheme)
      ->check(CLI::IsMember({"soft-min", "soft-100", "dicke-complete", "hamming-ring"}));
  var_cmd->add_option("--p", var_p);
  var_cmd->add_option("--shots", var_shots);
  var_cmd->add_option("--repeats", var_repeats);
  var_cmd->add_option("--run-seed", var_seed, "seed for optimization and shot streams");
  var_cmd->callback([&] {
    const ProblemInstance inst = var_src.resolve();
    // best params from an exact-backend optimization (best of 5 simplex runs)
    RunSpec spec;
    spec.instance = inst;
    spec.preset = preset_from_name(var_scheme);
    spec.depth = var_p;
    spec.backend = "exact";
    spec.budget = 500;
    Params best;
    double best_value = 1e300;
    for (int repeat = 0; repeat < 5; ++repeat) {
      spec.optimizer = OptimizerKind::NelderMead;
      spec.repeat = repeat;
      spec.run_seed = derive_seed(var_seed, {0xbe57, static_cast<std::uint64_t>(repeat)});
      const RunRecord record = run_single(spec);
      if (record.best_value < best_value) {
        best_value = record.best_value;
        best = record.best_params;
      }
    }
    const VariabilityStats stats = variability_study(
        inst, preset_from_name(var_scheme), best, "shots", var_shots, var_repeats, var_seed);
    json out{{"mean_eta", stats.mean_eta},
             {"sample_std", stats.sample_std},
             {"analytic_std", stats.analytic_std},
             {"pct_dev", stats.pct_dev}};
    std::cout << out.dump(2) << '\n';
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
