#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmvo/harness.hpp"

namespace qmvo {

using nlohmann::json;

inline json to_json(const ProblemInstance& inst) {
  return json{{"n", inst.n},
              {"B", inst.budget},
              {"lambda", inst.lambda},
              {"mu", inst.mu},
              {"sigma", inst.sigma}};
}

inline ProblemInstance instance_from_json(const json& j) {
  ProblemInstance inst;
  inst.n = j.at("n").get<int>();
  inst.budget = j.at("B").get<int>();
  inst.lambda = j.at("lambda").get<double>();
  inst.mu = j.at("mu").get<std::vector<double>>();
  inst.sigma = j.at("sigma").get<std::vector<std::vector<double>>>();
  inst.validate();
  return inst;
}

inline json to_json(const CostTable& table) {
  std::vector<bool> viable(table.viable.begin(), table.viable.end());
  return json{{"n", table.n},
              {"B", table.budget},
              {"costs", table.costs},
              {"viable", viable},
              {"scheme_tag", table.scheme_tag}};
}

inline CostTable cost_table_from_json(const json& j) {
  CostTable table;
  table.n = j.at("n").get<int>();
  table.budget = j.at("B").get<int>();
  table.costs = j.at("costs").get<std::vector<double>>();
  const auto viable = j.at("viable").get<std::vector<bool>>();
  table.viable.assign(viable.begin(), viable.end());
  table.scheme_tag = j.value("scheme_tag", "");
  return table;
}

inline json to_json(const QualityReport& q) {
  json j{{"W", q.wasserstein},
         {"eta", q.eta},
         {"r_bounded", q.r_bounded},
         {"M_p", q.m_p}};
  j["r"] = q.r ? json(*q.r) : json(nullptr);
  return j;
}

inline QualityReport quality_from_json(const json& j) {
  QualityReport q;
  q.wasserstein = j.at("W").get<double>();
  q.eta = j.at("eta").get<double>();
  q.r_bounded = j.at("r_bounded").get<double>();
  q.m_p = j.at("M_p").get<double>();
  if (!j.at("r").is_null()) q.r = j.at("r").get<double>();
  return q;
}

inline json to_json(const Params& p) {
  return json{{"gamma", p.gamma}, {"beta", p.beta}};
}

inline Params params_from_json(const json& j) {
  Params p;
  p.gamma = j.at("gamma").get<std::vector<double>>();
  p.beta = j.at("beta").get<std::vector<double>>();
  p.validate();
  return p;
}

inline json to_json(const OptResult& r) {
  json trajectory = json::array();
  for (const Evaluation& e : r.trajectory)
    trajectory.push_back(json{{"params", e.params}, {"value", e.value}});
  return json{{"best_point", r.best_point},
              {"best_value", r.best_value},
              {"evals_used", r.evals_used},
              {"terminated", terminated_name(r.terminated)},
              {"trajectory", std::move(trajectory)}};
}

inline json to_json(const RunRecord& r) {
  return json{{"instance", to_json(r.spec.instance)},
              {"instance_seed", r.spec.instance_seed},
              {"scheme", preset_name(r.spec.preset)},
              {"alpha", r.alpha},
              {"p", r.spec.depth},
              {"optimizer", optimizer_name(r.spec.optimizer)},
              {"backend", r.spec.backend},
              {"shots", r.spec.shots},
              {"budget", r.spec.budget},
              {"repeat", r.spec.repeat},
              {"run_seed", r.spec.run_seed},
              {"init_seed", r.init_seed},
              {"trotter_eps", r.spec.trotter_eps},
              {"best_params", to_json(r.best_params)},
              {"best_value", r.best_value},
              {"evals_used", r.evals_used},
              {"terminated", r.terminated},
              {"quality", to_json(r.quality)},
              {"wall_time_s", r.wall_time_s}};
}

inline RunRecord record_from_json(const json& j) {
  RunRecord r;
  r.spec.instance = instance_from_json(j.at("instance"));
  r.spec.instance_seed = j.at("instance_seed").get<std::uint64_t>();
  r.spec.preset = preset_from_name(j.at("scheme").get<std::string>());
  r.alpha = j.at("alpha").get<double>();
  r.spec.depth = j.at("p").get<int>();
  r.spec.optimizer = optimizer_from_name(j.at("optimizer").get<std::string>());
  r.spec.backend = j.at("backend").get<std::string>();
  r.spec.shots = j.at("shots").get<int>();
  r.spec.budget = j.at("budget").get<int>();
  r.spec.repeat = j.at("repeat").get<int>();
  r.spec.run_seed = j.at("run_seed").get<std::uint64_t>();
  r.init_seed = j.at("init_seed").get<std::uint64_t>();
  r.spec.trotter_eps = j.at("trotter_eps").get<double>();
  r.best_params = params_from_json(j.at("best_params"));
  r.best_value = j.at("best_value").get<double>();
  r.evals_used = j.at("evals_used").get<int>();
  r.terminated = j.at("terminated").get<std::string>();
  r.quality = quality_from_json(j.at("quality"));
  r.wall_time_s = j.at("wall_time_s").get<double>();
  return r;
}

// Debugging dump only; the layout is not a stability contract.
inline json to_json(const Statevector& st) {
  json amps = json::array();
  for (const Amplitude& a : st.amps) amps.push_back(json::array({a.real(), a.imag()}));
  return json{{"n", st.n}, {"amps", std::move(amps)}};
}

inline json to_json(const TrendFit& fit) {
  return json{{"n", fit.n}, {"a", fit.a}, {"c", fit.c}, {"residual_rms", fit.residual_rms}};
}

inline json to_json(const CellAggregate& a) {
  return json{{"kind", "aggregate"},
              {"instance_index", a.instance_index},
              {"scheme", preset_name(a.preset)},
              {"backend", a.backend},
              {"p", a.depth},
              {"optimizer", optimizer_name(a.optimizer)},
              {"repeats", a.repeats},
              {"best_eta", a.best_eta},
              {"mean_eta", a.mean_eta},
              {"std_eta", a.std_eta}};
}

// JSON-lines persistence: one record per line, append-only.

inline void append_records_jsonl(const std::string& path,
                                 const std::vector<RunRecord>& records) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot open for append: " + path);
  for (const RunRecord& r : records) out << to_json(r).dump() << '\n';
}

inline std::vector<RunRecord> read_records_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::vector<RunRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded())
      throw std::runtime_error(path + " line " + std::to_string(line_no) + ": bad JSON");
    if (j.contains("kind") && j["kind"] == "aggregate") continue;
    records.push_back(record_from_json(j));
  }
  return records;
}

/// Flat CSV export of the run records (one row per record).
inline std::string records_to_csv(const std::vector<RunRecord>& records) {
  std::ostringstream out;
  out << "n,B,lambda,scheme,alpha,p,optimizer,backend,shots,repeat,run_seed,"
         "best_value,evals_used,terminated,W,eta,r,r_bounded,M_p,wall_time_s\n";
  out.precision(17);
  for (const RunRecord& r : records) {
    out << r.spec.instance.n << ',' << r.spec.instance.budget << ','
        << r.spec.instance.lambda << ',' << preset_name(r.spec.preset) << ',' << r.alpha
        << ',' << r.spec.depth << ',' << optimizer_name(r.spec.optimizer) << ','
        << r.spec.backend << ',' << r.spec.shots << ',' << r.spec.repeat << ','
        << r.spec.run_seed << ',' << r.best_value << ',' << r.evals_used << ','
        << r.terminated << ',' << r.quality.wasserstein << ',' << r.quality.eta << ',';
    if (r.quality.r)
      out << *r.quality.r;
    out << ',' << r.quality.r_bounded << ',' << r.quality.m_p << ',' << r.wall_time_s
        << '\n';
  }
  return out.str();
}

}  // namespace qmvo
