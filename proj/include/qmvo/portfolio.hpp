#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qmvo/bits.hpp"
#include "qmvo/linalg.hpp"
#include "qmvo/rng.hpp"

namespace qmvo {

/// Historical close prices: one row per trading date, one column per ticker.
struct PriceSeries {
  std::vector<std::string> tickers;
  std::vector<std::string> dates;  // ISO-8601 so lexicographic order is chronological
  std::vector<std::vector<double>> prices;

  std::size_t num_assets() const { return tickers.size(); }
  std::size_t num_rows() const { return dates.size(); }
};

/// One buy/hold mean-variance problem: pick B of n assets, risk appetite
/// lambda, per-period expected returns mu and return covariance sigma.
struct ProblemInstance {
  int n = 0;
  int budget = 0;  // B
  double lambda = 0.0;
  std::vector<double> mu;
  std::vector<std::vector<double>> sigma;

  void validate() const {
    if (n < 2) throw std::invalid_argument("instance: n must be >= 2");
    if (budget < 1 || budget > n - 1)
      throw std::invalid_argument("instance: budget must satisfy 1 <= B <= n-1");
    if (!(lambda >= 0.0 && lambda <= 1.0))
      throw std::invalid_argument("instance: lambda must be in [0, 1]");
    if (static_cast<int>(mu.size()) != n)
      throw std::invalid_argument("instance: mu length != n");
    for (double m : mu)
      if (!std::isfinite(m)) throw std::invalid_argument("instance: mu not finite");
    if (static_cast<int>(sigma.size()) != n)
      throw std::invalid_argument("instance: sigma must be n x n");
    for (const auto& row : sigma) {
      if (static_cast<int>(row.size()) != n)
        throw std::invalid_argument("instance: sigma must be n x n");
      for (double v : row)
        if (!std::isfinite(v)) throw std::invalid_argument("instance: sigma not finite");
    }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (std::abs(sigma[i][j] - sigma[j][i]) > 1e-12)
          throw std::invalid_argument("instance: sigma not symmetric within 1e-12");
    if (min_symmetric_eigenvalue(sigma) < -1e-10)
      throw std::invalid_argument("instance: sigma not positive semidefinite");
  }
};

namespace detail {

inline double parse_price(std::string_view field, std::size_t line_no) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last)
    throw std::runtime_error("price csv line " + std::to_string(line_no) +
                             ": non-numeric price '" + std::string(field) + "'");
  return value;
}

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

}  // namespace detail

/// Parses `date,<ticker1>,<ticker2>,...` CSV content into a PriceSeries.
/// Errors name the offending 1-based line number.
inline PriceSeries load_price_csv(const std::string& content) {
  PriceSeries series;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos <= content.size()) {
    std::size_t eol = content.find('\n', pos);
    std::string_view line;
    if (eol == std::string::npos) {
      line = std::string_view(content).substr(pos);
      pos = content.size() + 1;
    } else {
      line = std::string_view(content).substr(pos, eol - pos);
      pos = eol + 1;
    }
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    ++line_no;

    auto fields = detail::split_csv_line(line);
    if (line_no == 1) {
      if (fields.size() < 2 || fields[0] != "date")
        throw std::runtime_error("price csv line 1: header must be date,<ticker>,...");
      for (std::size_t i = 1; i < fields.size(); ++i) {
        if (fields[i].empty())
          throw std::runtime_error("price csv line 1: empty ticker name");
        series.tickers.emplace_back(fields[i]);
      }
      continue;
    }
    if (fields.size() != series.tickers.size() + 1)
      throw std::runtime_error("price csv line " + std::to_string(line_no) +
                               ": expected " + std::to_string(series.tickers.size() + 1) +
                               " fields, got " + std::to_string(fields.size()));
    std::string date(fields[0]);
    if (date.empty())
      throw std::runtime_error("price csv line " + std::to_string(line_no) + ": empty date");
    if (!series.dates.empty() && date <= series.dates.back())
      throw std::runtime_error("price csv line " + std::to_string(line_no) +
                               ": non-monotone dates ('" + date + "' after '" +
                               series.dates.back() + "')");
    std::vector<double> row;
    row.reserve(series.tickers.size());
    for (std::size_t i = 1; i < fields.size(); ++i) {
      double p = detail::parse_price(fields[i], line_no);
      if (!(p > 0.0))
        throw std::runtime_error("price csv line " + std::to_string(line_no) +
                                 ": non-positive price");
      row.push_back(p);
    }
    series.dates.push_back(std::move(date));
    series.prices.push_back(std::move(row));
  }
  if (series.tickers.empty())
    throw std::runtime_error("price csv: missing header row");
  if (series.num_rows() < 2)
    throw std::runtime_error("price csv: need at least 2 price rows, got " +
                             std::to_string(series.num_rows()));
  return series;
}

/// Per-asset simple returns r_t = p_t / p_{t-1} - 1, their arithmetic mean,
/// and the unbiased sample covariance of the return samples.
inline std::pair<std::vector<double>, std::vector<std::vector<double>>>
estimate_mu_sigma(const PriceSeries& series) {
  const std::size_t rows = series.num_rows();
  const std::size_t n = series.num_assets();
  if (rows < 3)
    throw std::invalid_argument("estimate_mu_sigma: need >= 3 price rows "
                                "(covariance needs >= 2 return samples)");
  const std::size_t t = rows - 1;  // return samples
  std::vector<std::vector<double>> returns(t, std::vector<double>(n));
  for (std::size_t r = 0; r < t; ++r)
    for (std::size_t j = 0; j < n; ++j)
      returns[r][j] = series.prices[r + 1][j] / series.prices[r][j] - 1.0;

  std::vector<double> mu(n, 0.0);
  for (std::size_t r = 0; r < t; ++r)
    for (std::size_t j = 0; j < n; ++j) mu[j] += returns[r][j];
  for (std::size_t j = 0; j < n; ++j) mu[j] /= static_cast<double>(t);

  std::vector<std::vector<double>> sigma(n, std::vector<double>(n, 0.0));
  for (std::size_t r = 0; r < t; ++r)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j)
        sigma[i][j] += (returns[r][i] - mu[i]) * (returns[r][j] - mu[j]);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      sigma[i][j] /= static_cast<double>(t - 1);
      sigma[j][i] = sigma[i][j];
    }
  return {std::move(mu), std::move(sigma)};
}

struct RandomInstanceConfig {
  std::optional<int> budget;  // defaults to max(1, n/2)
  double sigma_scale = 0.1;
  double mu_scale = 0.1;
};

/// Deterministic random problem instance: sigma = A A^T / n with A entries
/// i.i.d. uniform in [-sigma_scale, sigma_scale] (PSD by construction),
/// mu i.i.d. uniform in [-mu_scale, mu_scale], lambda uniform in [0, 1].
/// Exact value collisions among mu entries or independent sigma entries are
/// resampled so the objective is strictly non-degenerate.
inline ProblemInstance random_instance(int n, std::uint64_t seed,
                                       const RandomInstanceConfig& cfg = {}) {
  if (n < 2) throw std::invalid_argument("random_instance: n must be >= 2");
  Rng rng(seed);

  auto draw_sigma = [&] {
    std::vector<std::vector<double>> a(n, std::vector<double>(n));
    for (auto& row : a)
      for (double& v : row) v = rng.uniform(-cfg.sigma_scale, cfg.sigma_scale);
    std::vector<std::vector<double>> s(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k) acc += a[i][k] * a[j][k];
        s[i][j] = acc / n;
      }
    return s;
  };
  auto sigma_degenerate = [&](const std::vector<std::vector<double>>& s) {
    std::vector<double> vals;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) vals.push_back(s[i][j]);
    std::sort(vals.begin(), vals.end());
    return std::adjacent_find(vals.begin(), vals.end()) != vals.end();
  };

  ProblemInstance inst;
  inst.n = n;
  inst.budget = cfg.budget.value_or(std::max(1, n / 2));
  inst.sigma = draw_sigma();
  while (sigma_degenerate(inst.sigma)) inst.sigma = draw_sigma();

  inst.mu.resize(n);
  for (double& m : inst.mu) m = rng.uniform(-cfg.mu_scale, cfg.mu_scale);
  for (bool collision = true; collision;) {
    collision = false;
    for (int i = 0; i < n && !collision; ++i)
      for (int j = i + 1; j < n; ++j)
        if (inst.mu[i] == inst.mu[j]) {
          inst.mu[j] = rng.uniform(-cfg.mu_scale, cfg.mu_scale);
          collision = true;
          break;
        }
  }

  inst.lambda = rng.uniform();
  inst.validate();
  return inst;
}

/// Raw Markowitz objective (1-lambda) x^T Sigma x - lambda mu.x for a
/// binary selection vector. No constraint penalty is included.
inline double markowitz_cost(const ProblemInstance& inst, const std::vector<int>& x) {
  if (static_cast<int>(x.size()) != inst.n)
    throw std::invalid_argument("markowitz_cost: selection length != n");
  double risk = 0.0, ret = 0.0;
  for (int i = 0; i < inst.n; ++i) {
    if (!x[i]) continue;
    ret += inst.mu[i];
    for (int j = 0; j < inst.n; ++j)
      if (x[j]) risk += inst.sigma[i][j];
  }
  return (1.0 - inst.lambda) * risk - inst.lambda * ret;
}

inline double markowitz_cost(const ProblemInstance& inst, std::uint64_t basis_index) {
  double risk = 0.0, ret = 0.0;
  for (int i = 0; i < inst.n; ++i) {
    if (!bit_of(basis_index, i)) continue;
    ret += inst.mu[i];
    for (int j = 0; j < inst.n; ++j)
      if (bit_of(basis_index, j)) risk += inst.sigma[i][j];
  }
  return (1.0 - inst.lambda) * risk - inst.lambda * ret;
}

}  // namespace qmvo
