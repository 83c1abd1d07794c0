#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qmvo/bits.hpp"
#include "qmvo/encoding.hpp"
#include "qmvo/simulator.hpp"

namespace qmvo {

enum class RankingMode { TwoSet, ByViolationMagnitude };

/// Solution ranking: rank_of[l] is the position of basis state l in the
/// concatenated ascending sequence (viable solutions first, then the rest).
/// Rank 0 is always the best viable solution.
struct Ranking {
  int n = 0;
  RankingMode mode = RankingMode::TwoSet;
  std::vector<std::uint32_t> rank_of;

  /// Inverse permutation: order()[rank] = basis index.
  std::vector<std::uint64_t> order() const {
    std::vector<std::uint64_t> inv(rank_of.size());
    for (std::uint64_t l = 0; l < rank_of.size(); ++l) inv[rank_of[l]] = l;
    return inv;
  }
};

/// Ranks all 2^n solutions. TwoSet: viable states ascending by cost occupy
/// the leading ranks, then non-viable ascending. ByViolationMagnitude:
/// groups ordered by |weight - B| = 0, 1, 2, ..., ascending cost inside each
/// group. Cost ties break by ascending basis index.
inline Ranking rank_solutions(const CostTable& table,
                              RankingMode mode = RankingMode::TwoSet) {
  const std::uint64_t dim = table.dim();
  std::vector<std::uint64_t> idx(dim);
  std::iota(idx.begin(), idx.end(), 0);

  auto group_of = [&](std::uint64_t l) -> int {
    if (mode == RankingMode::TwoSet) return table.viable[l] ? 0 : 1;
    return std::abs(popcount(l) - table.budget);
  };
  std::sort(idx.begin(), idx.end(), [&](std::uint64_t a, std::uint64_t b) {
    const int ga = group_of(a), gb = group_of(b);
    if (ga != gb) return ga < gb;
    if (table.costs[a] != table.costs[b]) return table.costs[a] < table.costs[b];
    return a < b;
  });

  Ranking ranking;
  ranking.n = table.n;
  ranking.mode = mode;
  ranking.rank_of.resize(dim);
  for (std::uint64_t r = 0; r < dim; ++r)
    ranking.rank_of[idx[r]] = static_cast<std::uint32_t>(r);
  return ranking;
}

/// Wasserstein work: expected rank under the measured distribution, i.e.
/// the transport cost of moving all probability to the optimum at rank 0.
inline double wasserstein_work(const std::vector<double>& probs, const Ranking& ranking) {
  if (probs.size() != ranking.rank_of.size())
    throw std::invalid_argument("wasserstein_work: distribution size mismatch");
  double total = 0.0, work = 0.0;
  for (std::size_t l = 0; l < probs.size(); ++l) {
    total += probs[l];
    work += static_cast<double>(ranking.rank_of[l]) * probs[l];
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("wasserstein_work: distribution not normalized");
  return work;
}

inline double wasserstein_work(const ShotCounts& counts, const Ranking& ranking) {
  double work = 0.0;
  std::uint64_t total = 0;
  for (const auto& [l, c] : counts.counts) {
    if (l >= ranking.rank_of.size())
      throw std::invalid_argument("wasserstein_work: count index out of range");
    work += static_cast<double>(ranking.rank_of[l]) * static_cast<double>(c);
    total += c;
  }
  if (total != counts.shots)
    throw std::invalid_argument("wasserstein_work: counts do not sum to shots");
  return work / static_cast<double>(counts.shots);
}

/// Normalized and complementary Wasserstein distance:
/// eta = 1 - W / (2^n - 1); 1 = ideal, 0.5 = random, 0 = worst.
inline double ncwd(double work, int n) {
  const double worst = static_cast<double>((std::uint64_t{1} << n) - 1);
  if (!(work >= 0.0) || work > worst)
    throw std::invalid_argument("ncwd: W outside [0, 2^n - 1]");
  return 1.0 - work / worst;
}

struct ApproxRatios {
  std::optional<double> r;  // unset when the optimal cost is exactly zero
  double r_bounded = 0.0;
};

/// r = M_p / C(x*) and the 0-1 bounded variant
/// r^b = (M_p - C(x_max)) / (C(x*) - C(x_max)), with x* the best viable
/// solution and x_max the cost maximizer over all 2^n states.
inline ApproxRatios approximation_ratios(double m_p, const CostTable& table) {
  if (table.dim() == 0) throw std::invalid_argument("approximation_ratios: empty table");
  double best_viable = std::numeric_limits<double>::infinity();
  double worst = -std::numeric_limits<double>::infinity();
  bool any_viable = false;
  for (std::uint64_t l = 0; l < table.dim(); ++l) {
    if (table.viable[l]) {
      any_viable = true;
      best_viable = std::min(best_viable, table.costs[l]);
    }
    worst = std::max(worst, table.costs[l]);
  }
  if (!any_viable) throw std::invalid_argument("approximation_ratios: viable set empty");
  if (best_viable == worst)
    throw std::invalid_argument("approximation_ratios: degenerate cost table");

  ApproxRatios out;
  if (best_viable != 0.0) out.r = m_p / best_viable;
  out.r_bounded = (m_p - worst) / (best_viable - worst);
  return out;
}

/// All solution-quality numbers for one measured distribution.
struct QualityReport {
  double wasserstein = 0.0;  // W, in rank units
  double eta = 0.0;
  std::optional<double> r;
  double r_bounded = 0.0;
  double m_p = 0.0;
};

inline QualityReport make_quality_report(const std::vector<double>& probs,
                                         const CostTable& table,
                                         RankingMode mode = RankingMode::TwoSet) {
  const Ranking ranking = rank_solutions(table, mode);
  QualityReport report;
  report.wasserstein = wasserstein_work(probs, ranking);
  report.eta = ncwd(report.wasserstein, table.n);
  double m_p = 0.0;
  for (std::size_t l = 0; l < probs.size(); ++l) m_p += probs[l] * table.costs[l];
  report.m_p = m_p;
  const ApproxRatios ratios = approximation_ratios(m_p, table);
  report.r = ratios.r;
  report.r_bounded = ratios.r_bounded;
  return report;
}

inline QualityReport make_quality_report(const ShotCounts& counts, const CostTable& table,
                                         RankingMode mode = RankingMode::TwoSet) {
  std::vector<double> probs(table.dim(), 0.0);
  for (const auto& [l, c] : counts.counts) {
    if (l >= table.dim())
      throw std::invalid_argument("make_quality_report: count index out of range");
    probs[l] = static_cast<double>(c) / static_cast<double>(counts.shots);
  }
  return make_quality_report(probs, table, mode);
}

}  // namespace qmvo
