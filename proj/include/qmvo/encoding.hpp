#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "qmvo/bits.hpp"
#include "qmvo/portfolio.hpp"

namespace qmvo {

// Constraint enforcement schemes. Soft adds the quadratic budget penalty
// alpha (sum x_i - B)^2 to the cost; the hard schemes keep the raw cost and
// enforce the budget through the initial state and a weight-conserving mixer.
struct SoftPenalty {
  double alpha = 0.0;
};
struct HardDickeComplete {};
struct HardHammingRing {
  std::uint64_t init_seed = 0;
};
using ConstraintScheme = std::variant<SoftPenalty, HardDickeComplete, HardHammingRing>;

inline bool is_soft(const ConstraintScheme& scheme) {
  return std::holds_alternative<SoftPenalty>(scheme);
}

inline std::string scheme_tag(const ConstraintScheme& scheme) {
  if (const auto* soft = std::get_if<SoftPenalty>(&scheme)) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "soft(alpha=%.17g)", soft->alpha);
    return buf;
  }
  if (std::holds_alternative<HardDickeComplete>(scheme)) return "dicke-complete";
  return "hamming-ring";
}

/// QUBO in the double-sum form over j <= i: lower-triangular matrix q with
/// the diagonal holding the linear terms (x_i^2 = x_i), plus a constant
/// offset folded out of the quadratic form.
struct Qubo {
  int n = 0;
  std::vector<std::vector<double>> q;  // q[i] has i+1 entries, j <= i
  double offset = 0.0;

  double cost(std::uint64_t basis_index) const {
    double acc = offset;
    for (int i = 0; i < n; ++i) {
      if (!bit_of(basis_index, i)) continue;
      for (int j = 0; j <= i; ++j)
        if (bit_of(basis_index, j)) acc += q[i][j];
    }
    return acc;
  }
};

/// Ising form over spins s_i in {-1,+1} with x_i = (s_i + 1)/2:
/// cost(s) = sum_{i<j} J_ij s_i s_j + sum_i h_i s_i + c.
struct Ising {
  int n = 0;
  std::vector<std::vector<double>> j;  // j[i] has n-i-1 entries: J_{i,k} at j[i][k-i-1]
  std::vector<double> h;
  double c = 0.0;

  double coupling(int a, int b) const { return j[a][b - a - 1]; }

  double cost(std::uint64_t basis_index) const {
    double acc = c;
    std::vector<int> s(n);
    for (int i = 0; i < n; ++i) s[i] = bit_of(basis_index, i) ? 1 : -1;
    for (int a = 0; a < n; ++a) {
      acc += h[a] * s[a];
      for (int b = a + 1; b < n; ++b) acc += coupling(a, b) * s[a] * s[b];
    }
    return acc;
  }
};

/// Exhaustive cost table over all 2^n bit vectors under one scheme, plus the
/// viability flags (Hamming weight == B). This is the brute-force oracle the
/// ranking metrics are built from.
struct CostTable {
  int n = 0;
  int budget = 0;
  std::vector<double> costs;         // indexed by basis index
  std::vector<std::uint8_t> viable;  // viable[l] <=> popcount(l) == B
  std::string scheme_tag;

  std::size_t dim() const { return costs.size(); }
};

/// QUBO of the scheme cost: base Markowitz terms, plus the expanded budget
/// penalty when the scheme is soft.
inline Qubo build_qubo(const ProblemInstance& inst, const ConstraintScheme& scheme) {
  inst.validate();
  Qubo qubo;
  qubo.n = inst.n;
  qubo.q.resize(inst.n);
  for (int i = 0; i < inst.n; ++i) qubo.q[i].assign(i + 1, 0.0);

  const double one_minus_lambda = 1.0 - inst.lambda;
  for (int i = 0; i < inst.n; ++i) {
    qubo.q[i][i] = one_minus_lambda * inst.sigma[i][i] - inst.lambda * inst.mu[i];
    // sigma is symmetric, so each unordered pair contributes twice
    for (int j = 0; j < i; ++j) qubo.q[i][j] = 2.0 * one_minus_lambda * inst.sigma[i][j];
  }

  if (const auto* soft = std::get_if<SoftPenalty>(&scheme)) {
    const double alpha = soft->alpha;
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
      throw std::invalid_argument("build_qubo: soft alpha must be finite and >= 0");
    // alpha (sum x_i - B)^2 = alpha [(1-2B) sum x_i + 2 sum_{i<j} x_i x_j + B^2]
    for (int i = 0; i < inst.n; ++i) {
      qubo.q[i][i] += alpha * (1.0 - 2.0 * inst.budget);
      for (int j = 0; j < i; ++j) qubo.q[i][j] += 2.0 * alpha;
    }
    qubo.offset += alpha * static_cast<double>(inst.budget) * inst.budget;
  }
  return qubo;
}

/// Exact binary-to-spin transform with the convention x_i=1 <-> s_i=+1.
inline Ising qubo_to_ising(const Qubo& qubo) {
  Ising ising;
  ising.n = qubo.n;
  ising.h.assign(qubo.n, 0.0);
  ising.j.resize(qubo.n);
  for (int i = 0; i < qubo.n; ++i) ising.j[i].assign(qubo.n - i - 1, 0.0);
  ising.c = qubo.offset;

  for (int i = 0; i < qubo.n; ++i) {
    // Q_ii x_i = Q_ii (s_i + 1)/2
    ising.h[i] += qubo.q[i][i] / 2.0;
    ising.c += qubo.q[i][i] / 2.0;
    for (int j = 0; j < i; ++j) {
      // Q_ij x_i x_j = Q_ij (s_i s_j + s_i + s_j + 1)/4
      const double quarter = qubo.q[i][j] / 4.0;
      ising.j[j][i - j - 1] += quarter;
      ising.h[i] += quarter;
      ising.h[j] += quarter;
      ising.c += quarter;
    }
  }
  return ising;
}

namespace detail {

constexpr int kCostTableMaxQubits = 26;

inline std::vector<double> enumerate_markowitz_costs(const ProblemInstance& inst) {
  const std::uint64_t dim = std::uint64_t{1} << inst.n;
  std::vector<double> costs(dim);
  for (std::uint64_t l = 0; l < dim; ++l) costs[l] = markowitz_cost(inst, l);
  return costs;
}

}  // namespace detail

/// Smallest penalty factor (plus a relative 1e-6 margin) making every
/// budget-violating solution cost strictly more than the worst viable one,
/// found by brute force over all 2^n assignments.
inline double alpha_min(const ProblemInstance& inst) {
  inst.validate();
  if (inst.n > detail::kCostTableMaxQubits)
    throw std::invalid_argument("alpha_min: n exceeds the 2^n enumeration guard");
  const std::uint64_t dim = std::uint64_t{1} << inst.n;
  const std::vector<double> costs = detail::enumerate_markowitz_costs(inst);

  double max_viable = -std::numeric_limits<double>::infinity();
  bool any_viable = false;
  for (std::uint64_t l = 0; l < dim; ++l)
    if (popcount(l) == inst.budget) {
      any_viable = true;
      max_viable = std::max(max_viable, costs[l]);
    }
  if (!any_viable) throw std::invalid_argument("alpha_min: viable set is empty");

  double raw = -std::numeric_limits<double>::infinity();
  for (std::uint64_t l = 0; l < dim; ++l) {
    const int violation = popcount(l) - inst.budget;
    if (violation == 0) continue;
    const double k = static_cast<double>(violation) * violation;  // K(x) >= 1
    raw = std::max(raw, (max_viable - costs[l]) / k);
  }

  constexpr double kMargin = 1e-6;
  if (raw < 0.0) return 0.0;             // hierarchy already strict at alpha = 0
  if (raw == 0.0) return kMargin;        // exact tie: any positive alpha lifts it
  return raw * (1.0 + kMargin);
}

/// Brute-forced cost table under the given scheme (raw Markowitz cost for
/// hard schemes; penalized cost for SoftPenalty).
inline CostTable cost_table(const ProblemInstance& inst, const ConstraintScheme& scheme) {
  inst.validate();
  if (inst.n > detail::kCostTableMaxQubits)
    throw std::invalid_argument("cost_table: n exceeds the 2^n enumeration guard");
  const std::uint64_t dim = std::uint64_t{1} << inst.n;

  CostTable table;
  table.n = inst.n;
  table.budget = inst.budget;
  table.scheme_tag = qmvo::scheme_tag(scheme);
  table.costs = detail::enumerate_markowitz_costs(inst);
  table.viable.resize(dim);

  const double alpha = is_soft(scheme) ? std::get<SoftPenalty>(scheme).alpha : 0.0;
  if (is_soft(scheme) && (!(alpha >= 0.0) || !std::isfinite(alpha)))
    throw std::invalid_argument("cost_table: soft alpha must be finite and >= 0");

  for (std::uint64_t l = 0; l < dim; ++l) {
    const int violation = popcount(l) - inst.budget;
    table.viable[l] = (violation == 0) ? 1 : 0;
    if (alpha != 0.0)
      table.costs[l] += alpha * static_cast<double>(violation) * violation;
  }
  return table;
}

}  // namespace qmvo
