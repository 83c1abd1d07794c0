#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "qmvo/bits.hpp"
#include "qmvo/encoding.hpp"
#include "qmvo/rng.hpp"

namespace qmvo {

using Amplitude = std::complex<double>;

/// Dense statevector over 2^n amplitudes, indexed by the global basis-index
/// convention (qubit 0 = least significant bit). Operations mutate in place;
/// a state must not be shared across threads while being evolved.
struct Statevector {
  int n = 0;
  std::vector<Amplitude> amps;

  std::size_t dim() const { return amps.size(); }

  double norm_squared() const {
    double s = 0.0;
    for (const Amplitude& a : amps) s += std::norm(a);
    return s;
  }
};

inline Statevector make_plus_state(int n) {
  if (n < 1) throw std::invalid_argument("make_plus_state: n must be >= 1");
  Statevector st;
  st.n = n;
  st.amps.assign(std::size_t{1} << n, Amplitude(std::pow(2.0, -0.5 * n), 0.0));
  return st;
}

/// Equal superposition of all weight-B basis states, written directly into
/// the amplitudes (no gate synthesis).
inline Statevector make_dicke_state(int n, int budget) {
  if (n < 2 || budget <= 0 || budget >= n)
    throw std::invalid_argument("make_dicke_state: need 0 < B < n");
  Statevector st;
  st.n = n;
  st.amps.assign(std::size_t{1} << n, Amplitude(0.0, 0.0));
  std::size_t count = 0;
  for (std::uint64_t l = 0; l < st.dim(); ++l)
    if (popcount(l) == budget) ++count;
  const double amp = 1.0 / std::sqrt(static_cast<double>(count));
  for (std::uint64_t l = 0; l < st.dim(); ++l)
    if (popcount(l) == budget) st.amps[l] = Amplitude(amp, 0.0);
  return st;
}

/// One uniformly chosen weight-B basis state, deterministic in the seed.
inline Statevector make_hamming_basis_state(int n, int budget, std::uint64_t seed) {
  if (n < 2 || budget <= 0 || budget >= n)
    throw std::invalid_argument("make_hamming_basis_state: need 0 < B < n");
  std::vector<std::uint64_t> candidates;
  for (std::uint64_t l = 0; l < (std::uint64_t{1} << n); ++l)
    if (popcount(l) == budget) candidates.push_back(l);
  Rng rng(seed);
  const std::uint64_t pick = candidates[rng.uniform_index(candidates.size())];
  Statevector st;
  st.n = n;
  st.amps.assign(std::size_t{1} << n, Amplitude(0.0, 0.0));
  st.amps[pick] = Amplitude(1.0, 0.0);
  return st;
}

enum class MixerKind { X, RingXY, CompleteXY };
enum class MixerTopology { Ring, Complete };

/// Ansatz description: constraint scheme with its paired initialization and
/// mixer, circuit depth p, and the Trotter step size for the XY mixers.
struct AnsatzConfig {
  ProblemInstance instance;
  ConstraintScheme scheme;
  int depth = 1;  // p
  MixerKind mixer = MixerKind::X;
  double trotter_eps = 0.25;
  bool mixer_before_phase = false;  // layer order; default is phase then mix

  void validate() const {
    instance.validate();
    if (depth < 1) throw std::invalid_argument("ansatz: depth must be >= 1");
    if (!(trotter_eps > 0.0)) throw std::invalid_argument("ansatz: trotter_eps must be > 0");
    const bool ok =
        (is_soft(scheme) && mixer == MixerKind::X) ||
        (std::holds_alternative<HardDickeComplete>(scheme) && mixer == MixerKind::CompleteXY) ||
        (std::holds_alternative<HardHammingRing>(scheme) && mixer == MixerKind::RingXY);
    if (!ok) throw std::invalid_argument("ansatz: scheme/mixer pairing violated");
  }
};

/// Builds a config with the canonical scheme/mixer/initialization pairing.
inline AnsatzConfig make_ansatz_config(ProblemInstance instance, ConstraintScheme scheme,
                                       int depth, double trotter_eps = 0.25) {
  AnsatzConfig cfg;
  cfg.instance = std::move(instance);
  cfg.scheme = std::move(scheme);
  cfg.depth = depth;
  cfg.trotter_eps = trotter_eps;
  if (std::holds_alternative<HardDickeComplete>(cfg.scheme))
    cfg.mixer = MixerKind::CompleteXY;
  else if (std::holds_alternative<HardHammingRing>(cfg.scheme))
    cfg.mixer = MixerKind::RingXY;
  else
    cfg.mixer = MixerKind::X;
  cfg.validate();
  return cfg;
}

/// Variational angles, one gamma and one beta per layer.
struct Params {
  std::vector<double> gamma;
  std::vector<double> beta;

  int depth() const { return static_cast<int>(gamma.size()); }

  void validate() const {
    if (gamma.size() != beta.size())
      throw std::invalid_argument("params: gamma and beta lengths differ");
    if (gamma.empty()) throw std::invalid_argument("params: depth must be >= 1");
    for (double g : gamma)
      if (!std::isfinite(g)) throw std::invalid_argument("params: gamma not finite");
    for (double b : beta)
      if (!std::isfinite(b)) throw std::invalid_argument("params: beta not finite");
  }
};

struct ShotCounts {
  std::map<std::uint64_t, std::uint64_t> counts;
  std::uint64_t shots = 0;
};

/// Diagonal cost phase: amp[l] *= exp(-i gamma costs[l]).
inline void apply_cost_phase(Statevector& st, const CostTable& table, double gamma) {
  if (table.n != st.n) throw std::invalid_argument("apply_cost_phase: size mismatch");
  for (std::size_t l = 0; l < st.dim(); ++l)
    st.amps[l] *= std::polar(1.0, -gamma * table.costs[l]);
}

/// exp(-i beta sigma^x) on every qubit.
inline void apply_x_mixer(Statevector& st, double beta) {
  const double c = std::cos(beta);
  const Amplitude mis(0.0, -std::sin(beta));
  for (int qubit = 0; qubit < st.n; ++qubit) {
    const std::size_t stride = std::size_t{1} << qubit;
    for (std::size_t base = 0; base < st.dim(); base += 2 * stride)
      for (std::size_t off = 0; off < stride; ++off) {
        const std::size_t i0 = base + off;
        const std::size_t i1 = i0 + stride;
        const Amplitude a0 = st.amps[i0], a1 = st.amps[i1];
        st.amps[i0] = c * a0 + mis * a1;
        st.amps[i1] = mis * a0 + c * a1;
      }
  }
}

/// exp(-i theta (X_i X_j + Y_i Y_j)) applied exactly: a rotation by 2 theta
/// within span{|01>,|10>} of qubits (i, j), identity on |00> and |11>.
inline void apply_xy_pair(Statevector& st, int i, int j, double theta) {
  if (i == j || i < 0 || j < 0 || i >= st.n || j >= st.n)
    throw std::invalid_argument("apply_xy_pair: bad qubit pair");
  const double c = std::cos(2.0 * theta);
  const Amplitude mis(0.0, -std::sin(2.0 * theta));
  const std::uint64_t bi = std::uint64_t{1} << i;
  const std::uint64_t bj = std::uint64_t{1} << j;
  for (std::uint64_t l = 0; l < st.dim(); ++l) {
    if ((l & bi) != 0 || (l & bj) == 0) continue;  // visit each pair once via x_i=0, x_j=1
    const std::uint64_t partner = l ^ bi ^ bj;
    const Amplitude a = st.amps[l], b = st.amps[partner];
    st.amps[l] = c * a + mis * b;
    st.amps[partner] = mis * a + c * b;
  }
}

namespace detail {

inline std::vector<std::pair<int, int>> mixer_edges(int n, MixerTopology topology) {
  std::vector<std::pair<int, int>> edges;
  if (topology == MixerTopology::Ring) {
    if (n == 2) return {{0, 1}};  // single edge, not doubled
    for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  }
  return edges;
}

}  // namespace detail

/// First-order Trotterized exp(-i beta H) for H = sum_edges (XX + YY):
/// r = max(1, ceil(|beta|/eps)) steps, each applying every edge gate with
/// angle beta/r in a fixed order (ring: cyclic from 0; complete: lexicographic).
inline void apply_xy_mixer(Statevector& st, MixerTopology topology, double beta, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("apply_xy_mixer: eps must be > 0");
  if (beta == 0.0) return;
  const auto edges = detail::mixer_edges(st.n, topology);
  const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(beta) / eps)));
  const double theta = beta / steps;
  for (int s = 0; s < steps; ++s)
    for (const auto& [i, j] : edges) apply_xy_pair(st, i, j, theta);
}

/// Initial state paired with the scheme: uniform superposition for soft
/// constraints, Dicke for the complete-graph mixer, a random Hamming-weight
/// basis state for the ring mixer.
inline Statevector initial_state(const AnsatzConfig& cfg) {
  cfg.validate();
  if (const auto* ring = std::get_if<HardHammingRing>(&cfg.scheme))
    return make_hamming_basis_state(cfg.instance.n, cfg.instance.budget, ring->init_seed);
  if (std::holds_alternative<HardDickeComplete>(cfg.scheme))
    return make_dicke_state(cfg.instance.n, cfg.instance.budget);
  return make_plus_state(cfg.instance.n);
}

/// Full p-layer evolution: initialization, then per layer the cost phase
/// with gamma_k followed by the scheme's mixer with beta_k.
inline Statevector evolve_ansatz(const AnsatzConfig& cfg, const Params& params,
                                 const CostTable& table) {
  cfg.validate();
  params.validate();
  if (params.depth() != cfg.depth)
    throw std::invalid_argument("evolve_ansatz: params depth != config depth");
  if (table.n != cfg.instance.n || table.budget != cfg.instance.budget ||
      table.scheme_tag != scheme_tag(cfg.scheme))
    throw std::invalid_argument("evolve_ansatz: cost table does not match config");

  Statevector st = initial_state(cfg);
  auto apply_mixer = [&](double beta) {
    switch (cfg.mixer) {
      case MixerKind::X:
        apply_x_mixer(st, beta);
        break;
      case MixerKind::RingXY:
        apply_xy_mixer(st, MixerTopology::Ring, beta, cfg.trotter_eps);
        break;
      case MixerKind::CompleteXY:
        apply_xy_mixer(st, MixerTopology::Complete, beta, cfg.trotter_eps);
        break;
    }
  };
  for (int k = 0; k < cfg.depth; ++k) {
    if (cfg.mixer_before_phase) {
      apply_mixer(params.beta[k]);
      apply_cost_phase(st, table, params.gamma[k]);
    } else {
      apply_cost_phase(st, table, params.gamma[k]);
      apply_mixer(params.beta[k]);
    }
  }
  return st;
}

inline std::vector<double> probabilities(const Statevector& st) {
  std::vector<double> p(st.dim());
  for (std::size_t l = 0; l < st.dim(); ++l) p[l] = std::norm(st.amps[l]);
  return p;
}

/// Exact <H_C> = sum_l |amp_l|^2 costs[l].
inline double exact_expectation(const Statevector& st, const CostTable& table) {
  if (table.n != st.n) throw std::invalid_argument("exact_expectation: size mismatch");
  double acc = 0.0;
  for (std::size_t l = 0; l < st.dim(); ++l) acc += std::norm(st.amps[l]) * table.costs[l];
  return acc;
}

/// Multinomial sample of the measurement distribution, deterministic in seed.
inline ShotCounts measure_counts(const Statevector& st, std::uint64_t shots,
                                 std::uint64_t seed) {
  if (shots < 1) throw std::invalid_argument("measure_counts: shots must be >= 1");
  std::vector<double> cdf(st.dim());
  double acc = 0.0;
  for (std::size_t l = 0; l < st.dim(); ++l) {
    acc += std::norm(st.amps[l]);
    cdf[l] = acc;
  }
  cdf.back() = std::max(cdf.back(), 1.0);  // guard the last bin against rounding

  ShotCounts out;
  out.shots = shots;
  Rng rng(seed);
  for (std::uint64_t s = 0; s < shots; ++s) {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const std::uint64_t idx = static_cast<std::uint64_t>(it - cdf.begin());
    ++out.counts[std::min<std::uint64_t>(idx, st.dim() - 1)];
  }
  return out;
}

/// Empirical <H_C> from shot counts: sum_l costs[l] count[l] / shots.
inline double estimate_expectation(const ShotCounts& counts, const CostTable& table) {
  double acc = 0.0;
  for (const auto& [l, c] : counts.counts) {
    if (l >= table.dim()) throw std::invalid_argument("estimate_expectation: index out of range");
    acc += table.costs[l] * static_cast<double>(c);
  }
  return acc / static_cast<double>(counts.shots);
}

}  // namespace qmvo
