#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qmvo/quality.hpp"
#include "qmvo/rng.hpp"
#include "qmvo/simulator.hpp"

namespace qmvo {

struct ExactBackend {};
struct ShotBackend {
  int shots = 2048;
  std::uint64_t seed = 0;  // per-evaluation seeds are derived from this and the eval index
};
using Backend = std::variant<ExactBackend, ShotBackend>;

inline std::string backend_name(const Backend& backend) {
  return std::holds_alternative<ExactBackend>(backend) ? "exact" : "shots";
}

/// Thrown by BudgetedObjective when a call would exceed the evaluation
/// budget. Optimizers catch it and return their best-so-far result.
class BudgetExhausted : public std::runtime_error {
 public:
  BudgetExhausted() : std::runtime_error("objective evaluation budget exhausted") {}
};

struct Evaluation {
  std::vector<double> params;
  double value = 0.0;
};

/// Budget-accounted black-box objective. Every call, including finite
/// difference probes, increments the counter and is appended to the
/// trajectory; calls beyond the budget throw BudgetExhausted.
class BudgetedObjective {
 public:
  // fn(x, eval_index): eval_index is the 0-based call counter, used by
  // shot-based backends to derive per-evaluation seeds.
  using Fn = std::function<double(std::span<const double>, int)>;

  BudgetedObjective(int dim, Fn fn, int budget = 500)
      : dim_(dim), fn_(std::move(fn)), budget_(budget) {
    if (dim_ < 1) throw std::invalid_argument("objective: dim must be >= 1");
    if (budget_ < 1) throw std::invalid_argument("objective: budget must be >= 1");
  }

  double operator()(std::span<const double> x) {
    if (static_cast<int>(x.size()) != dim_)
      throw std::invalid_argument("objective: wrong parameter count");
    if (exhausted()) throw BudgetExhausted();
    const int index = static_cast<int>(trajectory_.size());
    const double value = fn_(x, index);
    trajectory_.push_back({std::vector<double>(x.begin(), x.end()), value});
    return value;
  }

  int dim() const { return dim_; }
  int budget() const { return budget_; }
  int evals_used() const { return static_cast<int>(trajectory_.size()); }
  int remaining() const { return budget_ - evals_used(); }
  bool exhausted() const { return evals_used() >= budget_; }
  const std::vector<Evaluation>& trajectory() const { return trajectory_; }

  void set_budget(int budget) {
    if (budget < evals_used())
      throw std::invalid_argument("objective: budget below evaluations already used");
    budget_ = budget;
  }

 private:
  int dim_;
  Fn fn_;
  int budget_;
  std::vector<Evaluation> trajectory_;
};

/// QAOA objective <H_C>(gamma, beta) with parameters packed as
/// [gamma_1..gamma_p, beta_1..beta_p]. Shot backends derive the seed of
/// each evaluation from (backend seed, eval index), so a run is a fixed,
/// reproducible random function.
inline BudgetedObjective make_qaoa_objective(AnsatzConfig config, CostTable table,
                                             Backend backend, int budget = 500) {
  config.validate();
  const int p = config.depth;
  auto fn = [config = std::move(config), table = std::move(table), backend,
             p](std::span<const double> x, int eval_index) {
    Params params;
    params.gamma.assign(x.begin(), x.begin() + p);
    params.beta.assign(x.begin() + p, x.end());
    const Statevector st = evolve_ansatz(config, params, table);
    if (const auto* shot = std::get_if<ShotBackend>(&backend)) {
      const std::uint64_t eval_seed =
          derive_seed(shot->seed, {0x5ca1ab1eULL, static_cast<std::uint64_t>(eval_index)});
      return estimate_expectation(
          measure_counts(st, static_cast<std::uint64_t>(shot->shots), eval_seed), table);
    }
    return exact_expectation(st, table);
  };
  return BudgetedObjective(2 * p, std::move(fn), budget);
}

enum class Terminated { Budget, Converged };

inline std::string terminated_name(Terminated t) {
  return t == Terminated::Budget ? "budget" : "converged";
}

/// Outcome of one optimization run. best_value is the minimum over the
/// trajectory and best_point is the earliest point achieving it.
struct OptResult {
  std::vector<double> best_point;
  double best_value = std::numeric_limits<double>::quiet_NaN();
  int evals_used = 0;
  std::vector<Evaluation> trajectory;
  Terminated terminated = Terminated::Budget;

  /// Splits the flat best point into (gamma, beta); requires even dimension.
  Params best_params() const {
    if (best_point.size() % 2 != 0)
      throw std::logic_error("best_params: dimension is not 2p");
    Params params;
    const std::size_t p = best_point.size() / 2;
    params.gamma.assign(best_point.begin(), best_point.begin() + p);
    params.beta.assign(best_point.begin() + p, best_point.end());
    return params;
  }
};

namespace detail {

inline OptResult finalize(const BudgetedObjective& obj, Terminated terminated) {
  OptResult result;
  result.trajectory = obj.trajectory();
  result.evals_used = obj.evals_used();
  result.terminated = terminated;
  if (result.trajectory.empty())
    throw std::logic_error("optimizer produced no evaluations");
  std::size_t best = 0;
  for (std::size_t i = 1; i < result.trajectory.size(); ++i)
    if (result.trajectory[i].value < result.trajectory[best].value) best = i;
  result.best_point = result.trajectory[best].params;
  result.best_value = result.trajectory[best].value;
  return result;
}

}  // namespace detail

/// Exhaustive p=1 lattice scan: gamma over [0, 2pi) and beta over [0, pi),
/// row-major from (0, 0). The objective budget is raised to the lattice
/// size if needed; ties keep the first point visited.
inline OptResult grid_search(BudgetedObjective& obj, int gamma_points = 50,
                             int beta_points = 25) {
  if (obj.dim() != 2)
    throw std::invalid_argument("grid_search: only depth p = 1 (2 parameters) supported");
  if (gamma_points < 1 || beta_points < 1)
    throw std::invalid_argument("grid_search: need at least one point per axis");
  const int lattice = gamma_points * beta_points;
  if (obj.budget() < obj.evals_used() + lattice)
    obj.set_budget(obj.evals_used() + lattice);
  for (int gi = 0; gi < gamma_points; ++gi) {
    const double gamma = 2.0 * std::numbers::pi * gi / gamma_points;
    for (int bi = 0; bi < beta_points; ++bi) {
      const double beta = std::numbers::pi * bi / beta_points;
      const double point[2] = {gamma, beta};
      obj(point);
    }
  }
  return detail::finalize(obj, Terminated::Converged);
}

/// Uniform random probes over [0, 2pi)^dim until the budget is spent.
inline OptResult random_search(BudgetedObjective& obj, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x(obj.dim());
  try {
    while (true) {
      for (double& v : x) v = rng.uniform(0.0, 2.0 * std::numbers::pi);
      obj(x);
    }
  } catch (const BudgetExhausted&) {
  }
  return detail::finalize(obj, Terminated::Budget);
}

/// Downhill simplex with the standard reflection/expansion/contraction/
/// shrink coefficients (1, 2, 0.5, 0.5). The initial simplex is x0 plus a
/// per-coordinate step of 0.05 (1 + |x0_i|). Stops when the budget is spent
/// or the simplex diameter falls below 1e-8.
inline OptResult nelder_mead(BudgetedObjective& obj, std::vector<double> x0) {
  const int dim = obj.dim();
  if (static_cast<int>(x0.size()) != dim)
    throw std::invalid_argument("nelder_mead: x0 has wrong dimension");

  std::vector<std::vector<double>> simplex;
  std::vector<double> values;
  Terminated terminated = Terminated::Budget;
  try {
    simplex.push_back(x0);
    values.push_back(obj(x0));
    for (int i = 0; i < dim; ++i) {
      std::vector<double> v = x0;
      v[i] += 0.05 * (1.0 + std::abs(x0[i]));
      simplex.push_back(v);
      values.push_back(obj(v));
    }

    auto order = [&] {
      std::vector<std::size_t> idx(simplex.size());
      std::iota(idx.begin(), idx.end(), 0);
      std::stable_sort(idx.begin(), idx.end(),
                       [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
      std::vector<std::vector<double>> s2;
      std::vector<double> v2;
      for (std::size_t k : idx) {
        s2.push_back(simplex[k]);
        v2.push_back(values[k]);
      }
      simplex.swap(s2);
      values.swap(v2);
    };
    auto diameter = [&] {
      double d = 0.0;
      for (std::size_t k = 1; k < simplex.size(); ++k)
        for (int i = 0; i < dim; ++i)
          d = std::max(d, std::abs(simplex[k][i] - simplex[0][i]));
      return d;
    };

    while (true) {
      order();
      if (diameter() < 1e-8) {
        terminated = Terminated::Converged;
        break;
      }
      std::vector<double> centroid(dim, 0.0);
      for (std::size_t k = 0; k + 1 < simplex.size(); ++k)
        for (int i = 0; i < dim; ++i) centroid[i] += simplex[k][i];
      for (int i = 0; i < dim; ++i) centroid[i] /= dim;

      const std::size_t worst = simplex.size() - 1;
      auto blend = [&](double coef) {
        std::vector<double> p(dim);
        for (int i = 0; i < dim; ++i)
          p[i] = centroid[i] + coef * (centroid[i] - simplex[worst][i]);
        return p;
      };

      const std::vector<double> reflected = blend(1.0);
      const double f_reflected = obj(reflected);
      if (f_reflected < values[0]) {
        const std::vector<double> expanded = blend(2.0);
        const double f_expanded = obj(expanded);
        if (f_expanded < f_reflected) {
          simplex[worst] = expanded;
          values[worst] = f_expanded;
        } else {
          simplex[worst] = reflected;
          values[worst] = f_reflected;
        }
      } else if (f_reflected < values[worst - 1]) {
        simplex[worst] = reflected;
        values[worst] = f_reflected;
      } else {
        // contract outside toward the reflected point or inside toward the worst
        const bool outside = f_reflected < values[worst];
        const std::vector<double> contracted = blend(outside ? 0.5 : -0.5);
        const double f_contracted = obj(contracted);
        if (f_contracted < (outside ? f_reflected : values[worst])) {
          simplex[worst] = contracted;
          values[worst] = f_contracted;
        } else {
          for (std::size_t k = 1; k < simplex.size(); ++k) {
            for (int i = 0; i < dim; ++i)
              simplex[k][i] = simplex[0][i] + 0.5 * (simplex[k][i] - simplex[0][i]);
            values[k] = obj(simplex[k]);
          }
        }
      }
    }
  } catch (const BudgetExhausted&) {
    terminated = Terminated::Budget;
  }
  return detail::finalize(obj, terminated);
}

namespace detail {

// Bracketing plus golden-section line search along x + t d, to tolerance
// 1e-6 in t. f0 is the already-known value at t = 0.
inline std::pair<double, double> golden_line_search(
    BudgetedObjective& obj, const std::vector<double>& x, const std::vector<double>& d,
    double f0, double initial_step = 1.0, double tol = 1e-6) {
  const int dim = obj.dim();
  auto eval_at = [&](double t) {
    std::vector<double> p(dim);
    for (int i = 0; i < dim; ++i) p[i] = x[i] + t * d[i];
    return obj(p);
  };
  constexpr double kGolden = 1.6180339887498949;

  // Bracket the minimum bi-directionally from t = 0, shrinking the probe
  // step when both directions overshoot a narrow valley.
  const double a = 0.0, fa = f0;
  double step = initial_step;
  double b = 0.0, fb = 0.0;
  bool bracketed = false;
  while (std::abs(step) > 0.5 * tol) {
    b = step;
    fb = eval_at(b);
    if (fb < fa) {
      bracketed = true;
      break;
    }
    b = -step;
    fb = eval_at(b);
    if (fb < fa) {
      step = -step;
      bracketed = true;
      break;
    }
    step *= 0.25;
  }
  if (!bracketed) return {0.0, f0};  // t = 0 minimizes along this line
  // expand until the function rises
  double left = a;
  double c = b + kGolden * (b - left);
  double fc = eval_at(c);
  while (fc < fb) {
    left = b;
    b = c;
    fb = fc;
    c = b + kGolden * (b - left);
    fc = eval_at(c);
    if (std::abs(c) > 1e6) break;  // runaway direction; settle for what we have
  }

  // golden-section on [lo, hi] around b
  double lo = std::min(left, c), hi = std::max(left, c);
  double m1 = hi - (hi - lo) / kGolden;
  double m2 = lo + (hi - lo) / kGolden;
  double f1 = eval_at(m1);
  double f2 = eval_at(m2);
  while (hi - lo > tol) {
    if (f1 < f2) {
      hi = m2;
      m2 = m1;
      f2 = f1;
      m1 = hi - (hi - lo) / kGolden;
      f1 = eval_at(m1);
    } else {
      lo = m1;
      m1 = m2;
      f1 = f2;
      m2 = lo + (hi - lo) / kGolden;
      f2 = eval_at(m2);
    }
  }
  const double t_best = (f1 < f2) ? m1 : m2;
  const double f_best = std::min(f1, f2);
  if (f_best >= f0) return {0.0, f0};
  return {t_best, f_best};
}

}  // namespace detail

/// Powell's conjugate direction method: cycles of bi-directional golden
/// section line searches over a direction set seeded with the coordinate
/// axes; after each cycle the direction of largest single decrease is
/// replaced by the net cycle displacement, which is then searched too.
inline OptResult powell(BudgetedObjective& obj, std::vector<double> x0) {
  const int dim = obj.dim();
  if (static_cast<int>(x0.size()) != dim)
    throw std::invalid_argument("powell: x0 has wrong dimension");

  std::vector<std::vector<double>> directions(dim, std::vector<double>(dim, 0.0));
  for (int i = 0; i < dim; ++i) directions[i][i] = 1.0;

  Terminated terminated = Terminated::Budget;
  try {
    std::vector<double> x = x0;
    double fx = obj(x);
    while (true) {
      const std::vector<double> cycle_start = x;
      const double f_start = fx;
      double largest_drop = 0.0;
      std::size_t drop_index = 0;
      for (std::size_t di = 0; di < directions.size(); ++di) {
        const auto [t, ft] = detail::golden_line_search(obj, x, directions[di], fx);
        if (fx - ft > largest_drop) {
          largest_drop = fx - ft;
          drop_index = di;
        }
        for (int i = 0; i < dim; ++i) x[i] += t * directions[di][i];
        fx = ft;
      }

      // conjugate-direction update: search along the net displacement and
      // let it replace the direction that contributed the largest decrease
      std::vector<double> net(dim);
      double net_norm = 0.0;
      for (int i = 0; i < dim; ++i) {
        net[i] = x[i] - cycle_start[i];
        net_norm += net[i] * net[i];
      }
      if (net_norm > 1e-24) {
        const auto [t, ft] = detail::golden_line_search(obj, x, net, fx);
        for (int i = 0; i < dim; ++i) x[i] += t * net[i];
        fx = ft;
        directions[drop_index] = net;
      }

      if (2.0 * (f_start - fx) <= 1e-10 * (std::abs(f_start) + std::abs(fx)) + 1e-14) {
        terminated = Terminated::Converged;
        break;
      }
    }
  } catch (const BudgetExhausted&) {
    terminated = Terminated::Budget;
  }
  return detail::finalize(obj, terminated);
}

/// Central finite differences (f(x+h e_i) - f(x-h e_i)) / 2h; consumes
/// 2 dim evaluations from the budget.
inline std::vector<double> finite_diff_grad(BudgetedObjective& obj,
                                            const std::vector<double>& x, double h = 1e-3) {
  const int dim = obj.dim();
  if (static_cast<int>(x.size()) != dim)
    throw std::invalid_argument("finite_diff_grad: x has wrong dimension");
  std::vector<double> grad(dim);
  std::vector<double> probe = x;
  for (int i = 0; i < dim; ++i) {
    probe[i] = x[i] + h;
    const double fp = obj(probe);
    probe[i] = x[i] - h;
    const double fm = obj(probe);
    probe[i] = x[i];
    grad[i] = (fp - fm) / (2.0 * h);
  }
  return grad;
}

/// Plain first-order descent x <- x - lr grad with finite-difference
/// gradients; each step costs 2 dim + 1 evaluations and the loop runs
/// until the budget is spent.
inline OptResult gradient_descent(BudgetedObjective& obj, std::vector<double> x0,
                                  double learning_rate = 0.01, double fd_step = 1e-3) {
  if (static_cast<int>(x0.size()) != obj.dim())
    throw std::invalid_argument("gradient_descent: x0 has wrong dimension");
  try {
    std::vector<double> x = std::move(x0);
    while (true) {
      obj(x);
      const std::vector<double> grad = finite_diff_grad(obj, x, fd_step);
      for (std::size_t i = 0; i < x.size(); ++i) x[i] -= learning_rate * grad[i];
    }
  } catch (const BudgetExhausted&) {
  }
  return detail::finalize(obj, Terminated::Budget);
}

struct AdamConfig {
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double fd_step = 1e-3;
};

/// Adam over finite-difference gradients with the standard bias-corrected
/// moment updates; budget accounting matches gradient_descent.
inline OptResult adam(BudgetedObjective& obj, std::vector<double> x0, AdamConfig cfg = {}) {
  if (static_cast<int>(x0.size()) != obj.dim())
    throw std::invalid_argument("adam: x0 has wrong dimension");
  try {
    std::vector<double> x = std::move(x0);
    std::vector<double> m(x.size(), 0.0), v(x.size(), 0.0);
    for (int t = 1;; ++t) {
      obj(x);
      const std::vector<double> grad = finite_diff_grad(obj, x, cfg.fd_step);
      const double m_corr = 1.0 - std::pow(cfg.beta1, t);
      const double v_corr = 1.0 - std::pow(cfg.beta2, t);
      for (std::size_t i = 0; i < x.size(); ++i) {
        m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * grad[i];
        v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
        x[i] -= cfg.learning_rate * (m[i] / m_corr) / (std::sqrt(v[i] / v_corr) + cfg.epsilon);
      }
    }
  } catch (const BudgetExhausted&) {
  }
  return detail::finalize(obj, Terminated::Budget);
}

}  // namespace qmvo
