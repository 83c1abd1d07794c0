#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "qmvo/harness.hpp"
#include "qmvo/optimizers.hpp"

using namespace qmvo;
using Catch::Matchers::WithinAbs;

namespace {

constexpr double kPi = std::numbers::pi;

BudgetedObjective plain(int dim, std::function<double(std::span<const double>)> f,
                        int budget = 500) {
  return BudgetedObjective(
      dim, [f = std::move(f)](std::span<const double> x, int) { return f(x); }, budget);
}

double sq(double v) { return v * v; }

// test-local coordinate descent with its own golden-section line search,
// used as the no-update baseline against Powell
int coordinate_descent_evals_to(double target, std::vector<double> x, int budget) {
  int evals = 0;
  auto f = [&](const std::vector<double>& p) {
    ++evals;
    return 50.5 * p[0] * p[0] + 50.5 * p[1] * p[1] - 99.0 * p[0] * p[1];
  };
  constexpr double golden = 1.6180339887498949;
  double fx = f(x);
  int hit = fx <= target ? evals : -1;
  while (evals < budget && hit < 0) {
    for (int axis = 0; axis < 2 && hit < 0; ++axis) {
      auto at = [&](double t) {
        std::vector<double> p = x;
        p[axis] += t;
        const double v = f(p);
        if (v <= target && hit < 0) hit = evals;
        return v;
      };
      double a = 0.0, fa = fx, b = 0.0, fb = 0.0;
      double step = 1.0;
      bool bracketed = false;
      while (step > 5e-7 && evals < budget) {
        b = step;
        fb = at(b);
        if (fb < fa) {
          bracketed = true;
          break;
        }
        b = -step;
        fb = at(b);
        if (fb < fa) {
          bracketed = true;
          break;
        }
        step *= 0.25;
      }
      if (!bracketed) continue;
      double c = b + golden * (b - a), fc = at(c);
      while (fc < fb && evals < budget) {
        a = b;
        b = c;
        fb = fc;
        c = b + golden * (b - a);
        fc = at(c);
      }
      double lo = std::min(a, c), hi = std::max(a, c);
      double m1 = hi - (hi - lo) / golden, m2 = lo + (hi - lo) / golden;
      double f1 = at(m1), f2 = at(m2);
      while (hi - lo > 1e-6 && evals < budget) {
        if (f1 < f2) {
          hi = m2;
          m2 = m1;
          f2 = f1;
          m1 = hi - (hi - lo) / golden;
          f1 = at(m1);
        } else {
          lo = m1;
          m1 = m2;
          f1 = f2;
          m2 = lo + (hi - lo) / golden;
          f2 = at(m2);
        }
      }
      const double t = f1 < f2 ? m1 : m2;
      if (std::min(f1, f2) < fx) {
        x[axis] += t;
        fx = std::min(f1, f2);
      }
    }
  }
  return hit < 0 ? budget + 1 : hit;
}

}  // namespace

TEST_CASE("budget law: counter, trajectory and exception") {
  BudgetedObjective obj = plain(1, [](std::span<const double> x) { return x[0]; }, 3);
  const double point[1] = {1.0};
  obj(point);
  obj(point);
  REQUIRE(obj.evals_used() == 2);
  REQUIRE(obj.trajectory().size() == 2);
  obj(point);
  REQUIRE(obj.exhausted());
  REQUIRE_THROWS_AS(obj(point), BudgetExhausted);
  REQUIRE(obj.evals_used() == 3);
  REQUIRE_THROWS_AS(obj.set_budget(2), std::invalid_argument);
}

TEST_CASE("grid search finds the cosine minimum on the lattice") {
  BudgetedObjective obj = plain(2, [](std::span<const double> x) { return std::cos(x[0]); });
  const OptResult result = grid_search(obj);
  REQUIRE(result.evals_used == 1250);
  // lattice argmin of cos(gamma): nearest grid point to pi
  double best_gamma = 0.0, best = 1e300;
  for (int gi = 0; gi < 50; ++gi) {
    const double g = 2.0 * kPi * gi / 50;
    if (std::cos(g) < best) {
      best = std::cos(g);
      best_gamma = g;
    }
  }
  REQUIRE_THAT(result.best_point[0], WithinAbs(best_gamma, 1e-12));
}

TEST_CASE("grid search tie rule returns the first lattice point") {
  BudgetedObjective obj = plain(2, [](std::span<const double>) { return 1.0; }, 1250);
  const OptResult result = grid_search(obj);
  REQUIRE(result.best_point == std::vector<double>{0.0, 0.0});
}

TEST_CASE("grid search rejects higher depths") {
  BudgetedObjective obj = plain(4, [](std::span<const double>) { return 0.0; });
  REQUIRE_THROWS_AS(grid_search(obj), std::invalid_argument);
}

TEST_CASE("grid minimum dominates random probes on a resolvable QAOA landscape") {
  // At alpha = 100 the 50-point gamma lattice is blind to the penalty term
  // (100 * 2pi/50 = 4pi, so every lattice point leaves the penalty phase at
  // identity), which lets random probes beat the grid. The dominance claim
  // is tested at alpha_min, where the lattice resolves the landscape.
  const ProblemInstance inst = random_instance(2, 6, {.budget = 1});
  const ConstraintScheme scheme = SoftPenalty{alpha_min(inst)};
  const AnsatzConfig config = make_ansatz_config(inst, scheme, 1);
  const CostTable table = cost_table(inst, scheme);

  BudgetedObjective grid_obj = make_qaoa_objective(config, table, ExactBackend{}, 1250);
  const OptResult grid = grid_search(grid_obj);

  for (std::uint64_t seed : {7ULL, 77ULL, 777ULL}) {
    BudgetedObjective probe_obj = make_qaoa_objective(config, table, ExactBackend{}, 200);
    const OptResult probes = random_search(probe_obj, seed);
    REQUIRE(grid.best_value <= probes.best_value + 1e-12);
  }
}

TEST_CASE("the alpha=100 lattice aliases the penalty phase exactly") {
  // structural companion to the test above: on the pinned grid the penalty
  // contributes no relative phase at all, for every violation magnitude
  for (int m = 0; m < 50; ++m) {
    const double gamma = 2.0 * kPi * m / 50;
    for (int violation_sq = 1; violation_sq <= 4; ++violation_sq) {
      const double phase = std::remainder(gamma * 100.0 * violation_sq, 2.0 * kPi);
      REQUIRE_THAT(phase, WithinAbs(0.0, 1e-9));
    }
  }
}

TEST_CASE("random search basics") {
  BudgetedObjective one = plain(2, [](std::span<const double> x) { return sq(x[0]) + sq(x[1]); }, 1);
  const OptResult single = random_search(one, 5);
  REQUIRE(single.evals_used == 1);
  REQUIRE(single.best_value == single.trajectory[0].value);

  // prefix property: a longer run with the same seed can only improve
  BudgetedObjective short_run = plain(2, [](std::span<const double> x) { return sq(x[0]) + sq(x[1]); }, 50);
  BudgetedObjective long_run = plain(2, [](std::span<const double> x) { return sq(x[0]) + sq(x[1]); }, 100);
  const OptResult a = random_search(short_run, 42);
  const OptResult b = random_search(long_run, 42);
  REQUIRE(b.best_value <= a.best_value);
  for (int i = 0; i < 50; ++i) REQUIRE(a.trajectory[i].params == b.trajectory[i].params);
}

TEST_CASE("random search beats the domain-center baseline on the sphere") {
  // f = |theta|^2 over [0, 2pi)^2, minimum at the origin corner
  std::vector<double> bests;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    BudgetedObjective obj = plain(2, [](std::span<const double> x) { return sq(x[0]) + sq(x[1]); });
    bests.push_back(random_search(obj, seed).best_value);
  }
  std::sort(bests.begin(), bests.end());
  const double median = bests[50];
  const double center_value = 2.0 * kPi * kPi;
  REQUIRE(median < center_value);
}

TEST_CASE("nelder-mead solves a 1-d quadratic") {
  BudgetedObjective obj = plain(1, [](std::span<const double> x) { return sq(x[0] - 1.0); });
  const OptResult result = nelder_mead(obj, {0.0});
  REQUIRE(result.evals_used <= 100);
  REQUIRE(std::abs(result.best_point[0] - 1.0) < 1e-3);
  REQUIRE(result.best_value == std::min_element(result.trajectory.begin(), result.trajectory.end(),
                                                [](const auto& p, const auto& q) {
                                                  return p.value < q.value;
                                                })->value);
}

TEST_CASE("nelder-mead on a constant converges and keeps x0") {
  BudgetedObjective obj = plain(2, [](std::span<const double>) { return 3.5; });
  const OptResult result = nelder_mead(obj, {0.7, -0.2});
  REQUIRE(result.terminated == Terminated::Converged);
  REQUIRE(result.best_point == std::vector<double>{0.7, -0.2});
}

TEST_CASE("nelder-mead descends on the rosenbrock valley") {
  auto rosenbrock = [](std::span<const double> x) {
    return sq(1.0 - x[0]) + 100.0 * sq(x[1] - sq(x[0]));
  };
  BudgetedObjective obj = plain(2, rosenbrock);
  const OptResult result = nelder_mead(obj, {0.0, 0.0});
  const double at_start = 1.0;  // rosenbrock(0, 0)
  REQUIRE(result.best_value < at_start);
  REQUIRE(result.evals_used <= 500);
}

TEST_CASE("powell solves a separable quadratic in one sweep") {
  BudgetedObjective obj = plain(2, [](std::span<const double> x) {
    return sq(x[0] - 0.3) + sq(x[1] + 1.2);
  });
  const OptResult result = powell(obj, {2.0, 2.0});
  REQUIRE(std::abs(result.best_point[0] - 0.3) < 1e-4);
  REQUIRE(std::abs(result.best_point[1] + 1.2) < 1e-4);
}

TEST_CASE("powell on a constant keeps x0") {
  BudgetedObjective obj = plain(2, [](std::span<const double>) { return -1.0; });
  const OptResult result = powell(obj, {0.4, 0.9});
  REQUIRE(result.terminated == Terminated::Converged);
  REQUIRE(result.best_point == std::vector<double>{0.4, 0.9});
}

TEST_CASE("conjugate directions beat plain coordinate descent when ill-conditioned") {
  // condition-100 quadratic rotated 45 degrees: f = 50.5u^2 + 50.5v^2 - 99uv
  auto f = [](std::span<const double> x) {
    return 50.5 * sq(x[0]) + 50.5 * sq(x[1]) - 99.0 * x[0] * x[1];
  };
  BudgetedObjective obj = plain(2, f, 3000);
  const OptResult result = powell(obj, {3.0, 1.0});
  int powell_evals = 3001;
  for (std::size_t i = 0; i < result.trajectory.size(); ++i)
    if (result.trajectory[i].value <= 1e-3) {
      powell_evals = static_cast<int>(i) + 1;
      break;
    }
  const int cd_evals = coordinate_descent_evals_to(1e-3, {3.0, 1.0}, 3000);
  REQUIRE(powell_evals < cd_evals);
}

TEST_CASE("finite differences recover linear coefficients") {
  BudgetedObjective obj = plain(3, [](std::span<const double> x) {
    return 2.0 * x[0] - 0.5 * x[1] + 4.0 * x[2];
  });
  const auto grad = finite_diff_grad(obj, {0.3, -0.7, 1.1});
  REQUIRE_THAT(grad[0], WithinAbs(2.0, 1e-9));
  REQUIRE_THAT(grad[1], WithinAbs(-0.5, 1e-9));
  REQUIRE_THAT(grad[2], WithinAbs(4.0, 1e-9));
  REQUIRE(obj.evals_used() == 6);

  BudgetedObjective flat = plain(2, [](std::span<const double>) { return 1.0; });
  const auto zero = finite_diff_grad(flat, {0.0, 0.0});
  REQUIRE(zero == std::vector<double>{0.0, 0.0});
}

TEST_CASE("finite differences have O(h^2) error on the exact QAOA objective") {
  const ProblemInstance inst = random_instance(2, 14, {.budget = 1});
  const ConstraintScheme scheme = SoftPenalty{alpha_min(inst)};
  const AnsatzConfig config = make_ansatz_config(inst, scheme, 1);
  const CostTable table = cost_table(inst, scheme);
  const std::vector<double> x = {0.9, 0.6};

  auto fd_at = [&](double h) {
    BudgetedObjective obj = make_qaoa_objective(config, table, ExactBackend{}, 100);
    return finite_diff_grad(obj, x, h)[0];
  };
  const double d1 = fd_at(0.02);
  const double d2 = fd_at(0.01);
  const double d4 = fd_at(0.005);
  const double d8 = fd_at(0.0025);
  const double richardson = (4.0 * d8 - d4) / 3.0;  // h^2-extrapolated reference
  const double err1 = std::abs(d1 - richardson);
  const double err2 = std::abs(d2 - richardson);
  REQUIRE(err1 / err2 > 2.5);  // halving h shrinks the error ~4x
  REQUIRE(err1 / err2 < 6.0);
}

TEST_CASE("gradient descent strictly decreases a smooth quadratic") {
  BudgetedObjective obj = plain(1, [](std::span<const double> x) { return sq(x[0]); }, 90);
  const OptResult result = gradient_descent(obj, {1.0}, 0.1);
  // iterate evaluations are every (2 dim + 1) = 3rd trajectory entry
  double previous = 1e300;
  for (std::size_t i = 0; i < result.trajectory.size(); i += 3) {
    REQUIRE(result.trajectory[i].value < previous);
    previous = result.trajectory[i].value;
  }
}

TEST_CASE("gradient descent is stationary at a zero-gradient start") {
  BudgetedObjective obj = plain(1, [](std::span<const double> x) { return sq(x[0]); }, 30);
  const OptResult result = gradient_descent(obj, {0.0}, 0.1);
  // iterate evaluations sit at every (2 dim + 1) = 3rd entry; probes at +-h
  for (std::size_t i = 0; i < result.trajectory.size(); i += 3)
    REQUIRE(result.trajectory[i].params[0] == 0.0);
}

TEST_CASE("overshooting gradient descent still reports the best point seen") {
  BudgetedObjective obj = plain(1, [](std::span<const double> x) { return sq(x[0]); }, 60);
  const OptResult result = gradient_descent(obj, {1.0}, 1.5);  // lr > 2/curvature
  REQUIRE(result.trajectory.back().value > result.trajectory.front().value);  // diverging
  REQUIRE(result.best_value <= result.trajectory.front().value);
  REQUIRE(result.terminated == Terminated::Budget);
}

TEST_CASE("adam reaches the quadratic minimum within 300 evaluations") {
  BudgetedObjective obj = plain(1, [](std::span<const double> x) { return sq(x[0]); }, 300);
  const OptResult result = adam(obj, {1.0});
  REQUIRE(std::abs(result.best_value) < 0.1);

  // with twice the budget the iterate itself lands near the minimum
  BudgetedObjective longer = plain(1, [](std::span<const double> x) { return sq(x[0]); }, 600);
  const OptResult converged = adam(longer, {1.0});
  REQUIRE(std::abs(converged.best_point[0]) < 0.1);
}

TEST_CASE("adam's first step has magnitude close to the learning rate") {
  BudgetedObjective obj = plain(1, [](std::span<const double> x) { return sq(x[0]); }, 6);
  const OptResult result = adam(obj, {1.0});
  // trajectory: f(x0), probes at x0 +- h, then f(x1): entries 0 and 3
  REQUIRE(result.trajectory.size() >= 4);
  const double step = std::abs(result.trajectory[3].params[0] - result.trajectory[0].params[0]);
  REQUIRE_THAT(step, WithinAbs(0.01, 1e-4));
}

TEST_CASE("adam is steadier than gradient descent on a noisy objective") {
  auto noisy = [](std::uint64_t run_seed) {
    return BudgetedObjective(
        1,
        [run_seed](std::span<const double> x, int eval_index) {
          // deterministic per-evaluation noise, like a fixed shot stream
          Rng rng(derive_seed(run_seed, {static_cast<std::uint64_t>(eval_index)}));
          const double u1 = rng.uniform(), u2 = rng.uniform();
          const double gauss = std::sqrt(-2.0 * std::log(u1 + 1e-300)) *
                               std::cos(2.0 * kPi * u2);
          return sq(x[0]) + 0.02 * gauss;
        },
        300);
  };
  std::vector<double> adam_finals, gd_finals;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    BudgetedObjective a = noisy(derive_seed(1, {seed}));
    const OptResult ra = adam(a, {1.0});
    adam_finals.push_back(ra.trajectory.back().params[0]);
    BudgetedObjective g = noisy(derive_seed(1, {seed}));
    const OptResult rg = gradient_descent(g, {1.0});
    gd_finals.push_back(rg.trajectory.back().params[0]);
  }
  auto spread = [](const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= v.size();
    double ss = 0.0;
    for (double x : v) ss += sq(x - mean);
    return std::sqrt(ss / (v.size() - 1));
  };
  REQUIRE(spread(adam_finals) < spread(gd_finals));
}

TEST_CASE("optimizers are deterministic given their seeds") {
  auto make = [] {
    return plain(2, [](std::span<const double> x) {
      return std::sin(3.0 * x[0]) + sq(x[1] - 2.0);
    });
  };
  BudgetedObjective o1 = make(), o2 = make();
  const OptResult a = random_search(o1, 9);
  const OptResult b = random_search(o2, 9);
  REQUIRE(a.best_point == b.best_point);
  REQUIRE(a.best_value == b.best_value);

  BudgetedObjective o3 = make(), o4 = make();
  const OptResult c = nelder_mead(o3, {0.1, 0.1});
  const OptResult d = nelder_mead(o4, {0.1, 0.1});
  REQUIRE(c.best_point == d.best_point);
  REQUIRE(c.evals_used == d.evals_used);
}

TEST_CASE("exact backend objective reproduces its best value on re-evaluation") {
  const ProblemInstance inst = random_instance(3, 23);
  const ConstraintScheme scheme = SoftPenalty{100.0};
  const AnsatzConfig config = make_ansatz_config(inst, scheme, 1);
  const CostTable table = cost_table(inst, scheme);
  BudgetedObjective obj = make_qaoa_objective(config, table, ExactBackend{}, 200);
  const OptResult result = nelder_mead(obj, {1.0, 0.5});

  BudgetedObjective fresh = make_qaoa_objective(config, table, ExactBackend{}, 10);
  const double again = fresh(result.best_point);
  REQUIRE_THAT(again, WithinAbs(result.best_value, 1e-12));
}
