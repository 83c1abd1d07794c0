#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "qmvo/encoding.hpp"
#include "qmvo/json_io.hpp"
#include "qmvo/portfolio.hpp"

using namespace qmvo;

namespace {

// Direct evaluation of the penalized objective, bypassing the QUBO route.
double penalized_cost(const ProblemInstance& inst, std::uint64_t l, double alpha) {
  const int violation = popcount(l) - inst.budget;
  return markowitz_cost(inst, l) + alpha * violation * violation;
}

ProblemInstance zero_instance(int n, int budget) {
  ProblemInstance inst;
  inst.n = n;
  inst.budget = budget;
  inst.lambda = 0.5;
  inst.mu.assign(n, 0.0);
  inst.sigma.assign(n, std::vector<double>(n, 0.0));
  return inst;
}

}  // namespace

TEST_CASE("build_qubo pure penalty case by hand") {
  const ProblemInstance inst = zero_instance(2, 1);
  const Qubo qubo = build_qubo(inst, SoftPenalty{1.0});
  REQUIRE(qubo.q[0][0] == -1.0);
  REQUIRE(qubo.q[1][1] == -1.0);
  REQUIRE(qubo.q[1][0] == 2.0);
  REQUIRE(qubo.offset == 1.0);
  REQUIRE(qubo.cost(0b00) == 1.0);
  REQUIRE(qubo.cost(0b01) == 0.0);
  REQUIRE(qubo.cost(0b10) == 0.0);
  REQUIRE(qubo.cost(0b11) == 1.0);
}

TEST_CASE("soft alpha=0 equals the hard-scheme QUBO exactly") {
  const ProblemInstance inst = random_instance(4, 3);
  const Qubo soft = build_qubo(inst, SoftPenalty{0.0});
  const Qubo hard = build_qubo(inst, HardDickeComplete{});
  REQUIRE(soft.q == hard.q);
  REQUIRE(soft.offset == hard.offset);
}

TEST_CASE("build_qubo reproduces markowitz cost plus penalty at every point") {
  const ProblemInstance inst = random_instance(3, 17);
  const double alpha = 2.5;
  const Qubo qubo = build_qubo(inst, SoftPenalty{alpha});
  for (std::uint64_t x = 0; x < 8; ++x)
    REQUIRE_THAT(qubo.cost(x),
                 Catch::Matchers::WithinAbs(penalized_cost(inst, x, alpha), 1e-12));
}

TEST_CASE("qubo_to_ising hand expansion") {
  Qubo qubo;
  qubo.n = 2;
  qubo.q = {{-1.0}, {2.0, -1.0}};
  qubo.offset = 1.0;
  const Ising ising = qubo_to_ising(qubo);
  REQUIRE(ising.coupling(0, 1) == 0.5);
  REQUIRE(ising.h[0] == 0.0);
  REQUIRE(ising.h[1] == 0.0);
  REQUIRE(ising.c == 0.5);
}

TEST_CASE("all-zero qubo maps to all-zero ising") {
  Qubo qubo;
  qubo.n = 3;
  qubo.q = {{0.0}, {0.0, 0.0}, {0.0, 0.0, 0.0}};
  const Ising ising = qubo_to_ising(qubo);
  REQUIRE(ising.c == 0.0);
  for (double h : ising.h) REQUIRE(h == 0.0);
  for (const auto& row : ising.j)
    for (double v : row) REQUIRE(v == 0.0);
}

TEST_CASE("qubo and ising agree on all assignments for a random n=5 problem") {
  const ProblemInstance inst = random_instance(5, 29);
  const Qubo qubo = build_qubo(inst, SoftPenalty{7.0});
  const Ising ising = qubo_to_ising(qubo);
  for (std::uint64_t x = 0; x < 32; ++x)
    REQUIRE_THAT(ising.cost(x), Catch::Matchers::WithinAbs(qubo.cost(x), 1e-9));
}

TEST_CASE("alpha_min on a flat objective returns a small positive lift") {
  const ProblemInstance inst = zero_instance(3, 1);
  const double alpha = alpha_min(inst);
  REQUIRE(alpha > 0.0);
  REQUIRE(alpha <= 1e-6);
  // the lift makes every unviable cost strictly exceed the viable maximum
  const CostTable table = cost_table(inst, SoftPenalty{alpha});
  for (std::uint64_t l = 0; l < table.dim(); ++l)
    if (!table.viable[l]) REQUIRE(table.costs[l] > 0.0);
}

TEST_CASE("alpha_min is zero when the hierarchy is already strict") {
  // Viable (weight 1) costs are negative while both unviable states cost
  // more: the empty portfolio sits at 0 and the full one pays a large risk term.
  ProblemInstance inst = zero_instance(2, 1);
  inst.lambda = 0.5;
  inst.mu = {0.6, 0.55};
  inst.sigma = {{0.5, 0.45}, {0.45, 0.5}};
  // viable costs: -0.05 and -0.025; unviable: 0.0 and 0.375
  REQUIRE(alpha_min(inst) == 0.0);
}

TEST_CASE("alpha_min lifts an unviable state that undercuts the viable max") {
  ProblemInstance inst = zero_instance(2, 1);
  inst.lambda = 1.0;
  inst.mu = {0.5, 0.4};  // cost = -0.5 x0 - 0.4 x1
  // viable: {-0.5, -0.4}; unviable: {0, -0.9}; (1,1) undercuts the viable max
  const double alpha = alpha_min(inst);
  REQUIRE(alpha > 0.0);
  const CostTable table = cost_table(inst, SoftPenalty{alpha});
  REQUIRE(table.costs[0b11] > -0.4);
}

TEST_CASE("alpha_min hierarchy flips exactly around the returned value") {
  const ProblemInstance inst = random_instance(4, 5);
  const double alpha = alpha_min(inst);
  REQUIRE(alpha > 1e-5);  // seed chosen to give a meaningfully positive alpha

  auto hierarchy_holds = [&](double a) {
    const CostTable table = cost_table(inst, SoftPenalty{a});
    double max_viable = -1e300, min_unviable = 1e300;
    for (std::uint64_t l = 0; l < table.dim(); ++l) {
      if (table.viable[l])
        max_viable = std::max(max_viable, table.costs[l]);
      else
        min_unviable = std::min(min_unviable, table.costs[l]);
    }
    return min_unviable > max_viable;
  };
  REQUIRE(hierarchy_holds(alpha));
  REQUIRE(hierarchy_holds(alpha * (1.0 + 1e-3)));
  REQUIRE_FALSE(hierarchy_holds(alpha * (1.0 - 1e-3)));
}

TEST_CASE("cost_table pure penalty example") {
  const ProblemInstance inst = zero_instance(2, 1);
  const CostTable table = cost_table(inst, SoftPenalty{1.0});
  REQUIRE(table.costs == std::vector<double>{1.0, 0.0, 0.0, 1.0});
  REQUIRE(table.viable == std::vector<std::uint8_t>{0, 1, 1, 0});
}

TEST_CASE("cost_table with alpha=0 equals the hard-scheme table entrywise") {
  const ProblemInstance inst = random_instance(5, 31);
  const CostTable soft = cost_table(inst, SoftPenalty{0.0});
  const CostTable hard = cost_table(inst, HardDickeComplete{});
  REQUIRE(soft.costs == hard.costs);
  REQUIRE(soft.viable == hard.viable);
}

TEST_CASE("cost_table argmin over viable matches combination enumeration") {
  const ProblemInstance inst = random_instance(10, 77);
  const CostTable table = cost_table(inst, SoftPenalty{100.0});

  std::uint64_t best_table = 0;
  double best_cost = 1e300;
  for (std::uint64_t l = 0; l < table.dim(); ++l)
    if (table.viable[l] && table.costs[l] < best_cost) {
      best_cost = table.costs[l];
      best_table = l;
    }

  std::uint64_t best_oracle = 0;
  double best_oracle_cost = 1e300;
  for (std::uint64_t mask : oracle::combinations(inst.n, inst.budget)) {
    const double c = markowitz_cost(inst, mask);
    if (c < best_oracle_cost) {
      best_oracle_cost = c;
      best_oracle = mask;
    }
  }
  REQUIRE(best_table == best_oracle);
  REQUIRE_THAT(best_cost, Catch::Matchers::WithinAbs(best_oracle_cost, 1e-12));
}

TEST_CASE("soft penalty identity holds exhaustively up to n=10") {
  for (int n : {2, 6, 10}) {
    const ProblemInstance inst = random_instance(n, 1000 + n);
    const double alpha = 100.0;
    const CostTable table = cost_table(inst, SoftPenalty{alpha});
    for (std::uint64_t l = 0; l < table.dim(); ++l)
      REQUIRE_THAT(table.costs[l],
                   Catch::Matchers::WithinAbs(penalized_cost(inst, l, alpha), 1e-12));
  }
}

TEST_CASE("soft penalty leaves viable costs alpha-independent") {
  const ProblemInstance inst = random_instance(6, 55);
  const CostTable t1 = cost_table(inst, SoftPenalty{3.0});
  const CostTable t2 = cost_table(inst, SoftPenalty{250.0});
  for (std::uint64_t l = 0; l < t1.dim(); ++l)
    if (t1.viable[l]) REQUIRE(t1.costs[l] == t2.costs[l]);
}

TEST_CASE("cost_table JSON export round-trips") {
  const ProblemInstance inst = random_instance(4, 12);
  const CostTable table = cost_table(inst, SoftPenalty{100.0});
  const CostTable back = cost_table_from_json(json::parse(to_json(table).dump()));
  REQUIRE(back.n == table.n);
  REQUIRE(back.budget == table.budget);
  REQUIRE(back.costs == table.costs);
  REQUIRE(back.viable == table.viable);
  REQUIRE(back.scheme_tag == table.scheme_tag);
}

TEST_CASE("cost_table rejects oversized problems") {
  ProblemInstance inst = zero_instance(2, 1);
  inst.n = 30;  // over the enumeration guard
  inst.mu.assign(30, 0.0);
  inst.sigma.assign(30, std::vector<double>(30, 0.0));
  inst.budget = 15;
  REQUIRE_THROWS_AS(cost_table(inst, SoftPenalty{1.0}), std::invalid_argument);
}
