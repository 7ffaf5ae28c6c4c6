#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pg/factor_graph.hpp"
#include "pg/models.hpp"
#include "pg/rng.hpp"

using namespace pg;

namespace {

State random_state(const FactorGraph& g, Rng& rng) {
  State x(g.num_variables());
  for (int i = 0; i < g.num_variables(); ++i) {
    x[i] = g.domain().is_discrete()
               ? static_cast<double>(rng.uniform_int(g.domain().labels))
               : rng.uniform(g.domain().lo, g.domain().hi);
  }
  return x;
}

FactorGraph pair_spin_model() {
  // U = beta * A12 * (x1 x2 + 1), beta = A12 = 1
  std::vector<std::vector<double>> w = {{0.0, 1.0}, {1.0, 0.0}};
  return build_continuous_spin(2, 1.0, w);
}

}  // namespace

TEST_CASE("energy of an empty factor set is zero") {
  FactorGraph g(3, Domain::discrete(2), {});
  State x(3, 1.0);
  CHECK(energy(g, x) == 0.0);
  CHECK(g.local_max_energy() == 0.0);
  CHECK(g.total_max_energy() == 0.0);
  CHECK(g.max_degree() == 0);
}

TEST_CASE("2x2 Potts energy with all spins equal counts every pair") {
  // beta=1, unit neighbor weights: direct pair enumeration oracle
  const FactorGraph g = build_toy("ising2x2");
  State x(4, 1.0);
  int pairs = 0;
  for (std::size_t f = 0; f < g.num_factors(); ++f) ++pairs;
  CHECK(energy(g, x) == doctest::Approx(static_cast<double>(pairs)));
}

TEST_CASE("continuous spin pair energy at the origin") {
  const FactorGraph g = pair_spin_model();
  State x(2, 0.0);
  CHECK(energy(g, x) == doctest::Approx(1.0));  // x1 x2 = 0 leaves the +1 term
}

TEST_CASE("bound violation names the offending factor") {
  Factor f;
  f.id = "bad";
  f.scope = {0};
  f.bound = 0.5;
  f.eval = [](const State&) { return 2.0; };
  FactorGraph g(1, Domain::discrete(2), {f});
  State x(1, 0.0);
  CHECK_THROWS_WITH_AS(energy(g, x), doctest::Contains("bad"), std::runtime_error);
}

TEST_CASE("local energy of an isolated variable is zero") {
  const FactorGraph g = build_toy("uniform1");
  State x(1, 0.0);
  CHECK(local_energy(g, 0, x) == 0.0);
}

TEST_CASE("single-factor graph: local energy equals total energy") {
  const FactorGraph g = build_toy("chain8");
  State x(1, 3.0);
  CHECK(local_energy(g, 0, x) == doctest::Approx(energy(g, x)));
}

TEST_CASE("3-variable chain: middle local energy via subtraction oracle") {
  std::vector<Factor> factors;
  for (int e = 0; e < 2; ++e) {
    Factor f;
    f.id = "edge" + std::to_string(e);
    f.scope = {e, e + 1};
    f.bound = 1.0;
    const int i = e, j = e + 1;
    f.eval = [i, j](const State& x) { return x[i] == x[j] ? 1.0 : 0.0; };
    factors.push_back(std::move(f));
  }
  FactorGraph g(3, Domain::discrete(2), factors);
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    State x = random_state(g, rng);
    const double far0 = g.factor_value(1, x);  // factor not adjacent to var 0
    CHECK(local_energy(g, 0, x) == doctest::Approx(energy(g, x) - far0));
    const double mid = local_energy(g, 1, x);
    CHECK(mid == doctest::Approx(energy(g, x)));  // middle variable sees both
  }
}

TEST_CASE("graph stats: single factor") {
  Factor f;
  f.id = "solo";
  f.scope = {0};
  f.bound = 3.0;
  f.eval = [](const State&) { return 1.0; };
  FactorGraph g(2, Domain::discrete(2), {f});
  CHECK(g.local_max_energy() == doctest::Approx(3.0));
  CHECK(g.total_max_energy() == doctest::Approx(3.0));
  CHECK(g.max_degree() == 1);
}

TEST_CASE("graph stats agree with from-scratch recomputation") {
  for (const char* name : {"potts", "spin"}) {
    const FactorGraph g = name[0] == 'p'
                              ? build_potts(4, 3, 1.0, 1.0, 1.0)
                              : build_continuous_spin(16, 1.0, kernel_weights(16, 1.0, 1.0));
    double l = 0.0;
    for (int i = 0; i < g.num_variables(); ++i) {
      double row = 0.0;
      for (std::size_t f = 0; f < g.num_factors(); ++f) {
        const auto& scope = g.factor(f).scope;
        for (int v : scope) {
          if (v == i) row += g.factor(f).bound;
        }
      }
      l = std::max(l, row);
    }
    CHECK(g.local_max_energy() == doctest::Approx(l));
  }
}

TEST_CASE("adjacency is the inverse image of scopes") {
  const FactorGraph g = build_potts(3, 2, 1.0, 1.0, 1.0);
  std::vector<std::vector<int>> rebuilt(g.num_variables());
  for (std::size_t f = 0; f < g.num_factors(); ++f) {
    for (int i : g.factor(f).scope) rebuilt[i].push_back(static_cast<int>(f));
  }
  for (int i = 0; i < g.num_variables(); ++i) {
    CHECK(g.adjacent(i) == rebuilt[i]);
  }
}

TEST_CASE("factors respect their bounds on random states") {
  Rng rng(17);
  const FactorGraph models[] = {
      build_potts(4, 3, 2.0, 1.0, 1.0),
      build_continuous_spin(9, 1.5, kernel_weights(9, 1.0, 1.0)),
      build_toy("ising2x2"),
      build_toy("chain8"),
  };
  for (const auto& g : models) {
    for (int trial = 0; trial < 2000; ++trial) {
      const State x = random_state(g, rng);
      for (std::size_t f = 0; f < g.num_factors(); ++f) {
        const double v = g.factor_value(f, x);  // throws on violation
        CHECK(v >= 0.0);
        CHECK(v <= g.factor(f).bound * (1.0 + 1e-9) + 1e-9);
      }
    }
  }
}

TEST_CASE("summing local energies counts each factor |scope| times") {
  Rng rng(23);
  const FactorGraph g = build_potts(4, 3, 1.0, 1.2, 0.7);
  for (int trial = 0; trial < 50; ++trial) {
    const State x = random_state(g, rng);
    double local_sum = 0.0;
    for (int i = 0; i < g.num_variables(); ++i) local_sum += local_energy(g, i, x);
    double weighted = 0.0;
    for (std::size_t f = 0; f < g.num_factors(); ++f) {
      weighted += g.factor(f).scope.size() * g.factor_value(f, x);
    }
    CHECK(local_sum == doctest::Approx(weighted).epsilon(1e-9));
  }
}

TEST_CASE("eval counter counts every factor evaluation") {
  const FactorGraph g = build_toy("ising2x2");
  State x(4, 0.0);
  EvalCounter c;
  energy(g, x, &c);
  CHECK(c.evals == g.num_factors());
  local_energy(g, 0, x, &c);
  CHECK(c.evals == g.num_factors() + g.adjacent(0).size());
}
