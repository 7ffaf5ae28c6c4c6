#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "pg/diagnostics.hpp"
#include "pg/factor_graph.hpp"
#include "pg/models.hpp"
#include "pg/rng.hpp"

using namespace pg;

namespace {

// Potts energy recomputed from the definition, independent of the factor list.
double potts_energy_oracle(int side, double beta, double bw, double scale,
                           const State& x) {
  const int n = side * side;
  double u = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (x[i] != x[j]) continue;
      const double dr = i / side - j / side;
      const double dc = i % side - j % side;
      u += beta * scale * std::exp(-(dr * dr + dc * dc) / (2.0 * bw * bw));
    }
  }
  return u;
}

double mixture_loglik_oracle(double y, double x1, double x2, double syq) {
  const double c = 1.0 / std::sqrt(2.0 * M_PI * syq);
  const double p = 0.5 * c * std::exp(-(y - x1) * (y - x1) / (2.0 * syq)) +
                   0.5 * c * std::exp(-(y - x1 - x2) * (y - x1 - x2) / (2.0 * syq));
  return std::log(p);
}

}  // namespace

TEST_CASE("potts energy matches the definition on random states") {
  const int side = 4, labels = 3;
  const double beta = 1.3, bw = 0.9, scale = 0.8;
  const FactorGraph g = build_potts(side, labels, beta, bw, scale);
  CHECK(g.num_variables() == 16);
  CHECK(g.domain().labels == labels);
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    State x(16);
    for (int i = 0; i < 16; ++i) x[i] = rng.uniform_int(labels);
    CHECK(energy(g, x) ==
          doctest::Approx(potts_energy_oracle(side, beta, bw, scale, x)).epsilon(1e-10));
  }
}

TEST_CASE("potts energy is invariant under a global label permutation") {
  const FactorGraph g = build_potts(3, 4, 1.0, 1.0, 1.0);
  Rng rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    State x(9), y(9);
    for (int i = 0; i < 9; ++i) {
      x[i] = rng.uniform_int(4);
      y[i] = std::fmod(x[i] + 1.0, 4.0);  // cyclic relabeling
    }
    CHECK(energy(g, x) == doctest::Approx(energy(g, y)));
  }
}

TEST_CASE("kernel weights: symmetric, zero diagonal, distance-decaying") {
  const auto w = kernel_weights(9, 1.0, 2.0);
  for (int i = 0; i < 9; ++i) {
    CHECK(w[i][i] == 0.0);
    for (int j = 0; j < 9; ++j) CHECK(w[i][j] == w[j][i]);
  }
  // lattice layout: adjacent cells (0,1) are closer than opposite corners (0,8)
  CHECK(w[0][1] == doctest::Approx(2.0 * std::exp(-0.5)));
  CHECK(w[0][8] == doctest::Approx(2.0 * std::exp(-4.0)));
  // non-square n falls back to a line graph
  const auto line = kernel_weights(5, 1.0, 1.0);
  CHECK(line[0][4] == doctest::Approx(std::exp(-8.0)));
}

TEST_CASE("continuous spin energy at hand-picked states") {
  const FactorGraph g = build_toy("spin2");
  State x(2);
  x[0] = 1.0;
  x[1] = 1.0;
  CHECK(energy(g, x) == doctest::Approx(2.0));
  x[1] = 0.0;
  CHECK(energy(g, x) == doctest::Approx(1.0));
  CHECK(g.local_max_energy() == doctest::Approx(2.0));
}

TEST_CASE("continuous spin rejects malformed weight matrices") {
  std::vector<std::vector<double>> asym = {{0.0, 1.0}, {0.5, 0.0}};
  CHECK_THROWS_AS(build_continuous_spin(2, 1.0, asym), std::invalid_argument);
  std::vector<std::vector<double>> diag = {{0.5, 1.0}, {1.0, 0.0}};
  CHECK_THROWS_AS(build_continuous_spin(2, 1.0, diag), std::invalid_argument);
}

TEST_CASE("gmm observations are deterministic and centered on the modes") {
  const auto y1 = generate_gmm_observations(5000, 99, 2.0);
  const auto y2 = generate_gmm_observations(5000, 99, 2.0);
  CHECK(y1 == y2);
  const auto y3 = generate_gmm_observations(5000, 100, 2.0);
  CHECK(y1 != y3);
  double mean = 0.0;
  for (double v : y1) mean += v / y1.size();
  // half the draws come from mean 0 and half from mean 1
  CHECK(mean == doctest::Approx(0.5).epsilon(0.15));
}

TEST_CASE("gmm priors carry the exact truncated-gaussian energies") {
  const FactorGraph g = build_truncated_gmm({}, 10.0, 1.0, 2.0, 6.0);
  CHECK(g.num_factors() == 2);  // no observations: just the priors
  State x(2);
  x[0] = 2.0;
  x[1] = -3.0;
  // (bound^2 - x^2) / (2 sigma^2)
  CHECK(g.factor_value(0, x) == doctest::Approx((36.0 - 4.0) / 20.0));
  CHECK(g.factor_value(1, x) == doctest::Approx((36.0 - 9.0) / 2.0));
  CHECK(g.factor(0).bound == doctest::Approx(36.0 / 20.0));
  CHECK(g.factor(1).bound == doctest::Approx(36.0 / 2.0));
}

TEST_CASE("gmm likelihood factors: differences match the raw log-likelihood") {
  // the per-factor shift cancels in differences
  const std::vector<double> obs = {0.3, -1.2, 2.4};
  const FactorGraph g = build_truncated_gmm(obs, 10.0, 1.0, 2.0, 6.0);
  REQUIRE(g.num_factors() == 5);
  State a(2), b(2);
  a[0] = 0.1;
  a[1] = 1.2;
  b[0] = -2.0;
  b[1] = 3.5;
  for (std::size_t f = 2; f < 5; ++f) {
    const double y = obs[f - 2];
    const double got = g.factor_value(f, a) - g.factor_value(f, b);
    const double want = mixture_loglik_oracle(y, a[0], a[1], 2.0) -
                        mixture_loglik_oracle(y, b[0], b[1], 2.0);
    CHECK(got == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("gmm factor bounds are tight but never violated") {
  const std::vector<double> obs = {0.0, 1.0, -0.7};
  const FactorGraph g = build_truncated_gmm(obs, 10.0, 1.0, 2.0, 6.0);
  for (std::size_t f = 0; f < g.num_factors(); ++f) {
    double worst = 0.0;
    State x(2);
    const int grid = 61;  // offset from the builder's own extremization grid
    for (int r = 0; r <= grid; ++r) {
      x[0] = -6.0 + 12.0 * r / grid;
      for (int c = 0; c <= grid; ++c) {
        x[1] = -6.0 + 12.0 * c / grid;
        worst = std::max(worst, g.factor_value(f, x));  // throws if out of bounds
      }
    }
    CAPTURE(f);
    CHECK(worst <= g.factor(f).bound);
    CHECK(worst >= 0.9 * g.factor(f).bound);  // shift keeps the bound snug
  }
}

TEST_CASE("collapsed gmm matches the per-observation build everywhere") {
  const std::vector<double> obs = generate_gmm_observations(40, 9, 2.0);
  const FactorGraph full = build_truncated_gmm(obs, 10.0, 1.0, 2.0, 3.0);
  const FactorGraph fused = build_truncated_gmm_collapsed(obs, 10.0, 1.0, 2.0, 3.0);
  REQUIRE(fused.num_factors() == 3);
  CHECK(fused.local_max_energy() ==
        doctest::Approx(full.local_max_energy()).epsilon(1e-12));
  Rng rng(4);
  State x(2);
  for (int t = 0; t < 50; ++t) {
    x[0] = -3.0 + 6.0 * rng.next_double();
    x[1] = -3.0 + 6.0 * rng.next_double();
    CHECK(energy(fused, x) ==
          doctest::Approx(energy(full, x)).epsilon(1e-10));
  }
  CHECK(build_truncated_gmm_collapsed({}, 10.0, 1.0, 2.0, 3.0).num_factors() == 2);
}

TEST_CASE("toy models expose their documented oracles") {
  const FactorGraph chain = build_toy("chain8");
  const auto pi = exact_distribution(chain);
  const std::vector<double> u = {0.0, 0.4, 0.9, 0.2, 1.1, 0.5, 0.8, 0.3};
  double z = 0.0;
  for (double v : u) z += std::exp(v);
  for (int i = 0; i < 8; ++i) CHECK(pi[i] == doctest::Approx(std::exp(u[i]) / z));

  const FactorGraph uniform = build_toy("uniform1");
  CHECK(uniform.num_factors() == 0);
  CHECK(uniform.domain().labels == 4);

  const FactorGraph ising = build_toy("ising2x2");
  CHECK(ising.num_factors() == 4);
  CHECK(ising.local_max_energy() == doctest::Approx(2.0));

  CHECK_THROWS_AS(build_toy("nope"), std::invalid_argument);
}

TEST_CASE("model specs survive a JSON round trip") {
  ModelSpec s;
  s.family = "gmm";
  s.n_obs = 123;
  s.sigma1_sq = 7.5;
  s.sigma2_sq = 0.5;
  s.sigma_y_sq = 1.25;
  s.bound = 4.0;
  s.data_seed = 987654321;
  const ModelSpec r = ModelSpec::from_json(s.to_json());
  CHECK(r.family == s.family);
  CHECK(r.n_obs == s.n_obs);
  CHECK(r.sigma1_sq == s.sigma1_sq);
  CHECK(r.sigma2_sq == s.sigma2_sq);
  CHECK(r.sigma_y_sq == s.sigma_y_sq);
  CHECK(r.bound == s.bound);
  CHECK(r.data_seed == s.data_seed);

  ModelSpec p;
  p.family = "potts";
  p.side = 5;
  p.labels = 7;
  p.beta = 2.25;
  const ModelSpec q = ModelSpec::from_json(p.to_json());
  CHECK(q.side == 5);
  CHECK(q.labels == 7);
  CHECK(q.beta == 2.25);

  CHECK_THROWS(ModelSpec::from_json("{\"no_family\": 1}"));
}

TEST_CASE("build_model dispatches on the family name") {
  ModelSpec s;
  s.family = "toy";
  s.toy_name = "chain8";
  CHECK(build_model(s).num_factors() == 1);
  s.family = "potts";
  s.side = 3;
  s.labels = 2;
  CHECK(build_model(s).num_variables() == 9);
  s.family = "continuous_spin";
  s.n = 4;
  CHECK(!build_model(s).domain().is_discrete());
  s.family = "mystery";
  CHECK_THROWS_AS(build_model(s), std::invalid_argument);
}
