#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "pg/diagnostics.hpp"
#include "pg/models.hpp"
#include "pg/poisson_mh.hpp"
#include "pg/rng.hpp"

using namespace pg;

namespace {

template <class Sampler>
std::vector<double> discrete_chain_histogram(const FactorGraph& g, Sampler& sampler,
                                             int iters, std::uint64_t seed) {
  const StateSpace space(g);
  std::vector<double> hist(space.size(), 0.0);
  State x(g.num_variables());
  Rng rng(seed);
  for (int it = 0; it < 1000; ++it) sampler.step(x, rng);
  for (int it = 0; it < iters; ++it) {
    sampler.step(x, rng);
    hist[space.encode(x)] += 1.0 / iters;
  }
  return hist;
}

double linf(const std::vector<double>& p, const std::vector<double>& q) {
  double worst = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    worst = std::max(worst, std::fabs(p[i] - q[i]));
  }
  return worst;
}

}  // namespace

TEST_CASE("plain MH with uniform proposals targets the enumerated law") {
  const FactorGraph g = build_toy("chain8");
  PlainMH sampler(g, uniform_discrete_proposal(g));
  const auto pi = exact_distribution(g);
  const auto hist = discrete_chain_histogram(g, sampler, 400000, 19);
  CHECK(linf(hist, pi) < 0.01);
}

TEST_CASE("minibatched MH is exact at any minibatch size") {
  const FactorGraph g = build_toy("chain8");
  const auto pi = exact_distribution(g);
  const double l = g.local_max_energy();
  for (double lambda : {2.0 * l, l * l, 10.0 * l * l}) {
    PoissonMH sampler(g, {lambda}, uniform_discrete_proposal(g));
    const auto hist = discrete_chain_histogram(
        g, sampler, 400000, static_cast<std::uint64_t>(lambda * 7) + 3);
    CAPTURE(lambda);
    CHECK(linf(hist, pi) < 0.01);
  }
}

TEST_CASE("minibatched MH on a lattice matches enumeration") {
  const FactorGraph g = build_toy("ising2x2");
  const auto pi = exact_distribution(g);
  const double l = g.local_max_energy();
  PoissonMH sampler(g, {l * l}, uniform_discrete_proposal(g));
  const auto hist = discrete_chain_histogram(g, sampler, 600000, 29);
  CHECK(linf(hist, pi) < 0.01);
}

TEST_CASE("constant energy means every in-domain proposal is accepted") {
  Factor f;
  f.id = "const";
  f.scope = {0};
  f.bound = 2.0;
  f.eval = [](const State&) { return 2.0; };
  FactorGraph g(1, Domain::discrete(4), {f});
  PoissonMH sampler(g, {8.0}, uniform_discrete_proposal(g));
  State x(1, 0.0);
  Rng rng(43);
  for (int it = 0; it < 3000; ++it) {
    CHECK(sampler.step(x, rng).accepted);
  }
}

TEST_CASE("random-walk proposals leaving the domain are rejected in place") {
  const FactorGraph g = build_toy("spin2");
  PoissonMH sampler(g, {8.0}, gaussian_walk_proposal(5.0));  // mostly out of range
  State x(2, 0.5);
  Rng rng(51);
  int rejected = 0;
  for (int it = 0; it < 5000; ++it) {
    const State before = x;
    const StepReport rep = sampler.step(x, rng);
    if (!rep.accepted) {
      ++rejected;
      CHECK(x[0] == before[0]);
      CHECK(x[1] == before[1]);
    }
    CHECK(g.contains(x));
  }
  CHECK(rejected > 2500);
}

TEST_CASE("continuous random walk reproduces the pair marginal") {
  // pi(x1, x2) ~ exp(x1 x2) on [0,1]^2; marginal ~ (e^x - 1)/x
  const FactorGraph g = build_toy("spin2");
  const double l = g.local_max_energy();
  PoissonMH sampler(g, {l * l}, gaussian_walk_proposal(0.3));
  State x(2, 0.5);
  Rng rng(61);
  const int n = 400000;
  const int bins = 8;
  std::vector<double> hist(bins, 0.0);
  for (int it = 0; it < 2000; ++it) sampler.step(x, rng);
  for (int it = 0; it < n; ++it) {
    sampler.step(x, rng);
    int b = static_cast<int>(x[0] * bins);
    if (b == bins) --b;
    hist[b] += 1.0 / n;
  }
  auto marginal = [](double v) { return v < 1e-8 ? 1.0 : (std::exp(v) - 1.0) / v; };
  double z = 0.0;
  std::vector<double> oracle(bins, 0.0);
  for (int b = 0; b < bins; ++b) {
    const int cells = 64;
    for (int c = 0; c < cells; ++c) {
      const double a = (b + c / double(cells)) / bins;
      const double e = (b + (c + 1) / double(cells)) / bins;
      oracle[b] += (e - a) * marginal(0.5 * (a + e));
    }
    z += oracle[b];
  }
  for (double& v : oracle) v /= z;
  // random-walk chains decorrelate slowly; allow a few sigma of drift
  CHECK(linf(hist, oracle) < 0.02);
}

TEST_CASE("aux counts drive the reported minibatch size") {
  const FactorGraph g = build_potts(3, 3, 1.0, 1.0, 1.0);
  const double l = g.local_max_energy();
  const double lambda = l * l;
  PoissonMH sampler(g, {lambda}, uniform_discrete_proposal(g));
  State x(g.num_variables());
  Rng rng(73);
  double mean_size = 0.0;
  const int n = 4000;
  for (int it = 0; it < n; ++it) {
    const StepReport rep = sampler.step(x, rng);
    CHECK(rep.minibatch_size >= 0);
    CHECK(rep.minibatch_size <= static_cast<long>(g.num_factors()));
    mean_size += rep.minibatch_size / double(n);
  }
  // expected total count over the graph-wide table is
  // lambda * Psi / L + U(x) <= lambda * Psi / L + Psi
  CHECK(mean_size > 0.0);
  CHECK(mean_size <= lambda * g.total_max_energy() / l + g.total_max_energy());
}
