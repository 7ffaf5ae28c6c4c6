#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "pg/alias.hpp"
#include "pg/rng.hpp"

using namespace pg;

namespace {

double poisson_pmf(long k, double mean) {
  return std::exp(k * std::log(mean) - mean - std::lgamma(k + 1.0));
}

// chi-squared goodness of fit against the Poisson pmf, pooled tail
double poisson_chi2_stat(double mean, int samples, Rng& rng, int& dof) {
  const int kmax = static_cast<int>(mean + 8.0 * std::sqrt(mean) + 10.0);
  std::vector<long> counts(kmax + 1, 0);
  for (int i = 0; i < samples; ++i) {
    long k = poisson(mean, rng);
    if (k > kmax) k = kmax;
    ++counts[k];
  }
  double stat = 0.0;
  dof = -1;
  double tail_exp = 0.0;
  long tail_obs = 0;
  for (int k = 0; k <= kmax; ++k) {
    const double e = samples * poisson_pmf(k, mean);
    if (e < 5.0) {
      tail_exp += e;
      tail_obs += counts[k];
      continue;
    }
    stat += (counts[k] - e) * (counts[k] - e) / e;
    ++dof;
  }
  if (tail_exp > 0.0) {
    stat += (tail_obs - tail_exp) * (tail_obs - tail_exp) / tail_exp;
    ++dof;
  }
  return stat;
}

}  // namespace

TEST_CASE("streams are deterministic and distinct") {
  Rng a(42, 0), b(42, 0), c(42, 1);
  bool same = true, distinct = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    same = same && (x == b.next_u64());
    distinct = distinct || (x != c.next_u64());
  }
  CHECK(same);
  CHECK(distinct);
}

TEST_CASE("uniform_int covers the range evenly") {
  Rng rng(7);
  std::vector<int> counts(5, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[rng.uniform_int(5)];
  for (int c : counts) {
    CHECK(std::fabs(c - n / 5.0) < 5.0 * std::sqrt(n * 0.2 * 0.8));
  }
}

TEST_CASE("normal has expected moments") {
  Rng rng(11);
  double sum = 0.0, sum2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sum2 += z * z;
  }
  CHECK(std::fabs(sum / n) < 0.01);
  CHECK(std::fabs(sum2 / n - 1.0) < 0.02);
}

TEST_CASE("poisson matches its pmf in both regimes") {
  // chi-squared critical value ~ dof + 4*sqrt(2*dof) is far beyond p=0.001
  for (double mean : {0.5, 3.0, 12.0, 50.0, 300.0}) {
    Rng rng(static_cast<std::uint64_t>(mean * 1000) + 1);
    int dof = 0;
    const double stat = poisson_chi2_stat(mean, 200000, rng, dof);
    CAPTURE(mean);
    CHECK(stat < dof + 5.0 * std::sqrt(2.0 * dof) + 10.0);
  }
}

TEST_CASE("alias table reproduces its weights") {
  const std::vector<double> w = {0.1, 0.4, 0.0, 0.3, 0.2};
  AliasTable table(w);
  Rng rng(3);
  std::vector<long> counts(w.size(), 0);
  const int n = 400000;
  for (int i = 0; i < n; ++i) ++counts[table.sample(rng)];
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double p = counts[i] / static_cast<double>(n);
    CHECK(std::fabs(p - w[i]) < 5.0 * std::sqrt(0.25 / n) + 1e-12);
  }
  CHECK(counts[2] == 0);
}
