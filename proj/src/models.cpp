#include "pg/models.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pg/mixture_kernel.hpp"
#include "pg/rng.hpp"
#include <json.hpp>

namespace pg {

namespace {

// Per-observation extremes of the mixture exponent over the truncation box,
// taken on a 201 x 201 grid; shifts and bounds for both GMM builders.
struct GmmExtremes {
  std::vector<double> lo, hi;
};

GmmExtremes gmm_exponent_extremes(const std::vector<double>& observations,
                                  double sigma_y_sq, double bound) {
  const int grid = 200;
  const std::size_t n = observations.size();
  GmmExtremes e{std::vector<double>(n, 1e300), std::vector<double>(n, -1e300)};
  std::vector<double> buf(n);
  for (int r = 0; r <= grid; ++r) {
    const double x1 = -bound + 2.0 * bound * r / grid;
    for (int c = 0; c <= grid; ++c) {
      const double x2 = -bound + 2.0 * bound * c / grid;
      mixture_exponent_each(observations, x1, x2, sigma_y_sq, buf.data());
      for (std::size_t i = 0; i < n; ++i) {
        e.lo[i] = std::min(e.lo[i], buf[i]);
        e.hi[i] = std::max(e.hi[i], buf[i]);
      }
    }
  }
  return e;
}

std::vector<Factor> gmm_prior_factors(double sigma1_sq, double sigma2_sq,
                                      double bound) {
  std::vector<Factor> factors;
  {
    Factor f;
    f.id = "prior_x1";
    f.scope = {0};
    f.bound = bound * bound / (2.0 * sigma1_sq);
    const double s = 2.0 * sigma1_sq, b2 = bound * bound;
    f.eval = [s, b2](const State& x) { return (b2 - x[0] * x[0]) / s; };
    factors.push_back(std::move(f));
  }
  {
    Factor f;
    f.id = "prior_x2";
    f.scope = {1};
    f.bound = bound * bound / (2.0 * sigma2_sq);
    const double s = 2.0 * sigma2_sq, b2 = bound * bound;
    f.eval = [s, b2](const State& x) { return (b2 - x[1] * x[1]) / s; };
    factors.push_back(std::move(f));
  }
  return factors;
}

}  // namespace

FactorGraph build_potts(int side, int labels, double beta, double kernel_bandwidth,
                        double kernel_scale) {
  if (side < 2 || labels < 2 || !(beta > 0.0)) {
    throw std::invalid_argument("build_potts: need side >= 2, D >= 2, beta > 0");
  }
  const int n = side * side;
  std::vector<Factor> factors;
  for (int i = 0; i < n; ++i) {
    const double ri = i / side, ci = i % side;
    for (int j = i + 1; j < n; ++j) {
      const double rj = j / side, cj = j % side;
      const double d2 = (ri - rj) * (ri - rj) + (ci - cj) * (ci - cj);
      const double a_ij =
          kernel_scale * std::exp(-d2 / (2.0 * kernel_bandwidth * kernel_bandwidth));
      const double m = beta * a_ij;
      if (m < 1e-14) continue;
      Factor f;
      f.id = "potts_" + std::to_string(i) + "_" + std::to_string(j);
      f.scope = {i, j};
      f.bound = m;
      f.eval = [i, j, m](const State& x) { return x[i] == x[j] ? m : 0.0; };
      factors.push_back(std::move(f));
    }
  }
  return FactorGraph(n, Domain::discrete(labels), std::move(factors));
}

std::vector<std::vector<double>> kernel_weights(int n, double bandwidth, double scale) {
  const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
  const bool lattice = side * side == n;
  std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double d2;
      if (lattice) {
        const double dr = i / side - j / side, dc = i % side - j % side;
        d2 = dr * dr + dc * dc;
      } else {
        d2 = static_cast<double>(i - j) * (i - j);
      }
      w[i][j] = w[j][i] = scale * std::exp(-d2 / (2.0 * bandwidth * bandwidth));
    }
  }
  return w;
}

FactorGraph build_continuous_spin(int n, double beta,
                                  const std::vector<std::vector<double>>& weights) {
  if (n < 2 || !(beta > 0.0)) {
    throw std::invalid_argument("build_continuous_spin: need n >= 2, beta > 0");
  }
  if (static_cast<int>(weights.size()) != n) {
    throw std::invalid_argument("build_continuous_spin: weight matrix size mismatch");
  }
  std::vector<Factor> factors;
  for (int i = 0; i < n; ++i) {
    if (weights[i][i] != 0.0) {
      throw std::invalid_argument("build_continuous_spin: nonzero diagonal weight");
    }
    for (int j = i + 1; j < n; ++j) {
      if (weights[i][j] != weights[j][i] || weights[i][j] < 0.0) {
        throw std::invalid_argument("build_continuous_spin: weights must be "
                                    "symmetric and nonnegative");
      }
      const double c = beta * weights[i][j];
      if (c < 1e-14) continue;
      Factor f;
      f.id = "spin_" + std::to_string(i) + "_" + std::to_string(j);
      f.scope = {i, j};
      f.bound = 2.0 * c;  // x_i x_j + 1 in [1, 2] on [0,1]^2, kept unshifted
      f.eval = [i, j, c](const State& x) { return c * (x[i] * x[j] + 1.0); };
      factors.push_back(std::move(f));
    }
  }
  return FactorGraph(n, Domain::continuous(0.0, 1.0), std::move(factors));
}

std::vector<double> generate_gmm_observations(int n, std::uint64_t seed,
                                              double sigma_y_sq) {
  Rng rng(seed);
  const double sd = std::sqrt(sigma_y_sq);
  std::vector<double> y(n);
  for (int i = 0; i < n; ++i) {
    const double mean = rng.next_double() < 0.5 ? 0.0 : 1.0;  // true (x1,x2)=(0,1)
    y[i] = mean + sd * rng.normal();
  }
  return y;
}

FactorGraph build_truncated_gmm(const std::vector<double>& observations,
                                double sigma1_sq, double sigma2_sq,
                                double sigma_y_sq, double bound) {
  // N = 0 leaves just the truncated priors
  std::vector<Factor> factors = gmm_prior_factors(sigma1_sq, sigma2_sq, bound);
  // per-observation log-likelihood, shifted nonnegative via grid extremization
  const GmmExtremes ext = gmm_exponent_extremes(observations, sigma_y_sq, bound);
  const double inv2s = 1.0 / (2.0 * sigma_y_sq);
  for (std::size_t idx = 0; idx < observations.size(); ++idx) {
    const double y = observations[idx];
    const double range = ext.hi[idx] - ext.lo[idx];
    Factor f;
    f.id = "lik_" + std::to_string(idx);
    f.scope = {0, 1};
    f.bound = 1.02 * range;
    // 0.01 * range of slack against off-grid minima; the constant
    // log(0.5 / sqrt(2 pi s)) cancels against the shift
    const double base = 0.01 * range - ext.lo[idx];
    f.eval = [y, inv2s, base](const State& x) {
      const double a = -(y - x[0]) * (y - x[0]) * inv2s;
      const double b = -(y - x[0] - x[1]) * (y - x[0] - x[1]) * inv2s;
      const double hi2 = a > b ? a : b;
      const double lo2 = a > b ? b : a;
      return hi2 + std::log1p(std::exp(lo2 - hi2)) + base;
    };
    factors.push_back(std::move(f));
  }
  return FactorGraph(2, Domain::continuous(-bound, bound), std::move(factors));
}

FactorGraph build_truncated_gmm_collapsed(const std::vector<double>& observations,
                                          double sigma1_sq, double sigma2_sq,
                                          double sigma_y_sq, double bound) {
  std::vector<Factor> factors = gmm_prior_factors(sigma1_sq, sigma2_sq, bound);
  if (!observations.empty()) {
    const GmmExtremes ext =
        gmm_exponent_extremes(observations, sigma_y_sq, bound);
    double base = 0.0, total = 0.0;
    for (std::size_t i = 0; i < observations.size(); ++i) {
      const double range = ext.hi[i] - ext.lo[i];
      base += 0.01 * range - ext.lo[i];
      total += 1.02 * range;
    }
    Factor f;
    f.id = "lik_sum";
    f.scope = {0, 1};
    f.bound = total;
    auto y = std::make_shared<std::vector<double>>(observations);
    f.eval = [y, sigma_y_sq, base](const State& x) {
      return mixture_exponent_sum(*y, x[0], x[1], sigma_y_sq) + base;
    };
    factors.push_back(std::move(f));
  }
  return FactorGraph(2, Domain::continuous(-bound, bound), std::move(factors));
}

FactorGraph build_toy(const std::string& name) {
  if (name == "ising2x2") {
    // 2x2 lattice, D = 2, unit nearest-neighbor couplings
    std::vector<Factor> factors;
    const int edges[4][2] = {{0, 1}, {0, 2}, {1, 3}, {2, 3}};
    for (const auto& e : edges) {
      Factor f;
      const int i = e[0], j = e[1];
      f.id = "edge_" + std::to_string(i) + "_" + std::to_string(j);
      f.scope = {i, j};
      f.bound = 1.0;
      f.eval = [i, j](const State& x) { return x[i] == x[j] ? 1.0 : 0.0; };
      factors.push_back(std::move(f));
    }
    return FactorGraph(4, Domain::discrete(2), std::move(factors));
  }
  if (name == "chain8") {
    // single 8-state variable with handcrafted energies
    static const std::vector<double> energies = {0.0, 0.4, 0.9, 0.2,
                                                 1.1, 0.5, 0.8, 0.3};
    Factor f;
    f.id = "chain8";
    f.scope = {0};
    f.bound = 1.1;
    f.eval = [](const State& x) { return energies[static_cast<int>(x[0])]; };
    return FactorGraph(1, Domain::discrete(8), {std::move(f)});
  }
  if (name == "uniform1") {
    return FactorGraph(1, Domain::discrete(4), {});
  }
  if (name == "spin2") {
    std::vector<std::vector<double>> w = {{0.0, 1.0}, {1.0, 0.0}};
    return build_continuous_spin(2, 1.0, w);
  }
  throw std::invalid_argument("unknown toy model: " + name);
}

std::string ModelSpec::to_json() const {
  nlohmann::json j;
  j["family"] = family;
  if (family == "potts") {
    j["side"] = side;
    j["labels"] = labels;
    j["beta"] = beta;
    j["kernel_bandwidth"] = kernel_bandwidth;
    j["kernel_scale"] = kernel_scale;
  } else if (family == "continuous_spin") {
    j["n"] = n;
    j["beta"] = beta;
    j["kernel_bandwidth"] = kernel_bandwidth;
    j["kernel_scale"] = kernel_scale;
  } else if (family == "gmm") {
    j["n_obs"] = n_obs;
    j["sigma1_sq"] = sigma1_sq;
    j["sigma2_sq"] = sigma2_sq;
    j["sigma_y_sq"] = sigma_y_sq;
    j["bound"] = bound;
    j["data_seed"] = data_seed;
  } else if (family == "toy") {
    j["name"] = toy_name;
  } else {
    throw std::invalid_argument("unknown model family: " + family);
  }
  return j.dump(2);
}

ModelSpec ModelSpec::from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  ModelSpec s;
  s.family = j.at("family").get<std::string>();
  auto get = [&j](const char* key, auto& out) {
    if (j.contains(key)) out = j.at(key).get<std::decay_t<decltype(out)>>();
  };
  get("side", s.side);
  get("labels", s.labels);
  get("beta", s.beta);
  get("kernel_bandwidth", s.kernel_bandwidth);
  get("kernel_scale", s.kernel_scale);
  get("n", s.n);
  get("n_obs", s.n_obs);
  get("sigma1_sq", s.sigma1_sq);
  get("sigma2_sq", s.sigma2_sq);
  get("sigma_y_sq", s.sigma_y_sq);
  get("bound", s.bound);
  get("data_seed", s.data_seed);
  get("name", s.toy_name);
  return s;
}

FactorGraph build_model(const ModelSpec& spec) {
  if (spec.family == "potts") {
    return build_potts(spec.side, spec.labels, spec.beta, spec.kernel_bandwidth,
                       spec.kernel_scale);
  }
  if (spec.family == "continuous_spin") {
    return build_continuous_spin(
        spec.n, spec.beta, kernel_weights(spec.n, spec.kernel_bandwidth, spec.kernel_scale));
  }
  if (spec.family == "gmm") {
    return build_truncated_gmm(
        generate_gmm_observations(spec.n_obs, spec.data_seed, spec.sigma_y_sq),
        spec.sigma1_sq, spec.sigma2_sq, spec.sigma_y_sq, spec.bound);
  }
  if (spec.family == "toy") {
    return build_toy(spec.toy_name);
  }
  throw std::invalid_argument("unknown model family: " + spec.family);
}

}  // namespace pg
