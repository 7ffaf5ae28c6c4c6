#pragma once

#include <memory>
#include <string>
#include <vector>

#include "pg/factor_graph.hpp"

namespace pg {

// Parameters for the built-in model families; serializable to/from JSON.
struct ModelSpec {
  std::string family;  // "potts" | "continuous_spin" | "gmm" | "toy"

  // potts
  int side = 6;
  int labels = 4;
  double beta = 1.0;
  double kernel_bandwidth = 1.0;
  double kernel_scale = 1.0;

  // continuous_spin
  int n = 16;

  // gmm
  int n_obs = 1000;
  double sigma1_sq = 10.0;
  double sigma2_sq = 1.0;
  double sigma_y_sq = 2.0;
  double bound = 6.0;
  std::uint64_t data_seed = 20190813;

  // toy
  std::string toy_name;

  std::string to_json() const;
  static ModelSpec from_json(const std::string& text);
};

// Fully connected D-state Potts on a side x side lattice, pairwise
// interaction beta * A_ij * delta(x_i, x_j) with Gaussian-kernel weights
// A_ij = scale * exp(-d(i,j)^2 / (2 bandwidth^2)) and zero diagonal.
FactorGraph build_potts(int side, int labels, double beta, double kernel_bandwidth,
                        double kernel_scale);

// Continuous spins on [0, 1], pairwise energy beta * A_ij * (x_i x_j + 1),
// bound M = 2 beta A_ij (factors are kept unshifted).
FactorGraph build_continuous_spin(int n, double beta,
                                  const std::vector<std::vector<double>>& weights);

// Kernel-weighted fully connected weights on a lattice (or line when n is not
// a perfect square); reused by the continuous spin family.
std::vector<std::vector<double>> kernel_weights(int n, double bandwidth, double scale);

// Truncated tied-means Gaussian mixture posterior over (x_1, x_2) in
// [-bound, bound]^2: two prior factors plus one factor per observation, each
// shifted to be nonnegative over the box.
FactorGraph build_truncated_gmm(const std::vector<double>& observations,
                                double sigma1_sq, double sigma2_sq,
                                double sigma_y_sq, double bound = 6.0);

// Same distribution as build_truncated_gmm, but with every observation fused
// into a single likelihood factor whose evaluation is one pass over the data.
// No use for minibatching (one huge bound), but full-conditional evaluations
// are ~20x cheaper, which is what a long exact reference chain wants.
FactorGraph build_truncated_gmm_collapsed(const std::vector<double>& observations,
                                          double sigma1_sq, double sigma2_sq,
                                          double sigma_y_sq, double bound = 6.0);

// Observations from the generative model with true (x1, x2) = (0, 1).
std::vector<double> generate_gmm_observations(int n, std::uint64_t seed,
                                              double sigma_y_sq);

// Tiny oracle-friendly instances: "ising2x2", "chain8", "uniform1", "spin2".
FactorGraph build_toy(const std::string& name);

FactorGraph build_model(const ModelSpec& spec);

}  // namespace pg
