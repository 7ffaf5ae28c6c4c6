#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "pg/discrete_gibbs.hpp"
#include "pg/factor_graph.hpp"
#include "pg/rng.hpp"

namespace pg {

struct Matrix {
  int n = 0;
  std::vector<double> a;

  Matrix() = default;
  explicit Matrix(int size) : n(size), a(static_cast<std::size_t>(size) * size, 0.0) {}
  double& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  double at(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
};

// Enumeration of a small discrete joint state space (mixed-radix encoding).
class StateSpace {
 public:
  explicit StateSpace(const FactorGraph& g, std::size_t max_states = 4096);

  std::size_t size() const { return size_; }
  State decode(std::size_t idx) const;
  std::size_t encode(const State& x) const;

 private:
  int n_;
  int labels_;
  std::size_t size_;
};

// pi over the enumerated space, via softmax of the enumerated energies.
std::vector<double> exact_distribution(const FactorGraph& g);

// Exact one-step kernels for the non-minibatched baselines.
Matrix exact_gibbs_kernel(const FactorGraph& g);
Matrix exact_uniform_mh_kernel(const FactorGraph& g);

using Stepper = std::function<StepReport(State&, Rng&)>;
using StepperFactory = std::function<Stepper()>;

struct TransitionEstimate {
  Matrix t;
  Matrix stderr_;  // per-entry Monte Carlo standard errors
  std::uint64_t draws_per_state = 0;
};

// Monte Carlo estimate of the one-step transition matrix. Rows are estimated
// from independent streams keyed by (seed, row), so the result is identical
// for any worker count. parallel selects the OpenMP path.
TransitionEstimate estimate_transition_matrix(const FactorGraph& g,
                                              const StepperFactory& make_stepper,
                                              std::uint64_t draws_per_state,
                                              std::uint64_t seed,
                                              bool parallel = true);

// Detailed-balance residual max |pi(x)T(x,y) - pi(y)T(y,x)|; throws when the
// residual exceeds tol.
double reversibility_residual(const Matrix& t, const std::vector<double>& pi);

// 1 - second largest eigenvalue of the pi-symmetrized operator. Throws when
// the detailed-balance residual exceeds reversibility_tol (the matrix is
// additively symmetrized first, so MC noise within the tolerance is fine).
double spectral_gap(const Matrix& t, const std::vector<double>& pi,
                    double reversibility_tol);

// Eigenvalues of a symmetric matrix, descending (cyclic Jacobi).
std::vector<double> symmetric_eigenvalues(Matrix s);

struct Hist1D {
  double lo = 0.0, hi = 1.0;
  std::vector<std::uint64_t> counts;

  Hist1D() = default;
  Hist1D(double lo_, double hi_, int bins) : lo(lo_), hi(hi_), counts(bins, 0) {}
  void add(double v);
};

struct Hist2D {
  double lo = 0.0, hi = 1.0;
  int bins = 0;
  std::vector<std::uint64_t> counts;

  Hist2D() = default;
  Hist2D(double lo_, double hi_, int bins_)
      : lo(lo_), hi(hi_), bins(bins_), counts(static_cast<std::size_t>(bins_) * bins_, 0) {}
  void add(double v, double w);
};

// KL(p||q) + KL(q||p) over epsilon-smoothed normalized histograms.
double symmetric_kl(const std::vector<std::uint64_t>& p,
                    const std::vector<std::uint64_t>& q, double eps = 1e-9);

// Per-step accumulators for one chain.
struct ChainReport {
  std::uint64_t iterations = 0;
  std::uint64_t total_evals = 0;
  std::uint64_t accepted = 0;
  std::uint64_t total_batch = 0;
  std::uint64_t total_trials = 0;
  std::vector<std::vector<std::uint64_t>> label_counts;  // discrete marginals

  void init_discrete(int n, int labels);
  void observe(const StepReport& rep, const State& x);
  // mean over variables of || empirical marginal - Uniform(D) ||_2
  double marginal_error() const;
};

struct GapBoundResult {
  double gamma_plain = 0.0;
  double gamma_mini = 0.0;
  double bound_factor = 0.0;
  double sigma = 0.0;
  bool pass = false;
};

// Theorem-style gap comparison: gamma_mini >= bound_factor * gamma_plain - 5 sigma.
GapBoundResult check_gap_bound(const FactorGraph& g, const Matrix& plain_kernel,
                               const TransitionEstimate& mini,
                               double bound_factor);

struct BalanceResult {
  double max_residual = 0.0;
  double max_allowed = 0.0;  // 5 sigma, propagated per pair
  bool pass = false;
};

BalanceResult check_reversibility(const FactorGraph& g, const TransitionEstimate& est);

struct StationarityResult {
  double l1 = 0.0;
  double allowed = 0.0;
  bool pass = false;
};

StationarityResult check_stationarity(const FactorGraph& g,
                                      const TransitionEstimate& est);

}  // namespace pg
