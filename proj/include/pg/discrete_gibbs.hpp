#pragma once

#include "pg/aux_sampler.hpp"
#include "pg/factor_graph.hpp"
#include "pg/rng.hpp"

namespace pg {

struct StepReport {
  int variable = -1;
  long minibatch_size = 0;     // |S| (distinct factors with s_phi > 0)
  std::uint64_t factor_evals = 0;
  bool accepted = true;
  long trials = 1;  // rejection baseline: proposals until acceptance
};

// Plain single-site Gibbs by full conditional enumeration (discrete domains).
class DiscreteGibbs {
 public:
  explicit DiscreteGibbs(const FactorGraph& g, bool systematic_scan = false);

  StepReport step(State& x, Rng& rng);

 private:
  const FactorGraph* g_;
  bool systematic_;
  int scan_pos_ = 0;
  std::vector<double> cond_;
};

// Poisson-minibatched Gibbs: auxiliary counts over A[i], conditional from the
// minibatch energy, no correction step.
class PoissonGibbs {
 public:
  PoissonGibbs(const FactorGraph& g, const AuxTables& tables);

  StepReport step(State& x, Rng& rng);

 private:
  const FactorGraph* g_;
  const AuxTables* tables_;
  AuxAssignment aux_;
  std::vector<double> cond_;
};

// Samples an index from weights proportional to exp(u - max(u)).
int sample_softmax(const std::vector<double>& energies, Rng& rng);

}  // namespace pg
