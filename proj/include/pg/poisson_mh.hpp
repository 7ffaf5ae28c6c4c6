#pragma once

#include <functional>

#include "pg/aux_sampler.hpp"
#include "pg/discrete_gibbs.hpp"
#include "pg/factor_graph.hpp"
#include "pg/rng.hpp"

namespace pg {

struct ProposalKernel {
  std::function<void(const State& from, State& to, Rng& rng)> sample;
  // log q(to | from); may be empty when symmetric
  std::function<double(const State& from, const State& to)> log_density;
  bool symmetric = true;
};

// Uniform independent proposal over a discrete state space (resamples every
// variable uniformly).
ProposalKernel uniform_discrete_proposal(const FactorGraph& g);

// Symmetric Gaussian random walk; proposals outside the domain are rejected
// by the stepper.
ProposalKernel gaussian_walk_proposal(double stddev);

// Poisson-minibatched Metropolis-Hastings with graph-wide auxiliary counts.
class PoissonMH {
 public:
  PoissonMH(const FactorGraph& g, MinibatchConfig cfg, ProposalKernel proposal);

  StepReport step(State& x, Rng& rng);

 private:
  const FactorGraph* g_;
  double lambda_;
  double local_max_;
  AuxTables::Table table_;
  ProposalKernel proposal_;
  AuxAssignment aux_;
  State candidate_;
};

// Plain Metropolis-Hastings over the full energy; baseline for the minibatched
// variant's spectral-gap comparison.
class PlainMH {
 public:
  PlainMH(const FactorGraph& g, ProposalKernel proposal);

  StepReport step(State& x, Rng& rng);

 private:
  const FactorGraph* g_;
  ProposalKernel proposal_;
  State candidate_;
};

}  // namespace pg
