#pragma once

#include "pg/aux_sampler.hpp"
#include "pg/cheb.hpp"
#include "pg/discrete_gibbs.hpp"
#include "pg/factor_graph.hpp"
#include "pg/rng.hpp"

namespace pg {

enum class ContinuousKind {
  PGDA,      // minibatch energy, double Chebyshev approximation
  PGITS,     // minibatch energy, single approximation of its exponential
  GibbsDA,   // full local energy, double approximation
  GibbsITS,  // full local energy, single approximation
};

struct ContinuousConfig {
  int m = 16;                 // energy-interpolant degree
  int k = 64;                 // pdf-interpolant degree (DA variants)
  double floor_scale = 1e-12; // density clamp, relative to the max sampled pdf
};

// Single-site conditional sampler on a continuous domain: Chebyshev
// interpolation of the (minibatch or full) conditional energy, inverse
// transform sampling from the polynomial CDF, Metropolis-Hastings correction
// against the same interpolants.
class ContinuousGibbs {
 public:
  // tables may be null for the non-minibatched variants.
  ContinuousGibbs(const FactorGraph& g, ContinuousKind kind, ContinuousConfig cfg,
                  const AuxTables* tables = nullptr);

  StepReport step(State& x, Rng& rng);

 private:
  double conditional_energy(int i, double v, State& x, EvalCounter* c);

  const FactorGraph* g_;
  ContinuousKind kind_;
  ContinuousConfig cfg_;
  const AuxTables* tables_;
  AuxAssignment aux_;
  bool minibatched_;
};

// Rejection-sampling baseline: uniform proposals accepted with probability
// exp(U(v) - log_envelope). The envelope is validated on every draw.
class RejectionGibbs {
 public:
  RejectionGibbs(const FactorGraph& g, double log_envelope);

  StepReport step(State& x, Rng& rng);

 private:
  const FactorGraph* g_;
  double log_envelope_;
};

}  // namespace pg
