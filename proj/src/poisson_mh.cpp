#include "pg/poisson_mh.hpp"

#include <cmath>
#include <stdexcept>

namespace pg {

ProposalKernel uniform_discrete_proposal(const FactorGraph& g) {
  if (!g.domain().is_discrete()) {
    throw std::invalid_argument("uniform_discrete_proposal needs a discrete domain");
  }
  const int d = g.domain().labels;
  ProposalKernel q;
  q.symmetric = true;
  q.sample = [d](const State& from, State& to, Rng& rng) {
    to.values.resize(from.size());
    for (std::size_t i = 0; i < from.size(); ++i) {
      to[i] = static_cast<double>(rng.uniform_int(d));
    }
  };
  return q;
}

ProposalKernel gaussian_walk_proposal(double stddev) {
  ProposalKernel q;
  q.symmetric = true;
  q.sample = [stddev](const State& from, State& to, Rng& rng) {
    to.values.resize(from.size());
    for (std::size_t i = 0; i < from.size(); ++i) {
      to[i] = from[i] + stddev * rng.normal();
    }
  };
  return q;
}

PoissonMH::PoissonMH(const FactorGraph& g, MinibatchConfig cfg, ProposalKernel proposal)
    : g_(&g),
      lambda_(cfg.lambda),
      local_max_(g.local_max_energy()),
      table_(AuxTables::global_table(g, cfg)),
      proposal_(std::move(proposal)) {}

StepReport PoissonMH::step(State& x, Rng& rng) {
  StepReport rep;
  EvalCounter counter;
  const long b = sample_aux(*g_, table_, x, rng, aux_, &counter);
  (void)b;
  rep.minibatch_size = static_cast<long>(aux_.size());

  proposal_.sample(x, candidate_, rng);
  if (!g_->contains(candidate_)) {
    // target density is zero outside the domain
    rep.accepted = false;
    rep.factor_evals = counter.evals;
    return rep;
  }

  double log_p = 0.0;
  for (std::size_t j = 0; j < aux_.size(); ++j) {
    const int f = aux_.factor_ids[j];
    const double m = g_->factor(f).bound;
    const double scale = local_max_ / (lambda_ * m);
    const double val_new = g_->factor_value(f, candidate_, &counter);
    const double val_cur = g_->factor_value(f, x, &counter);
    log_p += static_cast<double>(aux_.counts[j]) *
             (std::log1p(scale * val_new) - std::log1p(scale * val_cur));
  }
  if (!proposal_.symmetric) {
    if (!proposal_.log_density) {
      throw std::invalid_argument("asymmetric proposal needs a log density");
    }
    const double fwd = proposal_.log_density(x, candidate_);
    const double bwd = proposal_.log_density(candidate_, x);
    if (!std::isfinite(fwd) || !std::isfinite(bwd)) {
      throw std::runtime_error("non-finite proposal density");
    }
    log_p += bwd - fwd;
  }

  rep.accepted = std::log(std::max(rng.next_double(), 1e-300)) < log_p;
  if (rep.accepted) x.values = candidate_.values;
  rep.factor_evals = counter.evals;
  return rep;
}

PlainMH::PlainMH(const FactorGraph& g, ProposalKernel proposal)
    : g_(&g), proposal_(std::move(proposal)) {}

StepReport PlainMH::step(State& x, Rng& rng) {
  StepReport rep;
  EvalCounter counter;
  proposal_.sample(x, candidate_, rng);
  if (!g_->contains(candidate_)) {
    rep.accepted = false;
    return rep;
  }
  double log_p = energy(*g_, candidate_, &counter) - energy(*g_, x, &counter);
  if (!proposal_.symmetric) {
    log_p += proposal_.log_density(candidate_, x) - proposal_.log_density(x, candidate_);
  }
  rep.accepted = std::log(std::max(rng.next_double(), 1e-300)) < log_p;
  if (rep.accepted) x.values = candidate_.values;
  rep.factor_evals = counter.evals;
  return rep;
}

}  // namespace pg
