#include "pg/discrete_gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pg {

int sample_softmax(const std::vector<double>& energies, Rng& rng) {
  const double top = *std::max_element(energies.begin(), energies.end());
  double total = 0.0;
  for (double u : energies) total += std::exp(u - top);
  const double target = rng.next_double() * total;
  double cum = 0.0;
  for (std::size_t v = 0; v < energies.size(); ++v) {
    cum += std::exp(energies[v] - top);
    if (target < cum) return static_cast<int>(v);
  }
  return static_cast<int>(energies.size()) - 1;
}

DiscreteGibbs::DiscreteGibbs(const FactorGraph& g, bool systematic_scan)
    : g_(&g), systematic_(systematic_scan) {
  if (!g.domain().is_discrete()) {
    throw std::invalid_argument("DiscreteGibbs needs a discrete domain");
  }
  cond_.resize(g.domain().labels);
}

StepReport DiscreteGibbs::step(State& x, Rng& rng) {
  StepReport rep;
  const int i = systematic_ ? scan_pos_
                            : static_cast<int>(rng.uniform_int(g_->num_variables()));
  if (systematic_) scan_pos_ = (scan_pos_ + 1) % g_->num_variables();
  rep.variable = i;

  EvalCounter counter;
  const double old = x[i];
  const int d = g_->domain().labels;
  for (int v = 0; v < d; ++v) {
    x[i] = v;
    cond_[v] = local_energy(*g_, i, x, &counter);
  }
  x[i] = old;
  x[i] = sample_softmax(cond_, rng);
  rep.factor_evals = counter.evals;
  return rep;
}

PoissonGibbs::PoissonGibbs(const FactorGraph& g, const AuxTables& tables)
    : g_(&g), tables_(&tables) {
  if (!g.domain().is_discrete()) {
    throw std::invalid_argument("PoissonGibbs needs a discrete domain");
  }
  cond_.resize(g.domain().labels);
}

StepReport PoissonGibbs::step(State& x, Rng& rng) {
  StepReport rep;
  const int i = static_cast<int>(rng.uniform_int(g_->num_variables()));
  rep.variable = i;

  EvalCounter counter;
  sample_aux(*g_, tables_->table(i), x, rng, aux_, &counter);
  rep.minibatch_size = static_cast<long>(aux_.size());

  const int d = g_->domain().labels;
  for (int v = 0; v < d; ++v) {
    cond_[v] = minibatch_energy(*g_, tables_->lambda(), tables_->local_max_energy(),
                                i, v, x, aux_, &counter);
  }
  x[i] = sample_softmax(cond_, rng);
  rep.factor_evals = counter.evals;
  return rep;
}

}  // namespace pg
