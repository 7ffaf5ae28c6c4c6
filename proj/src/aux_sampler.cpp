#include "pg/aux_sampler.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace pg {

AuxTables::Table AuxTables::build_table(const FactorGraph& g,
                                        const std::vector<int>& factor_ids,
                                        double lambda, double local_max) {
  Table t;
  t.factor_ids = factor_ids;
  if (factor_ids.empty()) return t;
  std::vector<double> weights(factor_ids.size());
  t.rate_base.resize(factor_ids.size());
  for (std::size_t j = 0; j < factor_ids.size(); ++j) {
    const double m = g.factor(factor_ids[j]).bound;
    t.rate_base[j] = lambda * m / local_max;
    weights[j] = t.rate_base[j] + m;
    t.big_lambda += weights[j];
  }
  t.alias = AliasTable(weights);
  return t;
}

AuxTables::AuxTables(const FactorGraph& g, MinibatchConfig cfg)
    : lambda_(cfg.lambda), local_max_energy_(g.local_max_energy()) {
  if (!(cfg.lambda > 0.0)) throw std::invalid_argument("minibatch lambda must be > 0");
  if (!(local_max_energy_ > 0.0)) {
    throw std::invalid_argument("degenerate model: local maximum energy is zero");
  }
  if (cfg.lambda < 2.0 * local_max_energy_) {
    std::cerr << "warning: lambda = " << cfg.lambda << " is below 2L = "
              << 2.0 * local_max_energy_
              << "; spectral-gap guarantees assume lambda >= 2L\n";
  }
  tables_.reserve(g.num_variables());
  for (int i = 0; i < g.num_variables(); ++i) {
    tables_.push_back(build_table(g, g.adjacent(i), lambda_, local_max_energy_));
  }
}

AuxTables::Table AuxTables::global_table(const FactorGraph& g, MinibatchConfig cfg) {
  const double local_max = g.local_max_energy();
  if (!(cfg.lambda > 0.0)) throw std::invalid_argument("minibatch lambda must be > 0");
  if (!(local_max > 0.0)) {
    throw std::invalid_argument("degenerate model: local maximum energy is zero");
  }
  std::vector<int> all(g.num_factors());
  for (std::size_t f = 0; f < g.num_factors(); ++f) all[f] = static_cast<int>(f);
  return build_table(g, all, cfg.lambda, local_max);
}

long sample_aux(const FactorGraph& g, const AuxTables::Table& table,
                const State& x, Rng& rng, AuxAssignment& out, EvalCounter* c) {
  out.clear();
  if (table.factor_ids.empty()) return 0;
  out.dense_scratch.assign(table.factor_ids.size(), 0);
  const long b = poisson(table.big_lambda, rng);
  for (long draw = 0; draw < b; ++draw) {
    const std::size_t j = table.alias.sample(rng);
    const double val = g.factor_value(table.factor_ids[j], x, c);
    const double base = table.rate_base[j];
    const double accept = (base + val) / (base + g.factor(table.factor_ids[j]).bound);
    if (rng.next_double() < accept) {
      ++out.dense_scratch[j];
    }
  }
  for (std::size_t j = 0; j < out.dense_scratch.size(); ++j) {
    if (out.dense_scratch[j] > 0) {
      out.factor_ids.push_back(table.factor_ids[j]);
      out.counts.push_back(out.dense_scratch[j]);
    }
  }
  return b;
}

double minibatch_energy(const FactorGraph& g, double lambda, double local_max,
                        int i, double v, State& x, const AuxAssignment& s,
                        EvalCounter* c) {
  const double old = x[i];
  x[i] = v;
  double u = 0.0;
  for (std::size_t j = 0; j < s.factor_ids.size(); ++j) {
    const int f = s.factor_ids[j];
    const double val = g.factor_value(f, x, c);
    const double arg = local_max * val / (lambda * g.factor(f).bound);
    if (!(arg >= 0.0)) {
      x[i] = old;
      throw std::runtime_error("minibatch_energy: negative log argument");
    }
    u += static_cast<double>(s.counts[j]) * std::log1p(arg);
  }
  x[i] = old;
  return u;
}

}  // namespace pg
