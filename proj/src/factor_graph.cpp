#include "pg/factor_graph.hpp"

#include <algorithm>
#include <utility>

namespace pg {

FactorGraph::FactorGraph(int n, Domain domain, std::vector<Factor> factors)
    : n_(n), domain_(domain), factors_(std::move(factors)) {
  if (n_ <= 0) throw std::invalid_argument("FactorGraph: need at least one variable");
  adjacency_.resize(n_);
  for (std::size_t f = 0; f < factors_.size(); ++f) {
    const Factor& phi = factors_[f];
    if (phi.bound < 0.0) {
      throw std::invalid_argument("FactorGraph: negative bound on factor " + phi.id);
    }
    if (!phi.eval) {
      throw std::invalid_argument("FactorGraph: factor " + phi.id + " has no eval");
    }
    for (int i : phi.scope) {
      if (i < 0 || i >= n_) {
        throw std::invalid_argument("FactorGraph: scope out of range on factor " + phi.id);
      }
      adjacency_[i].push_back(static_cast<int>(f));
    }
    total_max_energy_ += phi.bound;
  }
  for (int i = 0; i < n_; ++i) {
    double row = 0.0;
    for (int f : adjacency_[i]) row += factors_[f].bound;
    local_max_energy_ = std::max(local_max_energy_, row);
    max_degree_ = std::max(max_degree_, static_cast<int>(adjacency_[i].size()));
  }
}

bool FactorGraph::contains(const State& x) const {
  if (static_cast<int>(x.size()) != n_) return false;
  for (double v : x.values) {
    if (!domain_.contains(v)) return false;
  }
  return true;
}

void FactorGraph::throw_bound_violation(std::size_t f, double v) const {
  throw std::runtime_error("factor " + factors_[f].id + " evaluated to " +
                           std::to_string(v) + ", outside [0, " +
                           std::to_string(factors_[f].bound) + "]");
}

double energy(const FactorGraph& g, const State& x, EvalCounter* c) {
  double u = 0.0;
  for (std::size_t f = 0; f < g.num_factors(); ++f) {
    u += g.factor_value(f, x, c);
  }
  return u;
}

double local_energy(const FactorGraph& g, int i, const State& x, EvalCounter* c) {
  double u = 0.0;
  for (int f : g.adjacent(i)) {
    u += g.factor_value(static_cast<std::size_t>(f), x, c);
  }
  return u;
}

}  // namespace pg
