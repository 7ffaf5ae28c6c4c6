#pragma once

#include <cstdint>
#include <vector>

#include "pg/alias.hpp"
#include "pg/factor_graph.hpp"
#include "pg/rng.hpp"

namespace pg {

struct MinibatchConfig {
  double lambda = 1.0;  // minibatch size parameter, > 0
};

// Sparse counts s_phi > 0 from one auxiliary resampling step. The dense
// scratch buffer is reused across calls when the caller reuses the object.
struct AuxAssignment {
  std::vector<int> factor_ids;
  std::vector<long> counts;

  std::size_t size() const { return factor_ids.size(); }
  void clear() {
    factor_ids.clear();
    counts.clear();
  }

  std::vector<long> dense_scratch;  // indexed by position within the table
};

// Precomputed per-variable tables for constant-time categorical draws over
// A[i] with weight lambda*M/L + M per factor.
class AuxTables {
 public:
  struct Table {
    double big_lambda = 0.0;          // Lambda_i = sum(lambda*M/L + M)
    std::vector<int> factor_ids;      // A[i]
    std::vector<double> rate_base;    // lambda*M_phi/L per factor
    AliasTable alias;
  };

  // Per-variable tables over A[i].
  AuxTables(const FactorGraph& g, MinibatchConfig cfg);

  // Single table over the whole factor set (Poisson-MH uses this).
  static AuxTables::Table global_table(const FactorGraph& g, MinibatchConfig cfg);

  const Table& table(int i) const { return tables_[i]; }
  double lambda() const { return lambda_; }
  double local_max_energy() const { return local_max_energy_; }

 private:
  static Table build_table(const FactorGraph& g, const std::vector<int>& factor_ids,
                           double lambda, double local_max);

  std::vector<Table> tables_;
  double lambda_ = 0.0;
  double local_max_energy_ = 0.0;
};

// Draws s_phi ~ Poisson(lambda*M_phi/L + phi(x)) for every factor in the
// table: one aggregated Poisson draw, then categorical thinning. phi(x) is
// evaluated once per categorical draw. Returns the aggregate draw count B.
long sample_aux(const FactorGraph& g, const AuxTables::Table& table,
                const State& x, Rng& rng, AuxAssignment& out,
                EvalCounter* c = nullptr);

// U_v = sum over stored factors of s_phi * log(1 + L/(lambda*M_phi) * phi(x'))
// where x' is x with variable i set to v. x is restored before returning.
double minibatch_energy(const FactorGraph& g, double lambda, double local_max,
                        int i, double v, State& x, const AuxAssignment& s,
                        EvalCounter* c = nullptr);

}  // namespace pg
