#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pg {

struct Domain {
  enum class Kind { Discrete, Continuous };

  Kind kind = Kind::Discrete;
  int labels = 0;     // discrete: number of labels D
  double lo = 0.0;    // continuous: interval [lo, hi]
  double hi = 0.0;

  static Domain discrete(int d) {
    if (d < 2) throw std::invalid_argument("discrete domain needs D >= 2");
    Domain dom;
    dom.kind = Kind::Discrete;
    dom.labels = d;
    return dom;
  }

  static Domain continuous(double a, double b) {
    if (!(a < b)) throw std::invalid_argument("continuous domain needs a < b");
    Domain dom;
    dom.kind = Kind::Continuous;
    dom.lo = a;
    dom.hi = b;
    return dom;
  }

  bool is_discrete() const { return kind == Kind::Discrete; }

  bool contains(double v) const {
    if (is_discrete()) {
      const int l = static_cast<int>(v);
      return l >= 0 && l < labels && static_cast<double>(l) == v;
    }
    return v >= lo && v <= hi;
  }
};

// Assignment to all variables. Discrete labels are stored as exact
// integer-valued doubles so one state type serves both domain kinds.
struct State {
  std::vector<double> values;

  State() = default;
  explicit State(std::size_t n, double v = 0.0) : values(n, v) {}

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  std::size_t size() const { return values.size(); }
};

struct Factor {
  std::string id;
  std::vector<int> scope;
  double bound = 0.0;  // M_phi: 0 <= eval(x) <= bound for all reachable x
  std::function<double(const State&)> eval;
};

struct EvalCounter {
  std::uint64_t evals = 0;
};

// Immutable factor graph with cached adjacency and graph statistics.
class FactorGraph {
 public:
  FactorGraph(int n, Domain domain, std::vector<Factor> factors);

  int num_variables() const { return n_; }
  const Domain& domain() const { return domain_; }
  const std::vector<Factor>& factors() const { return factors_; }
  const Factor& factor(std::size_t f) const { return factors_[f]; }
  std::size_t num_factors() const { return factors_.size(); }
  const std::vector<int>& adjacent(int i) const { return adjacency_[i]; }

  // L: max over variables of the summed factor bounds touching it
  double local_max_energy() const { return local_max_energy_; }
  // Psi: sum of all factor bounds
  double total_max_energy() const { return total_max_energy_; }
  // Delta: maximum variable degree
  int max_degree() const { return max_degree_; }

  // Evaluates factor f at x, enforcing 0 <= value <= M_phi.
  double factor_value(std::size_t f, const State& x, EvalCounter* c = nullptr) const {
    if (c) ++c->evals;
    const Factor& phi = factors_[f];
    const double v = phi.eval(x);
    const double tol = 1e-9 * (1.0 + phi.bound);
    if (!(v >= -tol && v <= phi.bound + tol)) {
      throw_bound_violation(f, v);
    }
    return v < 0.0 ? 0.0 : v;
  }

  bool contains(const State& x) const;

 private:
  [[noreturn]] void throw_bound_violation(std::size_t f, double v) const;

  int n_;
  Domain domain_;
  std::vector<Factor> factors_;
  std::vector<std::vector<int>> adjacency_;
  double local_max_energy_ = 0.0;
  double total_max_energy_ = 0.0;
  int max_degree_ = 0;
};

// U(x): sum over all factors.
double energy(const FactorGraph& g, const State& x, EvalCounter* c = nullptr);

// Sum over the factors adjacent to variable i.
double local_energy(const FactorGraph& g, int i, const State& x,
                    EvalCounter* c = nullptr);

}  // namespace pg
