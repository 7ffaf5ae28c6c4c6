// Compares the OpenMP transition-estimation path against the serial reference
// and reports wall times. Results must match bitwise: rows use independent
// (seed, row) rng streams, so scheduling cannot change the estimate.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "pg/diagnostics.hpp"
#include "pg/discrete_gibbs.hpp"
#include "pg/models.hpp"

using namespace pg;

namespace {

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

StepperFactory factory_for(const FactorGraph& g, const AuxTables* tables) {
  if (tables) {
    return [&g, tables]() {
      auto s = std::make_shared<PoissonGibbs>(g, *tables);
      return Stepper([s](State& x, Rng& r) { return s->step(x, r); });
    };
  }
  return [&g]() {
    auto s = std::make_shared<DiscreteGibbs>(g);
    return Stepper([s](State& x, Rng& r) { return s->step(x, r); });
  };
}

void bench(const char* label, const FactorGraph& g, const StepperFactory& f,
           std::uint64_t draws, std::uint64_t seed) {
  const double t0 = now_seconds();
  const TransitionEstimate serial = estimate_transition_matrix(g, f, draws, seed, false);
  const double t1 = now_seconds();
  const TransitionEstimate parallel = estimate_transition_matrix(g, f, draws, seed, true);
  const double t2 = now_seconds();
  const bool identical = serial.t.a == parallel.t.a;
  std::printf("%-24s draws/state=%-8llu serial=%8.3fs parallel=%8.3fs "
              "speedup=%5.2fx identical=%s\n",
              label, static_cast<unsigned long long>(draws), t1 - t0, t2 - t1,
              (t1 - t0) / std::max(t2 - t1, 1e-9), identical ? "yes" : "NO");
  if (!identical) std::exit(1);
}

}  // namespace

int main(int argc, char** argv) {
  std::uint64_t draws = 20000;
  if (argc > 1) draws = std::strtoull(argv[1], nullptr, 10);
#ifdef _OPENMP
  if (const char* env = std::getenv("POISSON_GIBBS_THREADS")) {
    const int t = std::atoi(env);
    if (t > 0) omp_set_num_threads(t);
  }
  std::printf("openmp: up to %d thread(s)\n", omp_get_max_threads());
#else
  std::printf("openmp: compiled out; both paths run serially\n");
#endif

  const FactorGraph ising = build_toy("ising2x2");
  bench("gibbs/ising2x2", ising, factory_for(ising, nullptr), draws, 7);

  const double l = ising.local_max_energy();
  const AuxTables tables(ising, {l * l});
  bench("poisson-gibbs/ising2x2", ising, factory_for(ising, &tables), draws, 7);

  const FactorGraph potts = build_potts(3, 2, 1.0, 1.0, 1.0);  // 512 joint states
  const AuxTables ptables(potts, {potts.local_max_energy() * potts.local_max_energy()});
  bench("poisson-gibbs/potts3x3", potts, factory_for(potts, &ptables), draws / 4, 11);
  return 0;
}
