// Experiment runner: builds a model, runs sampling chains or a diagnostic
// check, and writes deterministic CSV/JSON outputs.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>
#include <json.hpp>

#include "pg/continuous_gibbs.hpp"
#include "pg/diagnostics.hpp"
#include "pg/discrete_gibbs.hpp"
#include "pg/models.hpp"
#include "pg/poisson_mh.hpp"
#include "pg/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pg;

namespace {

constexpr int kExitBadConfig = 1;
constexpr int kExitCheckFailed = 2;

struct RunConfig {
  std::string model = "toy:ising2x2";
  std::string sampler = "gibbs";
  double lambda = 0.0;       // absolute; 0 means "use lambda_mult * L^2"
  double lambda_mult = 1.0;
  int m = 16;
  int k = 64;
  long iters = 100000;
  int chains = 1;
  std::uint64_t seed = 1;
  std::string out = "pgrun_out";
  std::string check;         // empty = sampling run
  std::uint64_t draws = 200000;  // per-state draws for transition estimates
  double proposal_sd = 0.45;
  double envelope = 0.0;     // rejection log-envelope; 0 means "use L"
  long dump_every = 0;       // raw-sample dump period; 0 disables
  int tuples = 5;            // aux-marginal check tuples
  int bins = 50;

  // model parameter overrides
  int side = 6;
  int labels = 4;
  double beta = 1.0;
  double bandwidth = 1.0;
  double scale = 1.0;
  int n = 16;
  int n_obs = 1000;
  double bound = 3.0;
  std::uint64_t data_seed = 20190813;
};

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

bool sampler_is_minibatched(const std::string& s) {
  return s == "poisson-gibbs" || s == "pgits" || s == "pgda" || s == "poisson-mh";
}

bool sampler_is_continuous(const std::string& s) {
  return s == "pgits" || s == "pgda" || s == "gibbs-its" || s == "gibbs-da" ||
         s == "rejection";
}

ModelSpec model_spec_from_config(const RunConfig& cfg) {
  ModelSpec spec;
  if (cfg.model.rfind("toy:", 0) == 0) {
    spec.family = "toy";
    spec.toy_name = cfg.model.substr(4);
    return spec;
  }
  if (cfg.model.size() > 5 && cfg.model.substr(cfg.model.size() - 5) == ".json") {
    std::ifstream in(cfg.model);
    if (!in) throw std::invalid_argument("cannot open model file: " + cfg.model);
    std::stringstream ss;
    ss << in.rdbuf();
    return ModelSpec::from_json(ss.str());
  }
  if (cfg.model == "potts") {
    spec.family = "potts";
    spec.side = cfg.side;
    spec.labels = cfg.labels;
    spec.beta = cfg.beta;
    spec.kernel_bandwidth = cfg.bandwidth;
    spec.kernel_scale = cfg.scale;
    return spec;
  }
  if (cfg.model == "spin" || cfg.model == "continuous_spin") {
    spec.family = "continuous_spin";
    spec.n = cfg.n;
    spec.beta = cfg.beta;
    spec.kernel_bandwidth = cfg.bandwidth;
    spec.kernel_scale = cfg.scale;
    return spec;
  }
  if (cfg.model == "gmm") {
    spec.family = "gmm";
    spec.n_obs = cfg.n_obs;
    spec.bound = cfg.bound;
    spec.data_seed = cfg.data_seed;
    return spec;
  }
  throw std::invalid_argument("unknown model: " + cfg.model +
                              " (use potts, spin, gmm, toy:<name>, or a .json path)");
}

double resolve_lambda(const RunConfig& cfg, const FactorGraph& g) {
  if (cfg.lambda > 0.0) return cfg.lambda;
  const double l = g.local_max_energy();
  return cfg.lambda_mult * l * l;
}

// One stepper per chain; samplers carry per-chain scratch state.
StepperFactory make_stepper_factory(const RunConfig& cfg, const FactorGraph& g,
                                    const AuxTables* tables, double lambda) {
  const std::string& s = cfg.sampler;
  if (s == "gibbs") {
    if (!g.domain().is_discrete()) {
      throw std::invalid_argument("sampler 'gibbs' needs a discrete model");
    }
    return [&g]() {
      auto sampler = std::make_shared<DiscreteGibbs>(g);
      return Stepper([sampler](State& x, Rng& r) { return sampler->step(x, r); });
    };
  }
  if (s == "poisson-gibbs") {
    if (!g.domain().is_discrete()) {
      throw std::invalid_argument("sampler 'poisson-gibbs' needs a discrete model");
    }
    return [&g, tables]() {
      auto sampler = std::make_shared<PoissonGibbs>(g, *tables);
      return Stepper([sampler](State& x, Rng& r) { return sampler->step(x, r); });
    };
  }
  if (s == "pgits" || s == "pgda" || s == "gibbs-its" || s == "gibbs-da") {
    if (g.domain().is_discrete()) {
      // fail here, not inside the parallel chain loop
      throw std::invalid_argument("sampler '" + s + "' needs a continuous model");
    }
    const ContinuousKind kind = s == "pgits"  ? ContinuousKind::PGITS
                                : s == "pgda" ? ContinuousKind::PGDA
                                : s == "gibbs-its" ? ContinuousKind::GibbsITS
                                                   : ContinuousKind::GibbsDA;
    const ContinuousConfig ccfg{cfg.m, cfg.k, 1e-12};
    const AuxTables* t = sampler_is_minibatched(s) ? tables : nullptr;
    return [&g, kind, ccfg, t]() {
      auto sampler = std::make_shared<ContinuousGibbs>(g, kind, ccfg, t);
      return Stepper([sampler](State& x, Rng& r) { return sampler->step(x, r); });
    };
  }
  if (s == "rejection") {
    if (g.domain().is_discrete()) {
      throw std::invalid_argument("sampler 'rejection' needs a continuous model");
    }
    const double env = cfg.envelope > 0.0 ? cfg.envelope : g.local_max_energy();
    return [&g, env]() {
      auto sampler = std::make_shared<RejectionGibbs>(g, env);
      return Stepper([sampler](State& x, Rng& r) { return sampler->step(x, r); });
    };
  }
  if (s == "poisson-mh" || s == "mh") {
    ProposalKernel q = g.domain().is_discrete() ? uniform_discrete_proposal(g)
                                                : gaussian_walk_proposal(cfg.proposal_sd);
    if (s == "mh") {
      return [&g, q]() {
        auto sampler = std::make_shared<PlainMH>(g, q);
        return Stepper([sampler](State& x, Rng& r) { return sampler->step(x, r); });
      };
    }
    const MinibatchConfig mcfg{lambda};
    return [&g, q, mcfg]() {
      auto sampler = std::make_shared<PoissonMH>(g, mcfg, q);
      return Stepper([sampler](State& x, Rng& r) { return sampler->step(x, r); });
    };
  }
  throw std::invalid_argument("unknown sampler: " + s);
}

// ---------------------------------------------------------------------------
// sampling run

struct Snapshot {
  long iteration = 0;
  std::uint64_t evals = 0;
  std::uint64_t accepted = 0;
  std::vector<std::vector<std::uint64_t>> counts;  // variable x bin
};

struct ChainResult {
  std::vector<Snapshot> snaps;
};

int bin_of(const FactorGraph& g, double v, int bins) {
  if (g.domain().is_discrete()) return static_cast<int>(v);
  int b = static_cast<int>((v - g.domain().lo) /
                           (g.domain().hi - g.domain().lo) * bins);
  if (b < 0) b = 0;
  if (b >= bins) b = bins - 1;
  return b;
}

ChainResult run_one_chain(const RunConfig& cfg, const FactorGraph& g,
                          const StepperFactory& factory, int chain,
                          const std::vector<long>& boundaries,
                          std::ostream* dump) {
  const int nvar = g.num_variables();
  const int bins = g.domain().is_discrete() ? g.domain().labels : cfg.bins;
  ChainResult result;
  Stepper step = factory();
  Rng rng(cfg.seed, static_cast<std::uint64_t>(chain));
  State x(nvar);
  if (!g.domain().is_discrete()) {
    for (int i = 0; i < nvar; ++i) x[i] = 0.5 * (g.domain().lo + g.domain().hi);
  }
  std::vector<std::vector<std::uint64_t>> counts(
      nvar, std::vector<std::uint64_t>(bins, 0));
  std::uint64_t evals = 0, accepted = 0;
  std::size_t next = 0;
  for (long it = 1; it <= cfg.iters; ++it) {
    const StepReport rep = step(x, rng);
    evals += rep.factor_evals;
    accepted += rep.accepted ? 1 : 0;
    for (int i = 0; i < nvar; ++i) ++counts[i][bin_of(g, x[i], bins)];
    if (dump && cfg.dump_every > 0 && it % cfg.dump_every == 0) {
      *dump << it;
      for (int i = 0; i < nvar; ++i) *dump << ',' << fmt_double(x[i]);
      *dump << '\n';
    }
    if (next < boundaries.size() && it == boundaries[next]) {
      Snapshot snap;
      snap.iteration = it;
      snap.evals = evals;
      snap.accepted = accepted;
      snap.counts = counts;
      result.snaps.push_back(std::move(snap));
      ++next;
    }
  }
  return result;
}

double snapshot_metric(const FactorGraph& g, const Snapshot& snap) {
  // discrete: mean L2 distance of the per-variable marginals from uniform;
  // continuous: mean symmetric KL of the binned marginals against uniform
  double total = 0.0;
  for (const auto& row : snap.counts) {
    if (g.domain().is_discrete()) {
      std::uint64_t iter = 0;
      for (std::uint64_t c : row) iter += c;
      const double d = static_cast<double>(row.size());
      double err2 = 0.0;
      for (std::uint64_t c : row) {
        const double p = static_cast<double>(c) / static_cast<double>(iter);
        err2 += (p - 1.0 / d) * (p - 1.0 / d);
      }
      total += std::sqrt(err2);
    } else {
      const std::vector<std::uint64_t> flat(row.size(), 1);
      total += symmetric_kl(row, flat);
    }
  }
  return total / static_cast<double>(snap.counts.size());
}

void write_manifest(const RunConfig& cfg, const FactorGraph& g, double lambda,
                    const ModelSpec& spec, const fs::path& dir) {
  json j;
  j["model"] = cfg.model;
  j["model_spec"] = json::parse(spec.to_json());
  j["sampler"] = cfg.sampler;
  j["lambda"] = lambda;
  j["lambda_mult"] = cfg.lambda_mult;
  j["m"] = cfg.m;
  j["k"] = cfg.k;
  j["iters"] = cfg.iters;
  j["chains"] = cfg.chains;
  j["seed"] = cfg.seed;
  j["out"] = cfg.out;
  j["check"] = cfg.check;
  j["draws"] = cfg.draws;
  j["proposal_sd"] = cfg.proposal_sd;
  j["envelope"] = cfg.envelope;
  j["dump_every"] = cfg.dump_every;
  j["tuples"] = cfg.tuples;
  j["bins"] = cfg.bins;
  j["graph"]["variables"] = g.num_variables();
  j["graph"]["factors"] = g.num_factors();
  j["graph"]["local_max_energy"] = g.local_max_energy();
  j["graph"]["total_max_energy"] = g.total_max_energy();
  j["graph"]["max_degree"] = g.max_degree();
  std::string rev = "unknown";
  if (FILE* p = popen("git rev-parse HEAD 2>/dev/null", "r")) {
    char buf[64] = {0};
    if (fgets(buf, sizeof(buf), p)) {
      rev = buf;
      while (!rev.empty() && (rev.back() == '\n' || rev.back() == '\r')) rev.pop_back();
    }
    pclose(p);
  }
  j["git_revision"] = rev;
  std::ofstream out(dir / "manifest.json");
  out << j.dump(2) << '\n';
}

int run_sampling(const RunConfig& cfg, const FactorGraph& g, double lambda,
                 const ModelSpec& spec, const fs::path& dir) {
  const AuxTables* tables = nullptr;
  std::unique_ptr<AuxTables> owned;
  if (cfg.sampler == "poisson-gibbs" || cfg.sampler == "pgits" ||
      cfg.sampler == "pgda") {
    owned = std::make_unique<AuxTables>(g, MinibatchConfig{lambda});
    tables = owned.get();
  }
  const StepperFactory factory = make_stepper_factory(cfg, g, tables, lambda);

  const int snaps = static_cast<int>(std::min<long>(cfg.iters, 200));
  std::vector<long> boundaries(snaps);
  for (int j = 0; j < snaps; ++j) {
    boundaries[j] = cfg.iters * static_cast<long>(j + 1) / snaps;
  }

  std::ofstream dump;
  if (cfg.dump_every > 0) {
    dump.open(dir / "samples.csv");
    dump << "iteration";
    for (int i = 0; i < g.num_variables(); ++i) dump << ",x" << i;
    dump << '\n';
  }

  std::vector<ChainResult> results(cfg.chains);
#pragma omp parallel for schedule(dynamic) if (cfg.chains > 1)
  for (int c = 0; c < cfg.chains; ++c) {
    // raw samples come from chain 0 only so the dump is scheduling-independent
    results[c] = run_one_chain(cfg, g, factory, c, boundaries,
                               c == 0 && cfg.dump_every > 0 ? &dump : nullptr);
  }

  std::ofstream csv(dir / "metrics.csv");
  csv << "iteration,metric,cum_factor_evals,acceptance_rate\n";
  for (int j = 0; j < snaps; ++j) {
    Snapshot merged = results[0].snaps[j];
    for (int c = 1; c < cfg.chains; ++c) {
      const Snapshot& snap = results[c].snaps[j];
      merged.evals += snap.evals;
      merged.accepted += snap.accepted;
      for (std::size_t i = 0; i < merged.counts.size(); ++i) {
        for (std::size_t b = 0; b < merged.counts[i].size(); ++b) {
          merged.counts[i][b] += snap.counts[i][b];
        }
      }
    }
    const double metric = snapshot_metric(g, merged);
    const double acc = static_cast<double>(merged.accepted) /
                       (static_cast<double>(merged.iteration) * cfg.chains);
    csv << merged.iteration << ',' << fmt_double(metric) << ',' << merged.evals
        << ',' << fmt_double(acc) << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------------------
// diagnostic checks

// chi-squared critical value at p = 0.001 (Wilson-Hilferty approximation)
double chi2_crit_999(int dof) {
  const double z = 3.0902;  // standard normal quantile for 0.999
  const double d = static_cast<double>(dof);
  const double t = 1.0 - 2.0 / (9.0 * d) + z * std::sqrt(2.0 / (9.0 * d));
  return d * t * t * t;
}

bool check_aux_marginal(const RunConfig& cfg, const FactorGraph& g, double lambda,
                        std::ostream& out) {
  const AuxTables tables(g, {lambda});
  const double l = g.local_max_energy();
  bool all_pass = true;
  for (int t = 0; t < cfg.tuples; ++t) {
    Rng rng(cfg.seed, 1000 + static_cast<std::uint64_t>(t));
    const int i = static_cast<int>(rng.uniform_int(
        static_cast<std::uint64_t>(g.num_variables())));
    State x(g.num_variables());
    for (int v = 0; v < g.num_variables(); ++v) {
      x[v] = g.domain().is_discrete()
                 ? static_cast<double>(rng.uniform_int(g.domain().labels))
                 : rng.uniform(g.domain().lo, g.domain().hi);
    }
    const auto& table = tables.table(i);
    if (table.factor_ids.empty()) continue;
    const std::size_t pick = rng.uniform_int(table.factor_ids.size());
    const int fid = table.factor_ids[pick];
    const double rate = lambda * g.factor(fid).bound / l + g.factor_value(fid, x);

    AuxAssignment aux;
    const int kmax = static_cast<int>(rate + 8.0 * std::sqrt(rate) + 10.0);
    std::vector<std::uint64_t> hist(kmax + 1, 0);
    for (std::uint64_t d = 0; d < cfg.draws; ++d) {
      sample_aux(g, table, x, rng, aux);
      long got = 0;
      for (std::size_t j = 0; j < aux.size(); ++j) {
        if (aux.factor_ids[j] == fid) got = aux.counts[j];
      }
      ++hist[std::min<long>(got, kmax)];
    }
    double stat = 0.0, tail_e = 0.0;
    std::uint64_t tail_o = 0;
    int dof = -1;
    for (int kk = 0; kk <= kmax; ++kk) {
      const double e = static_cast<double>(cfg.draws) *
                       std::exp(kk * std::log(rate) - rate - std::lgamma(kk + 1.0));
      if (e < 5.0) {
        tail_e += e;
        tail_o += hist[kk];
        continue;
      }
      stat += (hist[kk] - e) * (hist[kk] - e) / e;
      ++dof;
    }
    if (tail_e > 0.0) {
      stat += (tail_o - tail_e) * (tail_o - tail_e) / tail_e;
      ++dof;
    }
    const double crit = chi2_crit_999(std::max(dof, 1));
    const bool pass = stat < crit;
    all_pass = all_pass && pass;
    out << (pass ? "PASS" : "FAIL") << " aux-marginal tuple=" << t
        << " variable=" << i << " factor=" << g.factor(fid).id
        << " rate=" << fmt_double(rate) << " chi2=" << fmt_double(stat)
        << " crit=" << fmt_double(crit) << " dof=" << dof << '\n';
  }
  return all_pass;
}

bool run_check(const RunConfig& cfg, const FactorGraph& g, double lambda,
               std::ostream& out) {
  if (cfg.check == "aux-marginal") {
    return check_aux_marginal(cfg, g, lambda, out);
  }

  if (!g.domain().is_discrete()) {
    throw std::invalid_argument("check '" + cfg.check +
                                "' needs an enumerable discrete model");
  }
  std::unique_ptr<AuxTables> owned;
  const AuxTables* tables = nullptr;
  if (cfg.sampler == "poisson-gibbs") {
    owned = std::make_unique<AuxTables>(g, MinibatchConfig{lambda});
    tables = owned.get();
  }
  const StepperFactory factory = make_stepper_factory(cfg, g, tables, lambda);
  const TransitionEstimate est =
      estimate_transition_matrix(g, factory, cfg.draws, cfg.seed);

  if (cfg.check == "gap-bound") {
    Matrix plain;
    double factor;
    const double l = g.local_max_energy();
    if (cfg.sampler == "poisson-gibbs") {
      plain = exact_gibbs_kernel(g);
      factor = std::exp(-4.0 * l * l / lambda);
    } else if (cfg.sampler == "poisson-mh") {
      plain = exact_uniform_mh_kernel(g);
      factor = 0.5 * std::exp(-l * l / (lambda + l));
    } else {
      throw std::invalid_argument(
          "gap-bound check supports poisson-gibbs and poisson-mh");
    }
    const GapBoundResult r = check_gap_bound(g, plain, est, factor);
    out << (r.pass ? "PASS" : "FAIL") << " gap-bound sampler=" << cfg.sampler
        << " lambda=" << fmt_double(lambda)
        << " gamma=" << fmt_double(r.gamma_plain)
        << " gamma_mini=" << fmt_double(r.gamma_mini)
        << " bound=" << fmt_double(r.bound_factor * r.gamma_plain)
        << " sigma=" << fmt_double(r.sigma) << '\n';
    return r.pass;
  }
  if (cfg.check == "reversibility") {
    const BalanceResult r = check_reversibility(g, est);
    out << (r.pass ? "PASS" : "FAIL") << " reversibility sampler=" << cfg.sampler
        << " lambda=" << fmt_double(lambda)
        << " max_residual=" << fmt_double(r.max_residual)
        << " max_allowed=" << fmt_double(r.max_allowed) << '\n';
    return r.pass;
  }
  if (cfg.check == "stationarity") {
    const StationarityResult r = check_stationarity(g, est);
    out << (r.pass ? "PASS" : "FAIL") << " stationarity sampler=" << cfg.sampler
        << " lambda=" << fmt_double(lambda) << " l1=" << fmt_double(r.l1)
        << " allowed=" << fmt_double(r.allowed) << '\n';
    return r.pass;
  }
  throw std::invalid_argument("unknown check: " + cfg.check);
}

// ---------------------------------------------------------------------------

int execute_run(const RunConfig& cfg) {
  const ModelSpec spec = model_spec_from_config(cfg);
  const FactorGraph g = build_model(spec);
  const double lambda =
      sampler_is_minibatched(cfg.sampler) || !cfg.check.empty()
          ? resolve_lambda(cfg, g)
          : 0.0;

  const fs::path dir(cfg.out);
  fs::create_directories(dir);
  write_manifest(cfg, g, lambda, spec, dir);

  if (!cfg.check.empty()) {
    std::ostringstream lines;
    const bool pass = run_check(cfg, g, lambda, lines);
    std::cout << lines.str();
    std::ofstream csv(dir / "checks.csv");
    csv << "check,result\n";
    std::istringstream in(lines.str());
    std::string line;
    while (std::getline(in, line)) {
      const bool ok = line.rfind("PASS", 0) == 0;
      csv << '"' << line << "\"," << (ok ? "PASS" : "FAIL") << '\n';
    }
    return pass ? 0 : kExitCheckFailed;
  }
  return run_sampling(cfg, g, lambda, spec, dir);
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

int execute_sweep(RunConfig cfg, const std::string& lambda_grid,
                  const std::string& m_grid, const std::string& k_grid) {
  const std::vector<double> lambdas =
      lambda_grid.empty() ? std::vector<double>{cfg.lambda_mult}
                          : parse_grid(lambda_grid);
  const std::vector<double> ms =
      m_grid.empty() ? std::vector<double>{static_cast<double>(cfg.m)}
                     : parse_grid(m_grid);
  const std::vector<double> ks =
      k_grid.empty() ? std::vector<double>{static_cast<double>(cfg.k)}
                     : parse_grid(k_grid);
  if (lambdas.empty() || ms.empty() || ks.empty()) {
    throw std::invalid_argument("sweep: empty parameter grid");
  }

  const fs::path root(cfg.out);
  fs::create_directories(root);
  std::ofstream index(root / "index.csv");
  index << "cell,lambda_mult,lambda,m,k,final_metric,mean_acceptance,mean_batch\n";

  int cell = 0;
  int rc = 0;
  for (double lm : lambdas) {
    for (double mv : ms) {
      for (double kv : ks) {
        RunConfig c = cfg;
        c.lambda = 0.0;
        c.lambda_mult = lm;
        c.m = static_cast<int>(mv);
        c.k = static_cast<int>(kv);
        char name[32];
        std::snprintf(name, sizeof(name), "cell_%03d", cell);
        c.out = (root / name).string();
        const int r = execute_run(c);
        rc = std::max(rc, r);

        // summarize the cell from its own outputs
        const ModelSpec spec = model_spec_from_config(c);
        const FactorGraph g = build_model(spec);
        const double lambda = resolve_lambda(c, g);
        std::string last;
        {
          std::ifstream csv(fs::path(c.out) / "metrics.csv");
          std::string line;
          std::getline(csv, line);  // header
          while (std::getline(csv, line)) {
            if (!line.empty()) last = line;
          }
        }
        double final_metric = 0.0, acc = 0.0;
        if (!last.empty()) {
          std::stringstream ss(last);
          std::string f;
          std::getline(ss, f, ',');
          std::getline(ss, f, ',');
          final_metric = std::stod(f);
          std::getline(ss, f, ',');
          std::getline(ss, f, ',');
          acc = std::stod(f);
        }
        // mean surviving minibatch size, measured on a short dedicated chain
        double mean_batch = 0.0;
        if (sampler_is_minibatched(c.sampler)) {
          AuxTables tables(g, {lambda});
          const AuxTables* tp = &tables;
          Stepper step = make_stepper_factory(c, g, tp, lambda)();
          Rng rng(c.seed, 9999);
          State x(g.num_variables());
          if (!g.domain().is_discrete()) {
            for (int i = 0; i < g.num_variables(); ++i) {
              x[i] = 0.5 * (g.domain().lo + g.domain().hi);
            }
          }
          const int probe = 2000;
          for (int it = 0; it < probe; ++it) {
            mean_batch += step(x, rng).minibatch_size / double(probe);
          }
        }
        index << name << ',' << fmt_double(lm) << ',' << fmt_double(lambda) << ','
              << c.m << ',' << c.k << ',' << fmt_double(final_metric) << ','
              << fmt_double(acc) << ',' << fmt_double(mean_batch) << '\n';
        ++cell;
      }
    }
  }
  return rc;
}

// flat key = JSON-value lines; flags given on the command line take precedence
void apply_config_file(const std::string& path, const CLI::App& app, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::map<std::string, std::function<void(const json&)>> setters = {
      {"model", [&](const json& v) { cfg.model = v.get<std::string>(); }},
      {"sampler", [&](const json& v) { cfg.sampler = v.get<std::string>(); }},
      {"lambda", [&](const json& v) { cfg.lambda = v.get<double>(); }},
      {"lambda_mult", [&](const json& v) { cfg.lambda_mult = v.get<double>(); }},
      {"m", [&](const json& v) { cfg.m = v.get<int>(); }},
      {"k", [&](const json& v) { cfg.k = v.get<int>(); }},
      {"iters", [&](const json& v) { cfg.iters = v.get<long>(); }},
      {"chains", [&](const json& v) { cfg.chains = v.get<int>(); }},
      {"seed", [&](const json& v) { cfg.seed = v.get<std::uint64_t>(); }},
      {"out", [&](const json& v) { cfg.out = v.get<std::string>(); }},
      {"check", [&](const json& v) { cfg.check = v.get<std::string>(); }},
      {"draws", [&](const json& v) { cfg.draws = v.get<std::uint64_t>(); }},
      {"proposal_sd", [&](const json& v) { cfg.proposal_sd = v.get<double>(); }},
      {"envelope", [&](const json& v) { cfg.envelope = v.get<double>(); }},
      {"dump_every", [&](const json& v) { cfg.dump_every = v.get<long>(); }},
      {"tuples", [&](const json& v) { cfg.tuples = v.get<int>(); }},
      {"bins", [&](const json& v) { cfg.bins = v.get<int>(); }},
      {"side", [&](const json& v) { cfg.side = v.get<int>(); }},
      {"labels", [&](const json& v) { cfg.labels = v.get<int>(); }},
      {"beta", [&](const json& v) { cfg.beta = v.get<double>(); }},
      {"bandwidth", [&](const json& v) { cfg.bandwidth = v.get<double>(); }},
      {"scale", [&](const json& v) { cfg.scale = v.get<double>(); }},
      {"n", [&](const json& v) { cfg.n = v.get<int>(); }},
      {"n_obs", [&](const json& v) { cfg.n_obs = v.get<int>(); }},
      {"bound", [&](const json& v) { cfg.bound = v.get<double>(); }},
      {"data_seed", [&](const json& v) { cfg.data_seed = v.get<std::uint64_t>(); }},
  };
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    }
    std::string key = line.substr(0, eq);
    key.erase(0, key.find_first_not_of(" \t"));
    key.erase(key.find_last_not_of(" \t") + 1);
    const auto it = setters.find(key);
    if (it == setters.end()) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": unknown key '" + key + "'");
    }
    const std::string flag = "--" + [&] {
      std::string f = key;
      std::replace(f.begin(), f.end(), '_', '-');
      return f;
    }();
    if (app.count(flag) > 0) continue;  // explicit flag wins
    it->second(json::parse(line.substr(eq + 1)));
  }
}

void add_common_flags(CLI::App* app, RunConfig& cfg, std::string& config_file) {
  app->add_option("--config", config_file, "flat key = JSON-value config file");
  app->add_option("--model", cfg.model, "potts | spin | gmm | toy:<name> | spec.json");
  app->add_option("--sampler", cfg.sampler,
                  "gibbs | poisson-gibbs | pgits | pgda | gibbs-its | gibbs-da | "
                  "rejection | poisson-mh | mh");
  app->add_option("--lambda", cfg.lambda, "absolute minibatch parameter");
  app->add_option("--lambda-mult", cfg.lambda_mult, "lambda as a multiple of L^2");
  app->add_option("--m", cfg.m, "energy-interpolant degree");
  app->add_option("--k", cfg.k, "pdf-interpolant degree (pgda / gibbs-da)");
  app->add_option("--iters", cfg.iters, "steps per chain");
  app->add_option("--chains", cfg.chains, "independent chains");
  app->add_option("--seed", cfg.seed, "rng seed");
  app->add_option("--out", cfg.out, "output directory");
  app->add_option("--check", cfg.check,
                  "gap-bound | reversibility | stationarity | aux-marginal");
  app->add_option("--draws", cfg.draws, "per-state draws for transition estimates");
  app->add_option("--proposal-sd", cfg.proposal_sd, "random-walk proposal stddev");
  app->add_option("--envelope", cfg.envelope, "rejection log-envelope (default L)");
  app->add_option("--dump-every", cfg.dump_every, "raw-sample dump period");
  app->add_option("--tuples", cfg.tuples, "aux-marginal check tuples");
  app->add_option("--bins", cfg.bins, "histogram bins for continuous metrics");
  app->add_option("--side", cfg.side, "potts lattice side");
  app->add_option("--labels", cfg.labels, "potts label count");
  app->add_option("--beta", cfg.beta, "inverse temperature");
  app->add_option("--bandwidth", cfg.bandwidth, "kernel bandwidth");
  app->add_option("--scale", cfg.scale, "kernel scale");
  app->add_option("--n", cfg.n, "continuous spin count");
  app->add_option("--n-obs", cfg.n_obs, "gmm observation count");
  app->add_option("--bound", cfg.bound, "gmm truncation bound");
  app->add_option("--data-seed", cfg.data_seed, "gmm observation seed");
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* env = std::getenv("POISSON_GIBBS_THREADS")) {
    const int t = std::atoi(env);
#ifdef _OPENMP
    if (t > 0) omp_set_num_threads(t);
#else
    (void)t;
#endif
  }

  CLI::App app{"minibatched Gibbs sampling experiment runner"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string config_file;
  std::string lambda_grid, m_grid, k_grid;

  CLI::App* run = app.add_subcommand("run", "single sampling run or check");
  add_common_flags(run, cfg, config_file);

  CLI::App* sweep = app.add_subcommand("sweep", "cartesian parameter sweep");
  add_common_flags(sweep, cfg, config_file);
  sweep->add_option("--lambda-mult-grid", lambda_grid, "comma list of multipliers");
  sweep->add_option("--m-grid", m_grid, "comma list of energy degrees");
  sweep->add_option("--k-grid", k_grid, "comma list of pdf degrees");

  try {
    app.parse(argc, argv);
    const CLI::App* active = app.get_subcommands().front();
    if (!config_file.empty()) apply_config_file(config_file, *active, cfg);
    if (active == run) return execute_run(cfg);
    return execute_sweep(cfg, lambda_grid, m_grid, k_grid);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadConfig;
  }
}
