#include "pg/continuous_gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pg {

ContinuousGibbs::ContinuousGibbs(const FactorGraph& g, ContinuousKind kind,
                                 ContinuousConfig cfg, const AuxTables* tables)
    : g_(&g), kind_(kind), cfg_(cfg), tables_(tables) {
  if (g.domain().is_discrete()) {
    throw std::invalid_argument("ContinuousGibbs needs a continuous domain");
  }
  if (cfg_.m < 1 || cfg_.k < 1) {
    throw std::invalid_argument("ContinuousGibbs: degrees must be >= 1");
  }
  minibatched_ = kind == ContinuousKind::PGDA || kind == ContinuousKind::PGITS;
  if (minibatched_ && tables_ == nullptr) {
    throw std::invalid_argument("minibatched sampler needs aux tables");
  }
}

double ContinuousGibbs::conditional_energy(int i, double v, State& x,
                                           EvalCounter* c) {
  if (minibatched_) {
    return minibatch_energy(*g_, tables_->lambda(), tables_->local_max_energy(),
                            i, v, x, aux_, c);
  }
  const double old = x[i];
  x[i] = v;
  const double u = local_energy(*g_, i, x, c);
  x[i] = old;
  return u;
}

StepReport ContinuousGibbs::step(State& x, Rng& rng) {
  StepReport rep;
  const int i = static_cast<int>(rng.uniform_int(g_->num_variables()));
  rep.variable = i;
  const double a = g_->domain().lo;
  const double b = g_->domain().hi;

  EvalCounter counter;
  if (minibatched_) {
    sample_aux(*g_, tables_->table(i), x, rng, aux_, &counter);
    rep.minibatch_size = static_cast<long>(aux_.size());
  }

  // pdf interpolant: either of exp(energy interpolant) (DA) or of the
  // conditional pdf directly (ITS); shifted so the exponentials stay in range
  const bool double_approx =
      kind_ == ContinuousKind::PGDA || kind_ == ContinuousKind::GibbsDA;
  ChebPoly pdf;
  if (double_approx) {
    const std::vector<double> nodes = cheb_nodes(cfg_.m, a, b);
    std::vector<double> u_samples(nodes.size());
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      u_samples[j] = conditional_energy(i, nodes[j], x, &counter);
    }
    const ChebPoly u_poly = interpolate_samples(u_samples, a, b);
    const std::vector<double> pdf_nodes = cheb_nodes(cfg_.k, a, b);
    std::vector<double> u_at(pdf_nodes.size());
    for (std::size_t j = 0; j < pdf_nodes.size(); ++j) {
      u_at[j] = evaluate(u_poly, pdf_nodes[j]);
    }
    const double shift = *std::max_element(u_at.begin(), u_at.end());
    std::vector<double> f_samples(pdf_nodes.size());
    for (std::size_t j = 0; j < pdf_nodes.size(); ++j) {
      f_samples[j] = std::exp(u_at[j] - shift);
    }
    pdf = interpolate_samples(f_samples, a, b);
  } else {
    const std::vector<double> nodes = cheb_nodes(cfg_.m, a, b);
    std::vector<double> u_samples(nodes.size());
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      u_samples[j] = conditional_energy(i, nodes[j], x, &counter);
    }
    const double shift = *std::max_element(u_samples.begin(), u_samples.end());
    std::vector<double> f_samples(nodes.size());
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      f_samples[j] = std::exp(u_samples[j] - shift);
    }
    pdf = interpolate_samples(f_samples, a, b);
  }

  double peak = 0.0;
  for (double ck : pdf.coeffs) peak += std::fabs(ck);
  const NormalizedCdf cdf(pdf, cfg_.floor_scale * std::max(peak, 1.0));

  const double u = rng.next_double();
  const double v = cdf.invert(u);

  // correction against the same interpolants that produced the proposal
  const double u_new = conditional_energy(i, v, x, &counter);
  const double u_cur = conditional_energy(i, x[i], x, &counter);
  const double log_p = (u_new - u_cur) + std::log(cdf.density_value(x[i])) -
                       std::log(cdf.density_value(v));
  rep.accepted = std::log(std::max(rng.next_double(), 1e-300)) < log_p;
  if (rep.accepted) x[i] = v;
  rep.factor_evals = counter.evals;
  return rep;
}

RejectionGibbs::RejectionGibbs(const FactorGraph& g, double log_envelope)
    : g_(&g), log_envelope_(log_envelope) {
  if (g.domain().is_discrete()) {
    throw std::invalid_argument("RejectionGibbs needs a continuous domain");
  }
}

StepReport RejectionGibbs::step(State& x, Rng& rng) {
  StepReport rep;
  const int i = static_cast<int>(rng.uniform_int(g_->num_variables()));
  rep.variable = i;
  const double a = g_->domain().lo;
  const double b = g_->domain().hi;

  EvalCounter counter;
  const double old = x[i];
  for (long trial = 1;; ++trial) {
    const double v = rng.uniform(a, b);
    x[i] = v;
    const double u = local_energy(*g_, i, x, &counter);
    if (u > log_envelope_) {
      x[i] = old;
      throw std::runtime_error(
          "rejection envelope violated: conditional energy " + std::to_string(u) +
          " exceeds log envelope " + std::to_string(log_envelope_));
    }
    if (std::log(std::max(rng.next_double(), 1e-300)) < u - log_envelope_) {
      rep.trials = trial;
      break;
    }
    x[i] = old;
  }
  rep.factor_evals = counter.evals;
  return rep;
}

}  // namespace pg
