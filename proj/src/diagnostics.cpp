#include "pg/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pg {

StateSpace::StateSpace(const FactorGraph& g, std::size_t max_states) {
  if (!g.domain().is_discrete()) {
    throw std::invalid_argument("StateSpace: discrete domains only");
  }
  n_ = g.num_variables();
  labels_ = g.domain().labels;
  double total = 1.0;
  for (int i = 0; i < n_; ++i) total *= labels_;
  if (total > static_cast<double>(max_states)) {
    throw std::invalid_argument("StateSpace: joint state space too large");
  }
  size_ = static_cast<std::size_t>(total);
}

State StateSpace::decode(std::size_t idx) const {
  State x(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) {
    x[i] = static_cast<double>(idx % labels_);
    idx /= labels_;
  }
  return x;
}

std::size_t StateSpace::encode(const State& x) const {
  std::size_t idx = 0;
  for (int i = n_ - 1; i >= 0; --i) {
    idx = idx * labels_ + static_cast<std::size_t>(x[i]);
  }
  return idx;
}

std::vector<double> exact_distribution(const FactorGraph& g) {
  const StateSpace space(g);
  std::vector<double> u(space.size());
  double top = -1e300;
  for (std::size_t s = 0; s < space.size(); ++s) {
    const State x = space.decode(s);
    u[s] = energy(g, x);
    top = std::max(top, u[s]);
  }
  double z = 0.0;
  for (double& v : u) {
    v = std::exp(v - top);
    z += v;
  }
  for (double& v : u) v /= z;
  return u;
}

Matrix exact_gibbs_kernel(const FactorGraph& g) {
  const StateSpace space(g);
  const int n = g.num_variables();
  const int d = g.domain().labels;
  Matrix t(static_cast<int>(space.size()));
  for (std::size_t s = 0; s < space.size(); ++s) {
    State x = space.decode(s);
    for (int i = 0; i < n; ++i) {
      std::vector<double> u(d);
      const double old = x[i];
      for (int v = 0; v < d; ++v) {
        x[i] = v;
        u[v] = local_energy(g, i, x);
      }
      x[i] = old;
      const double top = *std::max_element(u.begin(), u.end());
      double z = 0.0;
      for (double e : u) z += std::exp(e - top);
      for (int v = 0; v < d; ++v) {
        x[i] = v;
        t.at(static_cast<int>(s), static_cast<int>(space.encode(x))) +=
            std::exp(u[v] - top) / (z * n);
      }
      x[i] = old;
    }
  }
  return t;
}

Matrix exact_uniform_mh_kernel(const FactorGraph& g) {
  const StateSpace space(g);
  const std::vector<double> pi = exact_distribution(g);
  const int size = static_cast<int>(space.size());
  Matrix t(size);
  for (int s = 0; s < size; ++s) {
    double off = 0.0;
    for (int y = 0; y < size; ++y) {
      if (y == s) continue;
      const double p = std::min(1.0, pi[y] / pi[s]) / size;
      t.at(s, y) = p;
      off += p;
    }
    t.at(s, s) = 1.0 - off;
  }
  return t;
}

TransitionEstimate estimate_transition_matrix(const FactorGraph& g,
                                              const StepperFactory& make_stepper,
                                              std::uint64_t draws_per_state,
                                              std::uint64_t seed, bool parallel) {
  const StateSpace space(g);
  const int size = static_cast<int>(space.size());
  TransitionEstimate est;
  est.t = Matrix(size);
  est.stderr_ = Matrix(size);
  est.draws_per_state = draws_per_state;

  auto run_row = [&](int row) {
    Stepper stepper = make_stepper();
    Rng rng(seed, static_cast<std::uint64_t>(row));
    std::vector<std::uint64_t> hits(size, 0);
    const State start = space.decode(static_cast<std::size_t>(row));
    State x = start;
    for (std::uint64_t d = 0; d < draws_per_state; ++d) {
      x.values = start.values;
      stepper(x, rng);
      ++hits[space.encode(x)];
    }
    for (int y = 0; y < size; ++y) {
      const double p = static_cast<double>(hits[y]) / draws_per_state;
      est.t.at(row, y) = p;
      est.stderr_.at(row, y) = std::sqrt(p * (1.0 - p) / draws_per_state);
    }
  };

  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int row = 0; row < size; ++row) run_row(row);
  } else {
    for (int row = 0; row < size; ++row) run_row(row);
  }
  return est;
}

double reversibility_residual(const Matrix& t, const std::vector<double>& pi) {
  double r = 0.0;
  for (int x = 0; x < t.n; ++x) {
    for (int y = x + 1; y < t.n; ++y) {
      r = std::max(r, std::fabs(pi[x] * t.at(x, y) - pi[y] * t.at(y, x)));
    }
  }
  return r;
}

std::vector<double> symmetric_eigenvalues(Matrix s) {
  const int n = s.n;
  // cyclic Jacobi
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) off += s.at(p, q) * s.at(p, q);
    }
    if (off < 1e-24) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = s.at(p, q);
        if (std::fabs(apq) < 1e-300) continue;
        const double theta = (s.at(q, q) - s.at(p, p)) / (2.0 * apq);
        const double sign = theta >= 0.0 ? 1.0 : -1.0;
        const double t_ = sign / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t_ * t_ + 1.0);
        const double sn = t_ * c;
        for (int k = 0; k < n; ++k) {
          const double akp = s.at(k, p);
          const double akq = s.at(k, q);
          s.at(k, p) = c * akp - sn * akq;
          s.at(k, q) = sn * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = s.at(p, k);
          const double aqk = s.at(q, k);
          s.at(p, k) = c * apk - sn * aqk;
          s.at(q, k) = sn * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> eig(n);
  for (int i = 0; i < n; ++i) eig[i] = s.at(i, i);
  std::sort(eig.begin(), eig.end(), std::greater<double>());
  return eig;
}

double spectral_gap(const Matrix& t, const std::vector<double>& pi,
                    double reversibility_tol) {
  const double residual = reversibility_residual(t, pi);
  if (residual > reversibility_tol) {
    throw std::runtime_error("spectral_gap: detailed-balance residual " +
                             std::to_string(residual) + " exceeds tolerance " +
                             std::to_string(reversibility_tol));
  }
  const int n = t.n;
  Matrix s(n);
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      s.at(x, y) = std::sqrt(pi[x] / pi[y]) * t.at(x, y);
    }
  }
  for (int x = 0; x < n; ++x) {
    for (int y = x + 1; y < n; ++y) {
      const double m = 0.5 * (s.at(x, y) + s.at(y, x));
      s.at(x, y) = m;
      s.at(y, x) = m;
    }
  }
  const std::vector<double> eig = symmetric_eigenvalues(std::move(s));
  return 1.0 - eig[1];
}

void Hist1D::add(double v) {
  const int bins = static_cast<int>(counts.size());
  int b = static_cast<int>((v - lo) / (hi - lo) * bins);
  if (b < 0) b = 0;
  if (b >= bins) b = bins - 1;
  ++counts[b];
}

void Hist2D::add(double v, double w) {
  auto clamp = [this](double u) {
    int b = static_cast<int>((u - lo) / (hi - lo) * bins);
    if (b < 0) b = 0;
    if (b >= bins) b = bins - 1;
    return b;
  };
  ++counts[static_cast<std::size_t>(clamp(v)) * bins + clamp(w)];
}

double symmetric_kl(const std::vector<std::uint64_t>& p,
                    const std::vector<std::uint64_t>& q, double eps) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("symmetric_kl: histogram bin mismatch");
  }
  double tp = 0.0, tq = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    tp += static_cast<double>(p[i]);
    tq += static_cast<double>(q[i]);
  }
  if (tp <= 0.0 || tq <= 0.0) throw std::invalid_argument("symmetric_kl: empty histogram");
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double a = p[i] / tp + eps;
    const double b = q[i] / tq + eps;
    kl += a * std::log(a / b) + b * std::log(b / a);
  }
  return kl;
}

void ChainReport::init_discrete(int n, int labels) {
  label_counts.assign(n, std::vector<std::uint64_t>(labels, 0));
}

void ChainReport::observe(const StepReport& rep, const State& x) {
  ++iterations;
  total_evals += rep.factor_evals;
  accepted += rep.accepted ? 1 : 0;
  total_batch += static_cast<std::uint64_t>(rep.minibatch_size);
  total_trials += static_cast<std::uint64_t>(rep.trials);
  if (!label_counts.empty()) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      ++label_counts[i][static_cast<int>(x[i])];
    }
  }
}

double ChainReport::marginal_error() const {
  if (label_counts.empty() || iterations == 0) {
    throw std::runtime_error("marginal_error: empty report");
  }
  double total = 0.0;
  for (const auto& row : label_counts) {
    const double d = static_cast<double>(row.size());
    double err2 = 0.0;
    for (std::uint64_t c : row) {
      const double p = static_cast<double>(c) / iterations;
      err2 += (p - 1.0 / d) * (p - 1.0 / d);
    }
    total += std::sqrt(err2);
  }
  return total / label_counts.size();
}

namespace {

// 1-sigma scale for an eigenvalue of the symmetrized estimate, from the
// per-entry MC standard errors (Frobenius bound on the perturbation).
double gap_sigma(const FactorGraph& g, const TransitionEstimate& est) {
  const std::vector<double> pi = exact_distribution(g);
  const int n = est.t.n;
  double sum = 0.0;
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      const double exy = std::sqrt(pi[x] / pi[y]) * est.stderr_.at(x, y);
      const double eyx = std::sqrt(pi[y] / pi[x]) * est.stderr_.at(y, x);
      const double m = 0.5 * (exy + eyx);
      sum += m * m;
    }
  }
  return std::sqrt(sum);
}

}  // namespace

GapBoundResult check_gap_bound(const FactorGraph& g, const Matrix& plain_kernel,
                               const TransitionEstimate& mini, double bound_factor) {
  const std::vector<double> pi = exact_distribution(g);
  GapBoundResult r;
  r.bound_factor = bound_factor;
  r.gamma_plain = spectral_gap(plain_kernel, pi, 1e-9);
  r.sigma = gap_sigma(g, mini);
  r.gamma_mini = spectral_gap(mini.t, pi, 1.0);  // symmetrization absorbs MC noise
  r.pass = r.gamma_mini >= bound_factor * r.gamma_plain - 5.0 * r.sigma;
  return r;
}

BalanceResult check_reversibility(const FactorGraph& g, const TransitionEstimate& est) {
  const std::vector<double> pi = exact_distribution(g);
  BalanceResult r;
  r.pass = true;
  for (int x = 0; x < est.t.n; ++x) {
    for (int y = x + 1; y < est.t.n; ++y) {
      const double res = std::fabs(pi[x] * est.t.at(x, y) - pi[y] * est.t.at(y, x));
      const double sd = std::sqrt(pi[x] * pi[x] * est.stderr_.at(x, y) * est.stderr_.at(x, y) +
                                  pi[y] * pi[y] * est.stderr_.at(y, x) * est.stderr_.at(y, x));
      const double allowed = 5.0 * std::max(sd, 1e-12);
      if (res > allowed) r.pass = false;
      r.max_residual = std::max(r.max_residual, res);
      r.max_allowed = std::max(r.max_allowed, allowed);
    }
  }
  return r;
}

StationarityResult check_stationarity(const FactorGraph& g,
                                      const TransitionEstimate& est) {
  const std::vector<double> pi = exact_distribution(g);
  StationarityResult r;
  const int n = est.t.n;
  for (int y = 0; y < n; ++y) {
    double m = 0.0;
    double var = 0.0;
    for (int x = 0; x < n; ++x) {
      m += pi[x] * est.t.at(x, y);
      var += pi[x] * pi[x] * est.stderr_.at(x, y) * est.stderr_.at(x, y);
    }
    r.l1 += std::fabs(m - pi[y]);
    r.allowed += 5.0 * std::sqrt(var);
  }
  r.pass = r.l1 <= r.allowed;
  return r;
}

}  // namespace pg
