#include "pg/cheb.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace pg {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

bool is_pow2(int v) { return v > 0 && (v & (v - 1)) == 0; }

void fft_inplace(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * kPi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        const std::complex<double> u = a[i + j];
        const std::complex<double> v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

// DCT-I via a size-2m FFT of the even extension of the samples.
std::vector<double> dct1_fft(const std::vector<double>& f) {
  const int m = static_cast<int>(f.size()) - 1;
  std::vector<std::complex<double>> ext(2 * m);
  for (int j = 0; j <= m; ++j) ext[j] = f[j];
  for (int j = 1; j < m; ++j) ext[2 * m - j] = f[j];
  fft_inplace(ext);
  std::vector<double> c(m + 1);
  for (int k = 0; k <= m; ++k) {
    c[k] = ext[k].real() / static_cast<double>(m);
  }
  c[0] *= 0.5;
  c[m] *= 0.5;
  return c;
}

std::vector<double> dct1_direct(const std::vector<double>& f) {
  const int m = static_cast<int>(f.size()) - 1;
  std::vector<double> c(m + 1);
  for (int k = 0; k <= m; ++k) {
    double s = 0.5 * (f[0] + (k % 2 == 0 ? f[m] : -f[m]));
    for (int j = 1; j < m; ++j) {
      s += f[j] * std::cos(kPi * j * k / m);
    }
    c[k] = 2.0 * s / static_cast<double>(m);
  }
  c[0] *= 0.5;
  c[m] *= 0.5;
  return c;
}

// 5-point Gauss-Legendre on [lo, hi]
template <class F>
double gauss5(const F& f, double lo, double hi) {
  static const double xs[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                               0.5384693101056831, 0.9061798459386640};
  static const double ws[5] = {0.2369268850561891, 0.4786286704993665,
                               0.5688888888888889, 0.4786286704993665,
                               0.2369268850561891};
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  double s = 0.0;
  for (int i = 0; i < 5; ++i) s += ws[i] * f(mid + half * xs[i]);
  return s * half;
}

}  // namespace

std::vector<double> cheb_nodes(int m, double a, double b) {
  if (m < 0) throw std::invalid_argument("cheb_nodes: negative degree");
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  if (m == 0) return {mid};
  std::vector<double> nodes(m + 1);
  for (int j = 0; j <= m; ++j) {
    nodes[j] = mid + half * std::cos(kPi * j / m);
  }
  return nodes;
}

ChebPoly interpolate_samples(const std::vector<double>& samples, double a, double b) {
  if (samples.empty()) throw std::invalid_argument("interpolate_samples: no samples");
  for (std::size_t j = 0; j < samples.size(); ++j) {
    if (!std::isfinite(samples[j])) {
      throw std::runtime_error("interpolate_samples: non-finite sample at node " +
                               std::to_string(j));
    }
  }
  ChebPoly p;
  p.a = a;
  p.b = b;
  const int m = static_cast<int>(samples.size()) - 1;
  if (m == 0) {
    p.coeffs = {samples[0]};
  } else if (m >= 32 && is_pow2(m)) {
    p.coeffs = dct1_fft(samples);
  } else {
    p.coeffs = dct1_direct(samples);
  }
  return p;
}

ChebPoly interpolate(const std::function<double(double)>& f, int m, double a,
                     double b) {
  const std::vector<double> nodes = cheb_nodes(m, a, b);
  std::vector<double> samples(nodes.size());
  for (std::size_t j = 0; j < nodes.size(); ++j) samples[j] = f(nodes[j]);
  return interpolate_samples(samples, a, b);
}

double evaluate(const ChebPoly& p, double x) {
  const double tol = 1e-12 * (1.0 + std::fabs(p.b - p.a));
  if (x < p.a - tol || x > p.b + tol) {
    throw std::domain_error("evaluate: x outside polynomial domain");
  }
  double t = 2.0 * (x - p.a) / (p.b - p.a) - 1.0;
  if (t < -1.0) t = -1.0;
  if (t > 1.0) t = 1.0;
  const int m = p.degree();
  double b1 = 0.0, b2 = 0.0;
  for (int k = m; k >= 1; --k) {
    const double b0 = 2.0 * t * b1 - b2 + p.coeffs[k];
    b2 = b1;
    b1 = b0;
  }
  return t * b1 - b2 + p.coeffs[0];
}

ChebPoly antiderivative(const ChebPoly& p) {
  const int m = p.degree();
  const double half = 0.5 * (p.b - p.a);
  auto alpha = [&](int k) { return k >= 0 && k <= m ? p.coeffs[k] : 0.0; };
  ChebPoly out;
  out.a = p.a;
  out.b = p.b;
  out.coeffs.assign(m + 2, 0.0);
  out.coeffs[1] = half * (alpha(0) - 0.5 * alpha(2));
  for (int k = 2; k <= m + 1; ++k) {
    out.coeffs[k] = half * (alpha(k - 1) - alpha(k + 1)) / (2.0 * k);
  }
  // pin P(a) = 0 via T_k(-1) = (-1)^k
  double at_a = 0.0;
  for (int k = 1; k <= m + 1; ++k) {
    at_a += (k % 2 == 0 ? out.coeffs[k] : -out.coeffs[k]);
  }
  out.coeffs[0] = -at_a;
  return out;
}

NormalizedCdf::NormalizedCdf(ChebPoly density, double floor)
    : density_(std::move(density)), floor_(floor) {
  if (floor_ < 0.0) throw std::invalid_argument("NormalizedCdf: negative floor");
  const double a = density_.a;
  const double b = density_.b;
  const int check = std::max(1024, 8 * (density_.degree() + 1));
  poly_path_ = true;
  for (int j = 0; j <= check; ++j) {
    const double x = a + (b - a) * j / check;
    if (evaluate(density_, x) < floor_) {
      poly_path_ = false;
      break;
    }
  }
  if (poly_path_) {
    anti_ = antiderivative(density_);
    z_ = evaluate(anti_, b);
  } else {
    // five-point Gauss is exact through degree 9 inside a cell, so low-degree
    // densities need few cells; extra cells shrink the error from cells where
    // the clamp kicks in and from high-degree oscillation
    const int cells = std::max(256, 32 * (density_.degree() + 1));
    grid_h_ = (b - a) / cells;
    grid_cum_.assign(cells + 1, 0.0);
    auto d = [this](double x) { return density_value(x); };
    for (int j = 0; j < cells; ++j) {
      grid_cum_[j + 1] = grid_cum_[j] + gauss5(d, a + j * grid_h_, a + (j + 1) * grid_h_);
    }
    z_ = grid_cum_.back();
  }
  if (!(z_ > 0.0) || !std::isfinite(z_)) {
    throw std::runtime_error("NormalizedCdf: nonpositive total mass");
  }
}

double NormalizedCdf::density_value(double x) const {
  const double v = evaluate(density_, x);
  return v > floor_ ? v : floor_;
}

double NormalizedCdf::value(double x) const {
  double raw;
  if (poly_path_) {
    raw = evaluate(anti_, x);
  } else {
    const double a = density_.a;
    int j = static_cast<int>((x - a) / grid_h_);
    const int cells = static_cast<int>(grid_cum_.size()) - 1;
    if (j < 0) j = 0;
    if (j > cells - 1) j = cells - 1;
    auto d = [this](double t) { return density_value(t); };
    raw = grid_cum_[j] + gauss5(d, a + j * grid_h_, x);
  }
  const double f = raw / z_;
  if (f < 0.0) return 0.0;
  if (f > 1.0) return 1.0;
  return f;
}

double NormalizedCdf::invert(double u) const {
  if (u <= 0.0) return density_.a;
  if (u >= 1.0) return density_.b;
  double lo = density_.a;
  double hi = density_.b;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (value(mid) < u) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace pg
