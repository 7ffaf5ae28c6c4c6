#pragma once

#include <functional>
#include <vector>

namespace pg {

// Polynomial in the Chebyshev-T basis on [a, b]:
//   p(x) = sum_k coeffs[k] * T_k(2(x - a)/(b - a) - 1)
struct ChebPoly {
  std::vector<double> coeffs;
  double a = -1.0;
  double b = 1.0;

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

// Chebyshev-Lobatto nodes cos(pi*j/m), j = 0..m, mapped to [a, b].
// Returned in descending order (node 0 is b, node m is a). m = 0 gives the
// single midpoint node.
std::vector<double> cheb_nodes(int m, double a, double b);

// Interpolant from samples taken at cheb_nodes(m, a, b), in that order.
// Coefficients via a type-I DCT: an FFT-based path when the size allows it,
// direct summation otherwise.
ChebPoly interpolate_samples(const std::vector<double>& samples, double a, double b);

ChebPoly interpolate(const std::function<double(double)>& f, int m, double a,
                     double b);

// Clenshaw evaluation. x must lie in [a, b].
double evaluate(const ChebPoly& p, double x);

// Degree m+1 polynomial P with P' = p and P(a) = 0.
ChebPoly antiderivative(const ChebPoly& p);

// CDF of the clamped density d(x) = max(p(x), floor), normalized to [0, 1].
// When p stays above the floor on a dense check grid the CDF is the exact
// polynomial antiderivative; otherwise it falls back to cumulative quadrature
// of the clamped density on a fixed grid.
class NormalizedCdf {
 public:
  NormalizedCdf(ChebPoly density, double floor);

  double value(double x) const;          // F(x) in [0, 1]
  double density_value(double x) const;  // the clamped, unnormalized density
  double normalizer() const { return z_; }
  double floor() const { return floor_; }
  double lower() const { return density_.a; }
  double upper() const { return density_.b; }

  // 60 fixed bisection iterations for v with F(v) = u.
  double invert(double u) const;

 private:
  ChebPoly density_;
  double floor_;
  ChebPoly anti_;
  double z_ = 0.0;
  bool poly_path_ = true;
  // quadrature fallback: cumulative integral at uniform grid points
  std::vector<double> grid_cum_;
  double grid_h_ = 0.0;
};

}  // namespace pg
