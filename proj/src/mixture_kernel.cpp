#include "pg/mixture_kernel.hpp"

#include <cmath>
#include <cstddef>

namespace pg {

double mixture_exponent_sum(const std::vector<double>& y, double x1, double x2,
                            double sigma_y_sq) {
  const double c = 1.0 / (2.0 * sigma_y_sq);
  const double m2 = x1 + x2;
  const std::size_t n = y.size();
  const double* py = y.data();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = -(py[i] - x1) * (py[i] - x1) * c;
    const double b = -(py[i] - m2) * (py[i] - m2) * c;
    const double hi = a > b ? a : b;
    const double lo = a > b ? b : a;
    s += hi + std::log1p(std::exp(lo - hi));
  }
  return s;
}

void mixture_exponent_each(const std::vector<double>& y, double x1, double x2,
                           double sigma_y_sq, double* out) {
  const double c = 1.0 / (2.0 * sigma_y_sq);
  const double m2 = x1 + x2;
  const std::size_t n = y.size();
  const double* py = y.data();
  for (std::size_t i = 0; i < n; ++i) {
    const double a = -(py[i] - x1) * (py[i] - x1) * c;
    const double b = -(py[i] - m2) * (py[i] - m2) * c;
    const double hi = a > b ? a : b;
    const double lo = a > b ? b : a;
    out[i] = hi + std::log1p(std::exp(lo - hi));
  }
}

}  // namespace pg
