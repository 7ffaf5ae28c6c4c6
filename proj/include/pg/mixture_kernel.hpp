#pragma once

#include <vector>

namespace pg {

// Shared inner loops for the tied-means Gaussian mixture likelihood
//   log(0.5 exp(-(y - x1)^2 / 2s) + 0.5 exp(-(y - x1 - x2)^2 / 2s))
// stripped of the constant log(0.5 / sqrt(2 pi s)) term, which callers add
// back. Kept in their own translation unit so the build can turn on
// vectorized math for them without touching the rest of the library.

// Sum over all observations at a single point (x1, x2).
double mixture_exponent_sum(const std::vector<double>& y, double x1, double x2,
                            double sigma_y_sq);

// Per-observation values at (x1, x2); out must hold y.size() doubles.
void mixture_exponent_each(const std::vector<double>& y, double x1, double x2,
                           double sigma_y_sq, double* out);

}  // namespace pg
