#pragma once

#include <functional>
#include <vector>

namespace spotvol {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached 64-point rule; spectrally accurate on smooth pieces.
const GaussRule& gauss64();

/// Single-panel Gauss-Legendre integral of f over [a, b].
double gl_integrate(const std::function<double(double)>& f, double a, double b);

/// Composite integral over consecutive panels given by knots (sorted).
double gl_integrate_pieces(const std::function<double(double)>& f,
                           const std::vector<double>& knots);

}  // namespace spotvol
