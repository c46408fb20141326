#include "spotvol/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace spotvol {

namespace {

// Newton iteration on Legendre polynomials; nodes symmetric about 0.
GaussRule make_rule(int order) {
  GaussRule r;
  r.nodes.resize(order);
  r.weights.resize(order);
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.nodes[i] = -x;
    r.nodes[order - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.weights[i] = w;
    r.weights[order - 1 - i] = w;
  }
  return r;
}

}  // namespace

const GaussRule& gauss64() {
  static const GaussRule rule = make_rule(64);
  return rule;
}

double gl_integrate(const std::function<double(double)>& f, double a, double b) {
  const GaussRule& r = gauss64();
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double sum = 0.0;
  for (size_t i = 0; i < r.nodes.size(); ++i) {
    sum += r.weights[i] * f(c + h * r.nodes[i]);
  }
  return h * sum;
}

double gl_integrate_pieces(const std::function<double(double)>& f,
                           const std::vector<double>& knots) {
  double sum = 0.0;
  for (size_t i = 0; i + 1 < knots.size(); ++i) {
    if (knots[i + 1] > knots[i]) sum += gl_integrate(f, knots[i], knots[i + 1]);
  }
  return sum;
}

}  // namespace spotvol
