#include "spotvol/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "spotvol/quadrature.hpp"

namespace spotvol {

namespace {

constexpr double kAntisymTol = 1e-12;
constexpr int kAntisymSamples = 1024;

std::vector<double> clip_knots(const std::vector<double>& breakpoints, double lo,
                               double hi) {
  std::vector<double> knots{lo};
  for (double b : breakpoints) {
    if (b > lo && b < hi) knots.push_back(b);
  }
  knots.push_back(hi);
  return knots;
}

}  // namespace

PreAveragingKernel::PreAveragingKernel(std::function<double(double)> f,
                                       std::vector<double> breakpoints,
                                       std::string name,
                                       nlohmann::json descriptor)
    : f_(std::move(f)),
      breakpoints_(std::move(breakpoints)),
      name_(std::move(name)),
      descriptor_(std::move(descriptor)) {
  validate();
  compute_norms();
}

double PreAveragingKernel::lambda(double t) const {
  if (t < 0.0 || t >= 2.0) return 0.0;
  return f_(t);
}

double PreAveragingKernel::lambda_tilde(double t) const {
  return lambda(t) / bar_lambda_;
}

void PreAveragingKernel::validate() {
  if (breakpoints_.empty() || breakpoints_.front() != 0.0 ||
      breakpoints_.back() != 2.0 ||
      !std::is_sorted(breakpoints_.begin(), breakpoints_.end())) {
    throw InvalidDomain("kernel breakpoints must be sorted and span [0,2]");
  }
  const double step = 2.0 / kAntisymSamples;
  for (int i = 0; i < kAntisymSamples; ++i) {
    const double t = (i + 0.5) * step;
    const double v = lambda(t);
    if (!std::isfinite(v)) {
      throw InvalidDomain("kernel value not finite at t=" + std::to_string(t));
    }
    const double mirror = lambda(2.0 - t);
    if (std::abs(v + mirror) > kAntisymTol) {
      throw NotAntisymmetric("lambda(t) != -lambda(2-t) at t=" +
                             std::to_string(t));
    }
  }
}

void PreAveragingKernel::compute_norms() {
  // Prefix integrals at breakpoints so the antiderivative needs at most one
  // panel per call.
  prefix_.assign(breakpoints_.size(), 0.0);
  for (size_t i = 0; i + 1 < breakpoints_.size(); ++i) {
    prefix_[i + 1] =
        prefix_[i] + gl_integrate(f_, breakpoints_[i], breakpoints_[i + 1]);
  }
  auto L = [this](double s) { return antiderivative(s); };
  const double bar2 =
      2.0 * gl_integrate_pieces([&L](double s) { return L(s) * L(s); },
                                clip_knots(breakpoints_, 0.0, 1.0));
  if (bar2 <= 1e-20) {
    throw DegenerateKernel("bar_lambda = 0: kernel is zero identically");
  }
  bar_lambda_ = std::sqrt(bar2);
  l2_ = std::sqrt(gl_integrate_pieces(
      [this](double t) {
        const double v = lambda(t);
        return v * v;
      },
      breakpoints_));
}

double PreAveragingKernel::antiderivative(double s) const {
  if (s <= 0.0) return 0.0;
  if (s >= 2.0) return prefix_.back();
  const auto it =
      std::upper_bound(breakpoints_.begin(), breakpoints_.end(), s);
  const size_t piece = static_cast<size_t>(it - breakpoints_.begin()) - 1;
  return prefix_[piece] + gl_integrate(f_, breakpoints_[piece], s);
}

PreAveragingKernel PreAveragingKernel::step() {
  return PreAveragingKernel(
      [](double t) { return t < 1.0 ? 1.0 : -1.0; }, {0.0, 1.0, 2.0}, "step",
      nlohmann::json{{"family", "step"}});
}

PreAveragingKernel PreAveragingKernel::sine() {
  return PreAveragingKernel(
      [](double t) { return std::sin(std::numbers::pi * t); }, {0.0, 2.0},
      "sine", nlohmann::json{{"family", "sine"}});
}

PreAveragingKernel PreAveragingKernel::tabulated(
    std::vector<double> breakpoints, std::vector<double> values) {
  if (breakpoints.size() < 2 || breakpoints.size() != values.size()) {
    throw ConfigError("tabulated kernel needs matching breakpoints/values");
  }
  if (!std::is_sorted(breakpoints.begin(), breakpoints.end())) {
    throw InvalidDomain("tabulated breakpoints must be sorted");
  }
  if (breakpoints.front() < 0.0 || breakpoints.back() > 2.0) {
    throw InvalidDomain("tabulated kernel support must lie inside [0,2)");
  }
  nlohmann::json desc{{"family", "tabulated"},
                      {"breakpoints", breakpoints},
                      {"values", values}};
  auto bp = breakpoints;
  auto interp = [bp = std::move(breakpoints),
                 vals = std::move(values)](double t) {
    if (t <= bp.front() || t >= bp.back()) {
      return t == bp.front() ? vals.front() : 0.0;
    }
    const auto it = std::upper_bound(bp.begin(), bp.end(), t);
    const size_t i = static_cast<size_t>(it - bp.begin()) - 1;
    const double u = (t - bp[i]) / (bp[i + 1] - bp[i]);
    return (1.0 - u) * vals[i] + u * vals[i + 1];
  };
  std::vector<double> knots{0.0};
  for (double b : bp) {
    if (b > 0.0 && b < 2.0) knots.push_back(b);
  }
  knots.push_back(2.0);
  return PreAveragingKernel(std::move(interp), std::move(knots), "tabulated",
                            std::move(desc));
}

PreAveragingKernel PreAveragingKernel::from_descriptor(
    const nlohmann::json& spec) {
  const std::string family = spec.value("family", "");
  if (family == "step") return step();
  if (family == "sine") return sine();
  if (family == "tabulated") {
    if (!spec.contains("breakpoints") || !spec.contains("values")) {
      throw ConfigError("tabulated kernel descriptor needs breakpoints/values");
    }
    return tabulated(spec["breakpoints"].get<std::vector<double>>(),
                     spec["values"].get<std::vector<double>>());
  }
  throw ConfigError("unknown kernel family: '" + family + "'");
}

PreAveragingKernel PreAveragingKernel::normalized() const {
  const double bar = bar_lambda_;
  auto f = f_;
  nlohmann::json desc = descriptor_;
  desc["normalized"] = true;
  return PreAveragingKernel([f, bar](double t) { return f(t) / bar; },
                            breakpoints_, name_ + "-normalized",
                            std::move(desc));
}

KernelProfiles::KernelProfiles(const PreAveragingKernel& kernel)
    : kernel_(kernel) {}

double KernelProfiles::Lambda(double s) const {
  if (s < 0.0 || s > 2.0) return 0.0;
  // int_s^2 lambda_tilde = (L(2) - L(s)) / bar_lambda, L(2) = 0 by antisymmetry
  return (kernel_.antiderivative(2.0) - kernel_.antiderivative(s)) /
         kernel_.bar_lambda();
}

double KernelProfiles::LambdaBar(double s) const {
  if (s < 0.0 || s > 1.0) return 0.0;
  const double bar = kernel_.bar_lambda();
  const double a = kernel_.antiderivative(s) / bar;
  const double b = kernel_.antiderivative(1.0 - s) / bar;
  return std::sqrt(a * a + b * b);
}

std::vector<BlockWeights> weight_table(const PreAveragingKernel& kernel,
                                       std::int64_t n, std::int64_t m) {
  if (m < 2 || m > n) {
    throw BadBlockCount("need 2 <= m <= n, got m=" + std::to_string(m) +
                        ", n=" + std::to_string(n));
  }
  std::vector<BlockWeights> blocks;
  blocks.reserve(static_cast<size_t>(m - 1));
  const double mn = static_cast<double>(m) / static_cast<double>(n);
  const double mn2 = 0.5 * mn * mn;
  for (std::int64_t i = 2; i <= m; ++i) {
    // j/n in ((i-2)/m, i/m]  <=>  n(i-2)/m < j <= n i/m
    const std::int64_t j_lo = n * (i - 2) / m + 1;
    const std::int64_t j_hi = std::min(n, n * i / m);
    BlockWeights b;
    b.j_begin = j_lo;
    if (j_hi >= j_lo) {
      b.w.reserve(static_cast<size_t>(j_hi - j_lo + 1));
      b.w2.reserve(static_cast<size_t>(j_hi - j_lo + 1));
      for (std::int64_t j = j_lo; j <= j_hi; ++j) {
        const double arg = mn * static_cast<double>(j) -
                           static_cast<double>(i - 2);
        const double lt = kernel.lambda_tilde(arg);
        b.w.push_back(mn * lt);
        b.w2.push_back(mn2 * lt * lt);
      }
    }
    blocks.push_back(std::move(b));
  }
  return blocks;
}

}  // namespace spotvol
