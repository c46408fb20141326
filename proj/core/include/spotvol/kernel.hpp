#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <json.hpp>

#include "spotvol/errors.hpp"

namespace spotvol {

/// Antisymmetric weight function on [0,2) used to locally average noisy
/// observations before squaring. Immutable once constructed; the constructor
/// validates antisymmetry and computes the normalization bar_lambda.
class PreAveragingKernel {
 public:
  static PreAveragingKernel step();
  static PreAveragingKernel sine();
  /// Piecewise-linear kernel through (breakpoints[i], values[i]).
  static PreAveragingKernel tabulated(std::vector<double> breakpoints,
                                      std::vector<double> values);
  /// {"family": "step"|"sine"} or
  /// {"family": "tabulated", "breakpoints": [...], "values": [...]}
  static PreAveragingKernel from_descriptor(const nlohmann::json& spec);

  /// Raw kernel value; zero outside [0,2).
  double lambda(double t) const;
  /// lambda / bar_lambda.
  double lambda_tilde(double t) const;
  /// Normalization (2 int_0^1 (int_0^s lambda)^2 ds)^{1/2}.
  double bar_lambda() const { return bar_lambda_; }
  /// L2 norm of lambda over [0,2].
  double lambda_l2() const { return l2_; }
  /// int_0^s lambda(u) du for s in [0,2].
  double antiderivative(double s) const;

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::string& name() const { return name_; }
  nlohmann::json descriptor() const { return descriptor_; }

  /// Kernel whose raw function is lambda_tilde; its bar_lambda is 1.
  PreAveragingKernel normalized() const;

 private:
  PreAveragingKernel(std::function<double(double)> f,
                     std::vector<double> breakpoints, std::string name,
                     nlohmann::json descriptor);
  void validate();
  void compute_norms();

  std::function<double(double)> f_;
  std::vector<double> breakpoints_;  // sorted, first 0, last 2
  std::string name_;
  nlohmann::json descriptor_;
  std::vector<double> prefix_;  // antiderivative at breakpoints
  double bar_lambda_ = 0.0;
  double l2_ = 0.0;
};

/// Antiderivative profiles entering the block-level variance identities.
class KernelProfiles {
 public:
  explicit KernelProfiles(const PreAveragingKernel& kernel);

  /// Lambda(s) = int_s^2 lambda_tilde, supported on [0,2].
  double Lambda(double s) const;
  /// LambdaBar(s) = ((int_0^s lambda_tilde)^2 + (int_0^{1-s} lambda_tilde)^2)^{1/2}
  /// on [0,1].
  double LambdaBar(double s) const;

 private:
  PreAveragingKernel kernel_;
};

/// Discrete weights of one pre-averaging block i (i = 2..m): the window is
/// j/n in ((i-2)/m, i/m].
struct BlockWeights {
  std::int64_t j_begin = 0;  // first in-window sample index
  std::vector<double> w;     // (m/n) lambda_tilde(m j/n - (i-2))
  std::vector<double> w2;    // (m^2 / 2n^2) lambda_tilde^2(m j/n - (i-2))
};

/// Weight tables for all blocks; result[i-2] is block i.
std::vector<BlockWeights> weight_table(const PreAveragingKernel& kernel,
                                       std::int64_t n, std::int64_t m);

}  // namespace spotvol
