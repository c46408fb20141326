#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "spotvol/errors.hpp"

namespace spotvol {

enum class WaveletFamily { haar, daubechies4, daubechies6, daubechies8 };

WaveletFamily wavelet_family_from_name(const std::string& name);
std::string wavelet_family_name(WaveletFamily family);

/// Periodized wavelet system on [0,1]. Daubechies scaling/wavelet functions
/// are tabulated by the cascade algorithm on a dyadic grid (step 2^-16) and
/// evaluated with linear interpolation; Haar is evaluated in closed form
/// (right-continuous convention at jumps).
class WaveletBasis {
 public:
  explicit WaveletBasis(WaveletFamily family);

  WaveletFamily family() const { return family_; }
  /// Regularity index of the family (number of vanishing moments of psi).
  int regularity() const { return regularity_; }
  /// Finest level the evaluation tables resolve.
  int max_level() const { return table_j_; }
  /// Support length of the mother functions ([0, taps-1]).
  int support_length() const { return taps_ - 1; }

  /// Mother functions on the real line (zero off support).
  double mother_phi(double x) const;
  double mother_psi(double x) const;

  /// Periodized h_{lk}(t) = 2^{l/2} sum_p h(2^l (t+p) - k), h = phi or psi.
  double scaling_value(int level, int k, double t) const;
  double wavelet_value(int level, int k, double t) const;

  std::vector<double> scaling_values(int level, int k,
                                     std::span<const double> pts) const;
  std::vector<double> wavelet_values(int level, int k,
                                     std::span<const double> pts) const;

 private:
  double table_value(const std::vector<double>& table, double x) const;
  void check_level(int level) const;

  WaveletFamily family_;
  int taps_;
  int regularity_;
  int table_j_ = 16;
  std::vector<double> phi_table_;  // empty for haar
  std::vector<double> psi_table_;
};

/// Estimated expansion of a function on [0,1]: one block of scaling
/// coefficients at level ell0 and detail blocks for ell0 < l <= ell1.
struct CoefficientSet {
  int ell0 = 0;
  int ell1 = 0;
  double tau = 0.0;

  std::vector<double> scaling;  // size 2^ell0, index k

  struct Detail {
    double value = 0.0;
    bool kept = true;
  };
  // detail[l - ell0 - 1][k], level l in (ell0, ell1]
  std::vector<std::vector<Detail>> detail;

  int levels() const { return ell1 - ell0; }
  const std::vector<Detail>& level(int l) const {
    return detail.at(static_cast<size_t>(l - ell0 - 1));
  }
  std::vector<Detail>& level(int l) {
    return detail.at(static_cast<size_t>(l - ell0 - 1));
  }

  nlohmann::json to_json() const;
  static CoefficientSet from_json(const nlohmann::json& j);
};

/// Quadrature coefficients of f against the basis, no thresholding. f is
/// sampled at t_i = i/N for i = 0..N (right-continuous convention at jumps);
/// N must be a power of two >= 2^{ell1+4}.
CoefficientSet analyze(std::span<const double> f_on_grid,
                       const WaveletBasis& basis, int ell0, int ell1);

/// Reconstruction sum over kept coefficients, evaluated at grid points.
std::vector<double> synthesize(const CoefficientSet& coeffs,
                               const WaveletBasis& basis,
                               std::span<const double> grid);

/// Truncated Besov norm: sup over available levels of
/// 2^{j(s + 1/2 - 1/pi)} (sum_k |coeff|^pi)^{1/pi}; the scaling block enters
/// with the level-ell0 weight. pi = infinity uses the max modification.
double besov_norm(const CoefficientSet& coeffs, double s, double pi);

}  // namespace spotvol
