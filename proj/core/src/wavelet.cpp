#include "spotvol/wavelet.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace spotvol {

namespace {

// Orthonormal low-pass filters, sum = sqrt(2). daubechies-N has N taps and
// N/2 vanishing moments.
const std::vector<double>& lowpass(WaveletFamily family) {
  static const std::vector<double> db4 = {
      0.48296291314469025, 0.836516303737469, 0.22414386804185735,
      -0.12940952255092145};
  static const std::vector<double> db6 = {
      0.3326705529509569,   0.8068915093133388, 0.4598775021193313,
      -0.13501102001039084, -0.08544127388224149, 0.035226291882100656};
  static const std::vector<double> db8 = {
      0.23037781330885523,   0.7148465705525415,   0.6308807679295904,
      -0.02798376941698385,  -0.18703481171888114, 0.030841381835986965,
      0.032883011666982945,  -0.010597401784997278};
  switch (family) {
    case WaveletFamily::daubechies4:
      return db4;
    case WaveletFamily::daubechies6:
      return db6;
    case WaveletFamily::daubechies8:
      return db8;
    default:
      throw Error("haar has no cascade filter");
  }
}

// phi at integer abscissae: normalized eigenvector of A_{ij} = sqrt2 h_{2i-j}
// at eigenvalue 1, found by power-type iteration on the shifted problem.
std::vector<double> phi_at_integers(const std::vector<double>& h) {
  const int n = static_cast<int>(h.size());
  std::vector<double> v(static_cast<size_t>(n), 1.0 / n);
  const double sqrt2 = std::sqrt(2.0);
  // The refinement operator restricted to integers has a simple eigenvalue 1;
  // averaging iterations converge linearly.
  for (int it = 0; it < 20000; ++it) {
    std::vector<double> next(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const int k = 2 * i - j;
        if (k >= 0 && k < n) next[i] += sqrt2 * h[k] * v[j];
      }
    }
    double sum = 0.0;
    for (double x : next) sum += x;
    for (double& x : next) x /= sum;
    double diff = 0.0;
    for (int i = 0; i < n; ++i) diff = std::max(diff, std::abs(next[i] - v[i]));
    v = std::move(next);
    if (diff < 1e-15) break;
  }
  return v;
}

// Dyadic refinement of phi to grid step 2^-J over the support [0, taps-1].
std::vector<double> cascade_phi(const std::vector<double>& h, int J) {
  const int n = static_cast<int>(h.size());
  const std::int64_t M = n - 1;
  const double sqrt2 = std::sqrt(2.0);
  std::vector<double> prev = phi_at_integers(h);
  for (int j = 1; j <= J; ++j) {
    const std::int64_t half = std::int64_t{1} << (j - 1);
    const std::int64_t prev_len = M * half;
    std::vector<double> cur(static_cast<size_t>(M * 2 * half) + 1, 0.0);
    for (std::int64_t x = 0; x < static_cast<std::int64_t>(cur.size()); ++x) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) {
        const std::int64_t idx = x - k * half;
        if (idx >= 0 && idx <= prev_len) s += h[k] * prev[idx];
      }
      cur[x] = sqrt2 * s;
    }
    prev = std::move(cur);
  }
  return prev;
}

std::vector<double> cascade_psi(const std::vector<double>& h,
                                const std::vector<double>& phi, int J) {
  const int n = static_cast<int>(h.size());
  const std::int64_t M = n - 1;
  const std::int64_t len = M << J;
  const double sqrt2 = std::sqrt(2.0);
  std::vector<double> g(h.size());
  for (int k = 0; k < n; ++k) {
    g[k] = ((k % 2) ? -1.0 : 1.0) * h[n - 1 - k];
  }
  std::vector<double> psi(static_cast<size_t>(len) + 1, 0.0);
  for (std::int64_t x = 0; x <= len; ++x) {
    double s = 0.0;
    for (int k = 0; k < n; ++k) {
      const std::int64_t idx = 2 * x - (k << J);
      if (idx >= 0 && idx <= len) s += g[k] * phi[idx];
    }
    psi[x] = sqrt2 * s;
  }
  return psi;
}

}  // namespace

WaveletFamily wavelet_family_from_name(const std::string& name) {
  if (name == "haar") return WaveletFamily::haar;
  if (name == "daubechies-4" || name == "db4") return WaveletFamily::daubechies4;
  if (name == "daubechies-6" || name == "db6") return WaveletFamily::daubechies6;
  if (name == "daubechies-8" || name == "db8") return WaveletFamily::daubechies8;
  throw ConfigError("unknown wavelet family: '" + name + "'");
}

std::string wavelet_family_name(WaveletFamily family) {
  switch (family) {
    case WaveletFamily::haar:
      return "haar";
    case WaveletFamily::daubechies4:
      return "daubechies-4";
    case WaveletFamily::daubechies6:
      return "daubechies-6";
    case WaveletFamily::daubechies8:
      return "daubechies-8";
  }
  return "?";
}

WaveletBasis::WaveletBasis(WaveletFamily family) : family_(family) {
  if (family == WaveletFamily::haar) {
    taps_ = 2;
    regularity_ = 1;
    return;
  }
  const auto& h = lowpass(family);
  taps_ = static_cast<int>(h.size());
  regularity_ = taps_ / 2;
  phi_table_ = cascade_phi(h, table_j_);
  psi_table_ = cascade_psi(h, phi_table_, table_j_);
}

double WaveletBasis::table_value(const std::vector<double>& table,
                                 double x) const {
  if (x <= 0.0 || x >= taps_ - 1) return 0.0;
  const double pos = std::ldexp(x, table_j_);
  const double fl = std::floor(pos);
  const auto i = static_cast<size_t>(fl);
  const double frac = pos - fl;
  return (1.0 - frac) * table[i] + frac * table[i + 1];
}

double WaveletBasis::mother_phi(double x) const {
  if (family_ == WaveletFamily::haar) {
    return (x >= 0.0 && x < 1.0) ? 1.0 : 0.0;
  }
  return table_value(phi_table_, x);
}

double WaveletBasis::mother_psi(double x) const {
  if (family_ == WaveletFamily::haar) {
    if (x >= 0.0 && x < 0.5) return 1.0;
    if (x >= 0.5 && x < 1.0) return -1.0;
    return 0.0;
  }
  return table_value(psi_table_, x);
}

void WaveletBasis::check_level(int level) const {
  if (level < 0) throw Error("negative resolution level");
  if (level > table_j_) {
    throw LevelTooFine("level " + std::to_string(level) +
                       " exceeds table resolution 2^" +
                       std::to_string(table_j_));
  }
}

double WaveletBasis::scaling_value(int level, int k, double t) const {
  check_level(level);
  const double scale = std::ldexp(1.0, level);
  const double amp = std::sqrt(scale);
  const int sup = taps_ - 1;
  double sum = 0.0;
  // wrap the translate around the circle: argument in [0, sup) requires
  // p in [k/2^l - t, (sup + k)/2^l - t]
  const int p_lo = static_cast<int>(std::floor(k / scale - t));
  const int p_hi = static_cast<int>(std::ceil((sup + k) / scale - t));
  for (int p = p_lo; p <= p_hi; ++p) {
    sum += mother_phi(scale * (t + p) - k);
  }
  return amp * sum;
}

double WaveletBasis::wavelet_value(int level, int k, double t) const {
  check_level(level);
  const double scale = std::ldexp(1.0, level);
  const double amp = std::sqrt(scale);
  const int sup = taps_ - 1;
  double sum = 0.0;
  const int p_lo = static_cast<int>(std::floor(k / scale - t));
  const int p_hi = static_cast<int>(std::ceil((sup + k) / scale - t));
  for (int p = p_lo; p <= p_hi; ++p) {
    sum += mother_psi(scale * (t + p) - k);
  }
  return amp * sum;
}

std::vector<double> WaveletBasis::scaling_values(
    int level, int k, std::span<const double> pts) const {
  std::vector<double> out(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) {
    out[i] = scaling_value(level, k, pts[i]);
  }
  return out;
}

std::vector<double> WaveletBasis::wavelet_values(
    int level, int k, std::span<const double> pts) const {
  std::vector<double> out(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) {
    out[i] = wavelet_value(level, k, pts[i]);
  }
  return out;
}

nlohmann::json CoefficientSet::to_json() const {
  nlohmann::json j;
  j["ell0"] = ell0;
  j["ell1"] = ell1;
  j["tau"] = tau;
  auto& sc = j["scaling"] = nlohmann::json::array();
  for (size_t k = 0; k < scaling.size(); ++k) {
    sc.push_back({k, scaling[k]});
  }
  auto& de = j["detail"] = nlohmann::json::array();
  for (int l = ell0 + 1; l <= ell1; ++l) {
    const auto& row = level(l);
    for (size_t k = 0; k < row.size(); ++k) {
      de.push_back({l, k, row[k].value, row[k].kept});
    }
  }
  return j;
}

CoefficientSet CoefficientSet::from_json(const nlohmann::json& j) {
  CoefficientSet c;
  c.ell0 = j.at("ell0").get<int>();
  c.ell1 = j.at("ell1").get<int>();
  c.tau = j.at("tau").get<double>();
  c.scaling.assign(size_t{1} << c.ell0, 0.0);
  for (const auto& e : j.at("scaling")) {
    c.scaling.at(e.at(0).get<size_t>()) = e.at(1).get<double>();
  }
  for (int l = c.ell0 + 1; l <= c.ell1; ++l) {
    c.detail.emplace_back(size_t{1} << l);
  }
  for (const auto& e : j.at("detail")) {
    const int l = e.at(0).get<int>();
    auto& d = c.level(l).at(e.at(1).get<size_t>());
    d.value = e.at(2).get<double>();
    d.kept = e.at(3).get<bool>();
  }
  return c;
}

CoefficientSet analyze(std::span<const double> f_on_grid,
                       const WaveletBasis& basis, int ell0, int ell1) {
  if (ell1 < ell0) throw Error("need ell0 <= ell1");
  if (f_on_grid.size() < 2) throw GridTooCoarse("empty sample grid");
  const size_t N = f_on_grid.size() - 1;
  if (!std::has_single_bit(N) || N < (size_t{1} << (ell1 + 4))) {
    throw GridTooCoarse("grid resolution must be a power of two >= 2^(ell1+4)");
  }
  const double h = 1.0 / static_cast<double>(N);
  CoefficientSet c;
  c.ell0 = ell0;
  c.ell1 = ell1;
  c.tau = 0.0;
  // Left-endpoint Riemann sums; exact for resolution-matched step functions
  // under the right-continuous sampling convention.
  c.scaling.assign(size_t{1} << ell0, 0.0);
  for (size_t k = 0; k < c.scaling.size(); ++k) {
    double s = 0.0;
    for (size_t i = 0; i < N; ++i) {
      s += f_on_grid[i] *
           basis.scaling_value(ell0, static_cast<int>(k), i * h);
    }
    c.scaling[k] = s * h;
  }
  for (int l = ell0 + 1; l <= ell1; ++l) {
    auto& row = c.detail.emplace_back(size_t{1} << l);
    for (size_t k = 0; k < row.size(); ++k) {
      double s = 0.0;
      for (size_t i = 0; i < N; ++i) {
        s += f_on_grid[i] * basis.wavelet_value(l, static_cast<int>(k), i * h);
      }
      row[k].value = s * h;
    }
  }
  return c;
}

std::vector<double> synthesize(const CoefficientSet& coeffs,
                               const WaveletBasis& basis,
                               std::span<const double> grid) {
  std::vector<double> out(grid.size(), 0.0);
  for (size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    double s = 0.0;
    for (size_t k = 0; k < coeffs.scaling.size(); ++k) {
      if (coeffs.scaling[k] != 0.0) {
        s += coeffs.scaling[k] *
             basis.scaling_value(coeffs.ell0, static_cast<int>(k), t);
      }
    }
    for (int l = coeffs.ell0 + 1; l <= coeffs.ell1; ++l) {
      const auto& row = coeffs.level(l);
      for (size_t k = 0; k < row.size(); ++k) {
        if (row[k].kept && row[k].value != 0.0) {
          s += row[k].value * basis.wavelet_value(l, static_cast<int>(k), t);
        }
      }
    }
    out[i] = s;
  }
  return out;
}

double besov_norm(const CoefficientSet& coeffs, double s, double pi) {
  if (!(pi > 0.0)) throw BadExponent("need pi > 0");
  const bool max_mod = std::isinf(pi);
  const double expo = s + 0.5 - (max_mod ? 0.0 : 1.0 / pi);
  auto block = [&](int j, auto&& values) {
    double acc = 0.0;
    for (double v : values) {
      const double a = std::abs(v);
      if (max_mod) {
        acc = std::max(acc, a);
      } else {
        acc += std::pow(a, pi);
      }
    }
    if (!max_mod) acc = std::pow(acc, 1.0 / pi);
    return std::pow(2.0, j * expo) * acc;
  };
  std::vector<double> sc(coeffs.scaling.begin(), coeffs.scaling.end());
  double norm = block(coeffs.ell0, sc);
  for (int l = coeffs.ell0 + 1; l <= coeffs.ell1; ++l) {
    std::vector<double> vals;
    vals.reserve(coeffs.level(l).size());
    for (const auto& d : coeffs.level(l)) vals.push_back(d.value);
    norm = std::max(norm, block(l, vals));
  }
  return norm;
}

}  // namespace spotvol
