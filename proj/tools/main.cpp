#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "spotvol/errors.hpp"
#include "spotvol/estimator.hpp"
#include "spotvol/io.hpp"
#include "spotvol/kernel.hpp"
#include "spotvol/quadrature.hpp"
#include "spotvol/rate.hpp"
#include "spotvol/simulate.hpp"
#include "spotvol/wavelet.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

// JSON config file supplies defaults; explicitly passed flags win.
void merge_config(const CLI::App& app, const std::string& config_path,
                  json& out) {
  if (config_path.empty()) return;
  out = spotvol::read_json(config_path);
  (void)app;
}

template <typename T>
void take(const CLI::App& app, const json& cfg, const std::string& flag,
          const std::string& key, T& value) {
  const auto* opt = app.get_option_no_throw("--" + flag);
  const bool from_cli = opt != nullptr && opt->count() > 0;
  if (!from_cli && cfg.contains(key)) value = cfg.at(key).get<T>();
}

spotvol::VolatilityScenario make_scenario(const std::string& name,
                                          const json& cfg) {
  if (cfg.contains("scenario") && cfg["scenario"].is_object()) {
    return spotvol::scenario_from_json(cfg["scenario"]);
  }
  if (name == "const") return spotvol::ConstVol{};
  if (name == "sine") return spotvol::SineVol{};
  if (name == "ito") return spotvol::ItoVol{};
  if (name == "fbm") return spotvol::FbmVol{};
  throw spotvol::ConfigError("unknown scenario: '" + name + "'");
}

spotvol::PreAveragingKernel make_kernel(const std::string& spec) {
  if (spec.size() > 5 && spec.ends_with(".json")) {
    return spotvol::PreAveragingKernel::from_descriptor(
        spotvol::read_json(spec));
  }
  return spotvol::PreAveragingKernel::from_descriptor(
      json{{"family", spec}});
}

struct SharedFlags {
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out_dir = ".";
  std::string config_path;
  int jobs = 1;
};

void add_shared(CLI::App* cmd, SharedFlags& shared, bool seed_required) {
  auto* seed_opt =
      cmd->add_option("--seed", shared.seed, "RNG seed (all randomness)");
  if (seed_required) seed_opt->required();
  cmd->add_option("--out-dir", shared.out_dir, "output directory");
  cmd->add_option("--config", shared.config_path, "JSON config file");
  cmd->add_option("--jobs", shared.jobs, "parallel campaign cells")
      ->check(CLI::PositiveNumber);
}

// Deliberately excludes --jobs: outputs must not depend on the schedule.
json shared_manifest(const SharedFlags& shared) {
  return {{"seed", shared.seed}, {"out_dir", shared.out_dir}};
}

int cmd_simulate(const CLI::App& cmd, SharedFlags& shared, std::int64_t n,
                 std::string scenario_name, double noise_a, std::string eta,
                 int refinement, std::string out_file, bool no_truth) {
  json cfg;
  merge_config(cmd, shared.config_path, cfg);
  take(cmd, cfg, "n", "n", n);
  take(cmd, cfg, "scenario", "scenario_name", scenario_name);
  take(cmd, cfg, "noise-a", "noise_a", noise_a);
  take(cmd, cfg, "eta", "eta", eta);
  take(cmd, cfg, "refinement", "refinement", refinement);
  if (n <= 0) throw spotvol::ConfigError("--n is required and positive");

  const auto scenario = make_scenario(scenario_name, cfg);
  const auto path = spotvol::simulate_path(scenario, nullptr, n, refinement,
                                           shared.seed);
  spotvol::NoiseModel noise =
      spotvol::constant_noise(noise_a, spotvol::eta_law_from_name(eta));
  auto obs = spotvol::add_noise(path, noise, shared.seed);
  if (no_truth) obs.truth.reset();

  const fs::path out = fs::path(shared.out_dir) / out_file;
  spotvol::write_observations(out, obs);
  json manifest = shared_manifest(shared);
  manifest["command"] = "simulate";
  manifest["n"] = n;
  manifest["scenario"] = spotvol::scenario_to_json(scenario);
  manifest["noise_a"] = noise_a;
  manifest["eta"] = eta;
  manifest["refinement"] = refinement;
  manifest["output"] = out.string();
  spotvol::write_manifest(spotvol::manifest_path(out), manifest);
  std::cout << "wrote " << out.string() << " (" << obs.z.size() << " rows)\n";
  return 0;
}

int cmd_estimate(const CLI::App& cmd, SharedFlags& shared, std::string in_file,
                 std::string out_file, std::string kernel_name,
                 std::string basis_name, std::int64_t m, double alpha0,
                 int ell0, int ell1, double kappa, bool clip) {
  json cfg;
  merge_config(cmd, shared.config_path, cfg);
  take(cmd, cfg, "kernel", "kernel", kernel_name);
  take(cmd, cfg, "basis", "basis", basis_name);
  take(cmd, cfg, "m", "m", m);
  take(cmd, cfg, "alpha0", "alpha0", alpha0);
  take(cmd, cfg, "kappa", "kappa_tilde", kappa);

  const auto obs = spotvol::read_observations(in_file);
  const auto kernel = make_kernel(kernel_name);
  const spotvol::WaveletBasis basis(
      spotvol::wavelet_family_from_name(basis_name));
  spotvol::EstimatorConfig ec;
  ec.m = m;
  ec.alpha0 = alpha0;
  ec.ell0 = ell0;
  ec.ell1 = ell1;
  ec.kappa_tilde = kappa;
  ec.clip_nonneg = clip;

  const std::int64_t grid_n = std::min<std::int64_t>(obs.n, 4096);
  std::vector<double> grid(static_cast<size_t>(grid_n) + 1);
  for (size_t i = 0; i < grid.size(); ++i) {
    grid[i] = static_cast<double>(i) / static_cast<double>(grid_n);
  }
  const auto est = spotvol::estimate(obs, ec, kernel, basis, grid);

  int kept = 0;
  for (const auto& row : est.coefficients.detail) {
    for (const auto& d : row) kept += d.kept ? 1 : 0;
  }

  const fs::path out = fs::path(shared.out_dir) / out_file;
  spotvol::write_estimate_csv(out, est);
  fs::path coeff_path = out;
  if (coeff_path.extension() == ".csv") coeff_path.replace_extension();
  coeff_path += ".coeffs.json";
  {
    json cj = est.coefficients.to_json();
    spotvol::write_manifest(coeff_path, cj);
  }
  json manifest = shared_manifest(shared);
  manifest["command"] = "estimate";
  manifest["input"] = in_file;
  manifest["n"] = est.n;
  manifest["m"] = est.config.m;
  manifest["ell0"] = est.config.ell0;
  manifest["ell1"] = est.config.ell1;
  manifest["alpha0"] = est.config.alpha0;
  manifest["tau"] = est.tau;
  manifest["kappa_tilde"] = est.config.kappa_tilde;
  manifest["noise_var_hat"] = est.noise_var_hat;
  manifest["kernel"] = kernel.descriptor();
  manifest["basis"] = basis_name;
  manifest["kept_detail_count"] = kept;
  spotvol::write_manifest(spotvol::manifest_path(out), manifest);

  std::cout << "n=" << est.n << " m=" << est.config.m
            << " ell0=" << est.config.ell0 << " ell1=" << est.config.ell1
            << " tau=" << spotvol::format_double(est.tau) << " kept=" << kept
            << "\n";
  return 0;
}

int cmd_mc_rate(const CLI::App& cmd, SharedFlags& shared,
                std::vector<std::int64_t> n_grid, std::string scenario_name,
                double noise_a, std::string eta, int replicates, double p,
                double region_lo, double region_hi, std::string kernel_name,
                std::string basis_name, int refinement,
                std::string out_prefix) {
  json cfg;
  merge_config(cmd, shared.config_path, cfg);
  take(cmd, cfg, "replicates", "replicates", replicates);
  take(cmd, cfg, "p", "p", p);
  take(cmd, cfg, "noise-a", "noise_a", noise_a);
  if (n_grid.size() < 3) {
    throw spotvol::ConfigError("--n-grid needs at least 3 sizes");
  }

  spotvol::CampaignConfig cc;
  cc.scenario = make_scenario(scenario_name, cfg);
  cc.noise = spotvol::constant_noise(noise_a,
                                     spotvol::eta_law_from_name(eta));
  cc.basis = spotvol::wavelet_family_from_name(basis_name);
  cc.n_grid = n_grid;
  cc.replicates = replicates;
  cc.seed_base = shared.seed;
  cc.p = p;
  cc.region_lo = region_lo;
  cc.region_hi = region_hi;
  cc.refinement = refinement;
  cc.jobs = shared.jobs;
  const auto kernel = make_kernel(kernel_name);

  const auto result = spotvol::run_campaign(cc, kernel);

  const fs::path base = fs::path(shared.out_dir) / out_prefix;
  spotvol::write_campaign_cells(fs::path(base.string() + ".cells.csv"), result);
  spotvol::write_campaign_summary(fs::path(base.string() + ".summary.csv"),
                                  result);
  json manifest = shared_manifest(shared);
  manifest["command"] = "mc-rate";
  manifest["result"] = result.to_json();
  spotvol::write_manifest(fs::path(base.string() + ".json"), manifest);

  std::cout << "slope=" << spotvol::format_double(result.slope)
            << " se=" << spotvol::format_double(result.slope_se) << "\n";
  return 0;
}

int cmd_kernel_info(std::string kernel_name, double cbar, double a_inf) {
  const auto kernel = make_kernel(kernel_name);
  const spotvol::KernelProfiles prof(kernel);
  const double lambda_norm =
      std::sqrt(spotvol::gl_integrate_pieces(
          [&](double s) {
            const double v = prof.Lambda(s);
            return v * v;
          },
          kernel.breakpoints()));
  const auto tilde_l2 = kernel.lambda_l2() / kernel.bar_lambda();
  const double kappa =
      spotvol::default_kappa(kernel, a_inf * a_inf, cbar);
  std::printf("kernel          %s\n", kernel.name().c_str());
  std::printf("bar_lambda      %.6f\n", kernel.bar_lambda());
  std::printf("||lambda||_L2   %.6f\n", kernel.lambda_l2());
  std::printf("||lambda~||_L2  %.6f\n", tilde_l2);
  std::printf("||Lambda||_L2   %.6f\n", lambda_norm);
  std::printf("default kappa~  %.6f  (cbar=%g, ||a||_inf=%g)\n", kappa, cbar,
              a_inf);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spot volatility estimation from noisy high-frequency data"};
  app.require_subcommand(1);

  SharedFlags sh_sim, sh_est, sh_mc;

  // simulate
  auto* sim = app.add_subcommand("simulate", "generate a noisy observation set");
  std::int64_t sim_n = 0;
  std::string sim_scenario = "sine";
  double sim_noise_a = 0.01;
  std::string sim_eta = "gaussian";
  int sim_refinement = 16;
  std::string sim_out = "obs.csv";
  bool sim_no_truth = false;
  sim->add_option("--n", sim_n, "sample count")->required();
  sim->add_option("--scenario", sim_scenario, "const|sine|ito|fbm");
  sim->add_option("--noise-a", sim_noise_a, "noise intensity a");
  sim->add_option("--eta", sim_eta, "gaussian|uniform|rademacher");
  sim->add_option("--refinement", sim_refinement, "Euler substeps per sample");
  sim->add_option("--out", sim_out, "output CSV name");
  sim->add_flag("--no-truth", sim_no_truth, "drop the hidden truth columns");
  add_shared(sim, sh_sim, /*seed_required=*/true);

  // estimate
  auto* est = app.add_subcommand("estimate", "run the threshold estimator");
  std::string est_in, est_out = "estimate.csv";
  std::string est_kernel = "step", est_basis = "daubechies-4";
  std::int64_t est_m = 0;
  double est_alpha0 = 0.25, est_kappa = 0.0;
  int est_ell0 = -1, est_ell1 = -1;
  bool est_clip = false;
  est->add_option("--in", est_in, "input observations CSV")->required();
  est->add_option("--out", est_out, "output CSV name");
  est->add_option("--kernel", est_kernel, "step|sine|<descriptor.json>");
  est->add_option("--basis", est_basis, "haar|daubechies-{4,6,8}");
  est->add_option("--m", est_m, "pre-averaging block count");
  est->add_option("--alpha0", est_alpha0, "tuning exponent in (0,1/2)");
  est->add_option("--ell0", est_ell0, "coarse level override");
  est->add_option("--ell1", est_ell1, "fine level override");
  est->add_option("--kappa", est_kappa, "threshold constant override");
  est->add_flag("--clip-nonneg", est_clip, "clip sigma2_hat at 0");
  add_shared(est, sh_est, /*seed_required=*/false);

  // mc-rate
  auto* mc = app.add_subcommand("mc-rate", "Monte Carlo error-vs-n campaign");
  std::vector<std::int64_t> mc_n_grid;
  std::string mc_scenario = "sine";
  double mc_noise_a = 0.01;
  std::string mc_eta = "gaussian";
  int mc_replicates = 20;
  double mc_p = 2.0, mc_lo = 0.0, mc_hi = 1.0;
  std::string mc_kernel = "step", mc_basis = "daubechies-4";
  int mc_refinement = 16;
  std::string mc_out = "campaign";
  mc->add_option("--n-grid", mc_n_grid, "sample counts")->required();
  mc->add_option("--scenario", mc_scenario, "const|sine|ito|fbm");
  mc->add_option("--noise-a", mc_noise_a, "noise intensity a");
  mc->add_option("--eta", mc_eta, "gaussian|uniform|rademacher");
  mc->add_option("--replicates", mc_replicates, "replicates per n");
  mc->add_option("--p", mc_p, "loss exponent");
  mc->add_option("--region-lo", mc_lo, "error region lower edge");
  mc->add_option("--region-hi", mc_hi, "error region upper edge");
  mc->add_option("--kernel", mc_kernel, "step|sine|<descriptor.json>");
  mc->add_option("--basis", mc_basis, "haar|daubechies-{4,6,8}");
  mc->add_option("--refinement", mc_refinement, "Euler substeps per sample");
  mc->add_option("--out-prefix", mc_out, "output file prefix");
  add_shared(mc, sh_mc, /*seed_required=*/true);

  // kernel-info
  auto* ki = app.add_subcommand("kernel-info", "pre-averaging kernel report");
  std::string ki_kernel = "step";
  double ki_cbar = 1.0, ki_a = 0.0;
  ki->add_option("--kernel", ki_kernel, "step|sine|<descriptor.json>");
  ki->add_option("--cbar", ki_cbar, "volatility sup bound");
  ki->add_option("--a-inf", ki_a, "noise intensity sup bound");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (sim->parsed()) {
      return cmd_simulate(*sim, sh_sim, sim_n, sim_scenario, sim_noise_a,
                          sim_eta, sim_refinement, sim_out, sim_no_truth);
    }
    if (est->parsed()) {
      return cmd_estimate(*est, sh_est, est_in, est_out, est_kernel, est_basis,
                          est_m, est_alpha0, est_ell0, est_ell1, est_kappa,
                          est_clip);
    }
    if (mc->parsed()) {
      return cmd_mc_rate(*mc, sh_mc, mc_n_grid, mc_scenario, mc_noise_a,
                         mc_eta, mc_replicates, mc_p, mc_lo, mc_hi, mc_kernel,
                         mc_basis, mc_refinement, mc_out);
    }
    if (ki->parsed()) {
      return cmd_kernel_info(ki_kernel, ki_cbar, ki_a);
    }
  } catch (const spotvol::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const spotvol::NotAntisymmetric& e) {
    std::cerr << "kernel error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const spotvol::DegenerateKernel& e) {
    std::cerr << "kernel error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const spotvol::InvalidDomain& e) {
    std::cerr << "kernel error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const spotvol::ConfigInconsistent& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const spotvol::BadBlockCount& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const spotvol::NonUniformGrid& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const spotvol::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const spotvol::Error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
