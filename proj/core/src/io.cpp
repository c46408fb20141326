#include "spotvol/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "spotvol/errors.hpp"

namespace spotvol {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::filesystem::path manifest_path(const std::filesystem::path& data_path) {
  std::filesystem::path p = data_path;
  if (p.extension() == ".csv") p.replace_extension();
  p += ".manifest.json";
  return p;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  return out;
}

double parse_double(const std::string& field, const std::string& context) {
  double v = 0.0;
  const auto res =
      std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
    throw DataError("bad numeric field '" + field + "' in " + context);
  }
  return v;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) fields.push_back(f);
  return fields;
}

}  // namespace

void write_observations(const std::filesystem::path& path,
                        const ObservationSet& obs) {
  auto out = open_out(path);
  const bool with_truth = obs.truth.has_value();
  out << (with_truth ? "t,z,x,sigma2\n" : "t,z\n");
  const double dn = 1.0 / static_cast<double>(obs.n);
  for (std::size_t j = 0; j < obs.z.size(); ++j) {
    out << format_double(static_cast<double>(j) * dn) << ','
        << format_double(obs.z[j]);
    if (with_truth) {
      out << ',' << format_double(obs.truth->x[j]) << ','
          << format_double(obs.truth->sigma2[j]);
    }
    out << '\n';
  }
}

ObservationSet read_observations(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty file: " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const bool with_truth = line == "t,z,x,sigma2";
  if (!with_truth && line != "t,z") {
    throw DataError("expected header 't,z' or 't,z,x,sigma2', got '" + line +
                    "'");
  }
  std::vector<double> t, z, x, s2;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != (with_truth ? 4u : 2u)) {
      throw DataError("bad column count in " + path.string());
    }
    t.push_back(parse_double(fields[0], path.string()));
    z.push_back(parse_double(fields[1], path.string()));
    if (with_truth) {
      x.push_back(parse_double(fields[2], path.string()));
      s2.push_back(parse_double(fields[3], path.string()));
    }
  }
  if (t.size() < 2) throw DataError("too few rows in " + path.string());
  ObservationSet obs;
  obs.n = static_cast<std::int64_t>(t.size()) - 1;
  const double dn = 1.0 / static_cast<double>(obs.n);
  for (std::size_t j = 0; j < t.size(); ++j) {
    if (std::abs(t[j] - static_cast<double>(j) * dn) > 1e-9) {
      throw NonUniformGrid("t column is not the uniform grid j/n");
    }
  }
  obs.z = std::move(z);
  if (with_truth) {
    obs.truth = ObservationSet::Truth{std::move(x), std::move(s2), 0, {}};
  }
  return obs;
}

void write_estimate_csv(const std::filesystem::path& path,
                        const VolatilityEstimate& est) {
  auto out = open_out(path);
  out << "t,sigma2_hat\n";
  for (std::size_t i = 0; i < est.grid.size(); ++i) {
    out << format_double(est.grid[i]) << ',' << format_double(est.values[i])
        << '\n';
  }
}

void write_campaign_cells(const std::filesystem::path& path,
                          const CampaignResult& result) {
  auto out = open_out(path);
  out << "n,replicate,lp_error\n";
  for (const auto& c : result.cells) {
    out << c.n << ',' << c.replicate << ',' << format_double(c.lp_error)
        << '\n';
  }
}

void write_campaign_summary(const std::filesystem::path& path,
                            const CampaignResult& result) {
  auto out = open_out(path);
  out << "n,median,q25,q75\n";
  for (const auto& s : result.summary) {
    out << s.n << ',' << format_double(s.median) << ','
        << format_double(s.q25) << ',' << format_double(s.q75) << '\n';
  }
}

void write_manifest(const std::filesystem::path& path,
                    nlohmann::json manifest) {
  manifest["format_version"] = kFormatVersion;
  auto out = open_out(path);
  out << manifest.dump(2) << '\n';
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open: " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError("bad JSON in " + path.string() + ": " + e.what());
  }
}

}  // namespace spotvol
