#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "spotvol/estimator.hpp"
#include "spotvol/observation.hpp"
#include "spotvol/rate.hpp"

namespace spotvol {

inline constexpr const char* kFormatVersion = "spotvol/1";

/// foo.csv -> foo.manifest.json
std::filesystem::path manifest_path(const std::filesystem::path& data_path);

/// CSV header "t,z", or "t,z,x,sigma2" when the truth is retained.
void write_observations(const std::filesystem::path& path,
                        const ObservationSet& obs);
ObservationSet read_observations(const std::filesystem::path& path);

/// CSV header "t,sigma2_hat".
void write_estimate_csv(const std::filesystem::path& path,
                        const VolatilityEstimate& est);

/// Flat CSV "n,replicate,lp_error".
void write_campaign_cells(const std::filesystem::path& path,
                          const CampaignResult& result);
/// Plot-ready CSV "n,median,q25,q75".
void write_campaign_summary(const std::filesystem::path& path,
                            const CampaignResult& result);

/// JSON with a format-version stamp added.
void write_manifest(const std::filesystem::path& path, nlohmann::json manifest);
nlohmann::json read_json(const std::filesystem::path& path);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

}  // namespace spotvol
