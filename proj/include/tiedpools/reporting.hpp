#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tiedpools/estimators.hpp"
#include "tiedpools/pool_inference.hpp"
#include "tiedpools/simulator.hpp"

namespace tiedpools {

using ReportJson = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";

// r_i = offset + scale * log_base(strength_i), shifted so the anchor rates 0.
struct RatingScale {
  double offset = 0;
  double scale = 400;
  double base = 10;
  std::optional<std::string> anchor;
};

std::vector<std::pair<std::string, double>> to_ratings(const std::vector<std::string>& players,
                                                       const Vector& strengths,
                                                       const RatingScale& scale = {});
std::vector<std::pair<std::string, double>> to_ratings(const ModelFit& fit,
                                                       const RatingScale& scale = {});

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

struct RunManifest {
  std::string command;
  std::uint64_t input_digest = 0;
  ReportJson config = ReportJson::object();
  std::string tool_version = kToolVersion;
  std::string timestamp;
};

// UTC ISO-8601. Honors SOURCE_DATE_EPOCH for reproducible output.
std::string current_timestamp();

// Rounds to 10 significant digits; non-finite values become null.
ReportJson report_real(double v);

ReportJson fit_to_json(const ModelFit& fit, const ComparisonData& data, const RatingScale& scale);
ReportJson pool_inference_to_json(const PoolInference& inf);
ReportJson imputed_to_json(const ImputedGames& imp, const std::array<std::string, 3>& labels);
ReportJson simulation_to_json(const SimulationReport& rep, const std::array<std::string, 3>& labels);
ReportJson expectations_to_json(const SeriesExpectations& ex, const std::array<std::string, 3>& labels);
ReportJson z_scores_to_json(const std::vector<ZScore>& z);

// {"manifest": ..., "report": body}; the manifest records a digest of the body.
ReportJson wrap_report(const RunManifest& manifest, ReportJson body);

}  // namespace tiedpools
