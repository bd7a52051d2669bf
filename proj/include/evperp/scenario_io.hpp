#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evperp/core_types.hpp"
#include "evperp/costbenefit.hpp"

namespace evperp {

/// Reference range for a threshold; a missing high end means unbounded above.
struct ReferenceBand {
  double low = 0.0;
  std::optional<double> high;

  bool contains(double x) const { return x >= low && (!high || x <= *high); }
};

struct ScenarioEntry {
  RawScenario raw;
  int line = 0;
  SweepAxes axes;  // empty axes fall back to the base value
  std::optional<ReferenceBand> base_band;
  std::optional<ReferenceBand> grid_band;
  std::string regime_label;  // expected qualitative regime, when stated
};

/// One `[scenario]` block per scenario. Values are not validated here so that a bad row
/// can be reported without dropping the rest. Throws EmptyInput when there are no blocks.
std::vector<ScenarioEntry> parse_scenarios(std::string_view text, std::string source = "<input>");

/// shortest round-trip decimal form
std::string format_number(double v);

struct ThresholdRow {
  std::string label;
  std::optional<ThresholdResult> result;
  std::string error;
};

std::vector<ThresholdRow> evaluate_thresholds(const std::vector<ScenarioEntry>& entries);

std::string threshold_csv(const std::vector<ThresholdRow>& rows);
std::string threshold_table(const std::vector<ThresholdRow>& rows);

inline constexpr std::string_view kGridCsvHeader =
    "label,k_manip,p_detected,penalty_factor,capital,pi_yes,l_star,raw_l_star,cost_term,"
    "detection_term,regime,always_profitable";

std::string grid_csv(const std::vector<SensitivityGrid>& grids);

}  // namespace evperp
