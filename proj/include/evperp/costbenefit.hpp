#pragma once

#include <string_view>
#include <vector>

#include "evperp/core_types.hpp"

namespace evperp {

enum class Regime { CostDominated, DetectionDominated, Mixed };

std::string_view to_string(Regime regime);

// l_star = cost_term + detection_term, both over the shared denominator C * (1 - pi_yes).
// A raw threshold below 1 is reported as 1 and flagged always_profitable.
struct ThresholdResult {
  double l_star = 1.0;
  double raw_l_star = 0.0;
  double cost_term = 0.0;
  double detection_term = 0.0;
  Regime regime = Regime::Mixed;
  bool always_profitable = false;
};

inline constexpr double kDefaultRegimeCutoff = 10.0;

/// Expected profit N*(1 - pi_yes) - K - C*P(det)*penalty with N = L*C.
/// Throws MissingLeverage when the scenario carries no leverage.
double expected_manipulation_profit(const ManipulationScenario& s);

/// Same expression evaluated at an arbitrary real leverage (used at L = l_star, which may be < 1).
double expected_manipulation_profit_at(const ManipulationScenario& s, double leverage);

ThresholdResult leverage_threshold(const ManipulationScenario& s,
                                   double ratio_cutoff = kDefaultRegimeCutoff);

Regime classify_regime(const ThresholdResult& t, double ratio_cutoff = kDefaultRegimeCutoff);

struct SweepAxes {
  std::vector<double> k_manip;
  std::vector<double> p_detected;
  std::vector<double> penalty_factor;
  std::vector<double> capital;
  std::vector<double> pi_yes;
};

/// Axes that hold a single value per parameter, taken from the template scenario.
SweepAxes point_axes(const ManipulationScenario& base);

struct GridPoint {
  double k_manip = 0.0;
  double p_detected = 0.0;
  double penalty_factor = 0.0;
  double capital = 0.0;
  double pi_yes = 0.0;
  ThresholdResult threshold;
};

struct SensitivityGrid {
  std::string label;
  std::vector<GridPoint> points;  // K outermost, then P(det), penalty, capital, pi_yes

  double min_l_star() const;
  double max_l_star() const;
};

/// Cartesian sweep of l_star. Empty axes fall back to the template's value.
/// Any grid point that fails validation throws, naming the point.
SensitivityGrid sweep_thresholds(const ManipulationScenario& base, const SweepAxes& axes,
                                 double ratio_cutoff = kDefaultRegimeCutoff);

}  // namespace evperp
