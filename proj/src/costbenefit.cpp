#include "evperp/costbenefit.hpp"

#include <algorithm>
#include <sstream>

namespace evperp {

namespace {

constexpr double kRegimeFloor = 1e-12;

}  // namespace

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::CostDominated: return "CostDominated";
    case Regime::DetectionDominated: return "DetectionDominated";
    case Regime::Mixed: return "Mixed";
  }
  return "Mixed";
}

double expected_manipulation_profit_at(const ManipulationScenario& s, double leverage) {
  const double c = s.capital.amount();
  const double notional = leverage * c;
  return notional * s.pi_yes.complement() - s.k_manip.amount() -
         c * s.p_detected.value() * s.penalty_factor;
}

double expected_manipulation_profit(const ManipulationScenario& s) {
  if (!s.leverage) {
    throw Error(ErrorCode::MissingLeverage, "scenario '" + s.label + "' has no leverage");
  }
  return expected_manipulation_profit_at(s, s.leverage->value());
}

Regime classify_regime(const ThresholdResult& t, double ratio_cutoff) {
  if (t.cost_term / std::max(t.detection_term, kRegimeFloor) >= ratio_cutoff) {
    return Regime::CostDominated;
  }
  if (t.detection_term / std::max(t.cost_term, kRegimeFloor) >= ratio_cutoff) {
    return Regime::DetectionDominated;
  }
  return Regime::Mixed;
}

ThresholdResult leverage_threshold(const ManipulationScenario& s, double ratio_cutoff) {
  const double c = s.capital.amount();
  if (c <= 0.0) {
    throw Error(ErrorCode::ZeroCapital, "scenario '" + s.label + "' has zero capital");
  }
  if (s.pi_yes.value() >= 1.0 - kProbabilityEpsilon) {
    throw Error(ErrorCode::DegenerateProbability, "scenario '" + s.label + "'");
  }
  const double denominator = c * s.pi_yes.complement();

  ThresholdResult r;
  r.cost_term = s.k_manip.amount() / denominator;
  r.detection_term = c * s.p_detected.value() * s.penalty_factor / denominator;
  r.raw_l_star = r.cost_term + r.detection_term;
  r.always_profitable = r.raw_l_star < 1.0;
  r.l_star = r.always_profitable ? 1.0 : r.raw_l_star;
  r.regime = classify_regime(r, ratio_cutoff);
  return r;
}

SweepAxes point_axes(const ManipulationScenario& base) {
  return SweepAxes{
      {base.k_manip.amount()},      {base.p_detected.value()}, {base.penalty_factor},
      {base.capital.amount()},      {base.pi_yes.value()},
  };
}

double SensitivityGrid::min_l_star() const {
  double out = points.empty() ? 0.0 : points.front().threshold.l_star;
  for (const auto& p : points) out = std::min(out, p.threshold.l_star);
  return out;
}

double SensitivityGrid::max_l_star() const {
  double out = points.empty() ? 0.0 : points.front().threshold.l_star;
  for (const auto& p : points) out = std::max(out, p.threshold.l_star);
  return out;
}

SensitivityGrid sweep_thresholds(const ManipulationScenario& base, const SweepAxes& axes,
                                 double ratio_cutoff) {
  const SweepAxes fallback = point_axes(base);
  const auto pick = [](const std::vector<double>& axis, const std::vector<double>& dflt) {
    return axis.empty() ? dflt : axis;
  };
  const auto ks = pick(axes.k_manip, fallback.k_manip);
  const auto ps = pick(axes.p_detected, fallback.p_detected);
  const auto pens = pick(axes.penalty_factor, fallback.penalty_factor);
  const auto caps = pick(axes.capital, fallback.capital);
  const auto pis = pick(axes.pi_yes, fallback.pi_yes);

  SensitivityGrid grid;
  grid.label = base.label;
  grid.points.reserve(ks.size() * ps.size() * pens.size() * caps.size() * pis.size());
  for (double k : ks) {
    for (double p : ps) {
      for (double pen : pens) {
        for (double cap : caps) {
          for (double pi : pis) {
            RawScenario raw{base.label, k, cap, pi, p, pen, std::nullopt};
            try {
              const auto s = validate_scenario(raw);
              grid.points.push_back({k, p, pen, cap, pi, leverage_threshold(s, ratio_cutoff)});
            } catch (const Error& e) {
              std::ostringstream os;
              os << "grid point (k=" << k << ", p_det=" << p << ", penalty=" << pen
                 << ", capital=" << cap << ", pi_yes=" << pi << ") of '" << base.label
                 << "': " << e.what();
              throw Error(e.code(), os.str());
            }
          }
        }
      }
    }
  }
  return grid;
}

}  // namespace evperp
