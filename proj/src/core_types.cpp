#include "evperp/core_types.hpp"

#include <array>
#include <cmath>
#include <sstream>

namespace evperp {

namespace {

constexpr std::array<std::string_view, kChannelKindCount> kChannelNames = {
    "TradeBased",
    "SpoofWithdraw",
    "InformationBased",
    "OracleIndex",
    "OutcomeSports",
    "OutcomeSubNationalPolitical",
    "OutcomeLargeElectorate",
    "OutcomeMacro",
    "InformationReleaseTiming",
    "InformedTradingRents",
    "PreEmption",
    "HaltArbitrage",
    "BadDebtShifting",
};

std::string describe(std::string_view field, double value) {
  std::ostringstream os;
  os << field << " = " << value;
  return os.str();
}

}  // namespace

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateProbability: return "DegenerateProbability";
    case ErrorCode::NegativeValue: return "NegativeValue";
    case ErrorCode::InvalidLeverage: return "InvalidLeverage";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::ZeroCapital: return "ZeroCapital";
    case ErrorCode::MissingLeverage: return "MissingLeverage";
    case ErrorCode::DegenerateVolatility: return "DegenerateVolatility";
    case ErrorCode::ZeroRent: return "ZeroRent";
    case ErrorCode::InsufficientDepth: return "InsufficientDepth";
    case ErrorCode::SettledVenue: return "SettledVenue";
    case ErrorCode::VenueHalted: return "VenueHalted";
    case ErrorCode::DoubleSettlement: return "DoubleSettlement";
    case ErrorCode::NotAtResolution: return "NotAtResolution";
    case ErrorCode::MismatchedSeeds: return "MismatchedSeeds";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

Probability::Probability(double value) : value_(value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw Error(ErrorCode::OutOfRange, describe("probability", value) + " outside [0, 1]");
  }
}

Money::Money(double amount) : amount_(amount) {
  if (!(amount >= 0.0) || !std::isfinite(amount)) {
    throw Error(ErrorCode::NegativeValue, describe("amount", amount));
  }
}

Leverage::Leverage(double value) : value_(value) {
  if (!(value >= 1.0) || !std::isfinite(value)) {
    throw Error(ErrorCode::InvalidLeverage, describe("leverage", value) + " below 1");
  }
}

std::string_view to_string(ManipulationChannel channel) {
  return kChannelNames[static_cast<std::size_t>(channel)];
}

std::optional<ManipulationChannel> parse_channel(std::string_view name) {
  for (std::size_t i = 0; i < kChannelNames.size(); ++i) {
    if (kChannelNames[i] == name) return static_cast<ManipulationChannel>(i);
  }
  return std::nullopt;
}

ManipulationScenario validate_scenario(const RawScenario& raw) {
  const auto require_non_negative = [](std::string_view field, double v) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::NegativeValue, describe(field, v));
    }
  };
  require_non_negative("k_manip", raw.k_manip);
  require_non_negative("capital", raw.capital);
  require_non_negative("penalty_factor", raw.penalty_factor);

  if (!(raw.pi_yes >= 0.0 && raw.pi_yes <= 1.0)) {
    throw Error(ErrorCode::OutOfRange, describe("pi_yes", raw.pi_yes));
  }
  if (raw.pi_yes >= 1.0 - kProbabilityEpsilon) {
    throw Error(ErrorCode::DegenerateProbability,
                describe("pi_yes", raw.pi_yes) + " leaves no room for the manipulated outcome");
  }
  if (!(raw.p_detected >= 0.0 && raw.p_detected <= 1.0)) {
    throw Error(ErrorCode::OutOfRange, describe("p_detected", raw.p_detected));
  }

  ManipulationScenario s;
  s.label = raw.label;
  s.k_manip = Money(raw.k_manip);
  s.capital = Money(raw.capital);
  s.pi_yes = Probability(raw.pi_yes);
  s.p_detected = Probability(raw.p_detected);
  s.penalty_factor = raw.penalty_factor;
  if (raw.leverage) s.leverage = Leverage(*raw.leverage);
  return s;
}

}  // namespace evperp
