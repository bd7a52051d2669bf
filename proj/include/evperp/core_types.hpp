#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace evperp {

enum class ErrorCode {
  DegenerateProbability,
  NegativeValue,
  InvalidLeverage,
  OutOfRange,
  ZeroCapital,
  MissingLeverage,
  DegenerateVolatility,
  ZeroRent,
  InsufficientDepth,
  SettledVenue,
  VenueHalted,
  DoubleSettlement,
  NotAtResolution,
  MismatchedSeeds,
  ParseError,
  EmptyInput,
  InvalidConfig,
  InvariantViolation,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

// pi_yes must stay below 1 - kProbabilityEpsilon so the threshold denominator is finite.
inline constexpr double kProbabilityEpsilon = 1e-12;

class Probability {
public:
  constexpr Probability() = default;
  explicit Probability(double value);

  constexpr double value() const noexcept { return value_; }
  constexpr double complement() const noexcept { return 1.0 - value_; }

  friend constexpr bool operator==(Probability, Probability) = default;

private:
  double value_ = 0.0;
};

/// Non-negative USD amount.
class Money {
public:
  constexpr Money() = default;
  explicit Money(double amount);

  constexpr double amount() const noexcept { return amount_; }

  friend constexpr bool operator==(Money, Money) = default;

private:
  double amount_ = 0.0;
};

/// Leverage multiplier, >= 1 (1 = fully collateralized).
class Leverage {
public:
  constexpr Leverage() = default;
  explicit Leverage(double value);

  constexpr double value() const noexcept { return value_; }

  /// Notional supported by `capital` at this leverage: N = L * C.
  double notional(Money capital) const noexcept { return value_ * capital.amount(); }

  friend constexpr bool operator==(Leverage, Leverage) = default;

private:
  double value_ = 1.0;
};

enum class ManipulationChannel : std::uint8_t {
  TradeBased,
  SpoofWithdraw,
  InformationBased,
  OracleIndex,
  OutcomeSports,
  OutcomeSubNationalPolitical,
  OutcomeLargeElectorate,
  OutcomeMacro,
  InformationReleaseTiming,
  InformedTradingRents,
  PreEmption,
  HaltArbitrage,
  BadDebtShifting,
};

inline constexpr std::size_t kChannelKindCount = 13;

std::string_view to_string(ManipulationChannel channel);
std::optional<ManipulationChannel> parse_channel(std::string_view name);

/// Inputs to the outcome-manipulation cost-benefit model. Built only through
/// validate_scenario(), so every instance satisfies the field invariants.
struct ManipulationScenario {
  std::string label;
  Money k_manip;
  Money capital;
  Probability pi_yes;
  Probability p_detected;
  double penalty_factor = 0.0;
  std::optional<Leverage> leverage;
};

struct RawScenario {
  std::string label;
  double k_manip = 0.0;
  double capital = 0.0;
  double pi_yes = 0.0;
  double p_detected = 0.0;
  double penalty_factor = 0.0;
  std::optional<double> leverage;
};

ManipulationScenario validate_scenario(const RawScenario& raw);

}  // namespace evperp
