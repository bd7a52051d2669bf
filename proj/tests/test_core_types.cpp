#include <doctest.h>

#include <cmath>

#include "evperp/core_types.hpp"

using namespace evperp;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an evperp::Error");
  return ErrorCode::InvariantViolation;
}

RawScenario scenario_a() { return RawScenario{"A", 1e5, 5e4, 0.3, 0.10, 10.0, std::nullopt}; }

}  // namespace

TEST_CASE("probability bounds") {
  CHECK(Probability(0.0).value() == 0.0);
  CHECK(Probability(1.0).complement() == 0.0);
  CHECK(Probability(0.3).complement() == doctest::Approx(0.7));
  CHECK(code_of([] { Probability(-0.01); }) == ErrorCode::OutOfRange);
  CHECK(code_of([] { Probability(1.5); }) == ErrorCode::OutOfRange);
  CHECK_THROWS_AS(Probability(std::nan("")), Error);
}

TEST_CASE("money and leverage") {
  CHECK(Money(0.0).amount() == 0.0);
  CHECK(code_of([] { Money(-1.0); }) == ErrorCode::NegativeValue);
  CHECK(Leverage(1.0).value() == 1.0);
  CHECK(Leverage(5.0).notional(Money(1000.0)) == 5000.0);
  CHECK(code_of([] { Leverage(0.5); }) == ErrorCode::InvalidLeverage);
}

TEST_CASE("channel names round-trip") {
  for (std::size_t i = 0; i < kChannelKindCount; ++i) {
    const auto c = static_cast<ManipulationChannel>(i);
    const auto parsed = parse_channel(to_string(c));
    REQUIRE(parsed);
    CHECK(*parsed == c);
  }
  CHECK_FALSE(parse_channel("NotAChannel"));
}

TEST_CASE("validate_scenario accepts the sports scenario") {
  const auto s = validate_scenario(scenario_a());
  CHECK(s.label == "A");
  CHECK(s.k_manip.amount() == 1e5);
  CHECK(s.pi_yes.value() == 0.3);
  CHECK_FALSE(s.leverage);
}

TEST_CASE("validate_scenario rejects degenerate inputs") {
  auto raw = scenario_a();
  raw.pi_yes = 1.0;
  CHECK(code_of([&] { validate_scenario(raw); }) == ErrorCode::DegenerateProbability);
  raw.pi_yes = 1.0 - 1e-13;
  CHECK(code_of([&] { validate_scenario(raw); }) == ErrorCode::DegenerateProbability);

  raw = scenario_a();
  raw.k_manip = -1.0;
  CHECK(code_of([&] { validate_scenario(raw); }) == ErrorCode::NegativeValue);

  raw = scenario_a();
  raw.penalty_factor = -2.0;
  CHECK(code_of([&] { validate_scenario(raw); }) == ErrorCode::NegativeValue);

  raw = scenario_a();
  raw.leverage = 0.9;
  CHECK(code_of([&] { validate_scenario(raw); }) == ErrorCode::InvalidLeverage);

  raw = scenario_a();
  raw.p_detected = 1.2;
  CHECK(code_of([&] { validate_scenario(raw); }) == ErrorCode::OutOfRange);
}
