#include "evperp/market.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "evperp/core_types.hpp"
#include "evperp/rng.hpp"

namespace evperp {

namespace {

constexpr std::uint64_t kPathStream = 1;
constexpr std::uint64_t kOutcomeStream = 2;

}  // namespace

std::string_view to_string(EventClass c) {
  switch (c) {
    case EventClass::Sports: return "sports";
    case EventClass::Politics: return "politics";
    case EventClass::Crypto: return "crypto";
    case EventClass::Other: return "other";
  }
  return "other";
}

std::string_view to_string(HaltSettlement h) {
  return h == HaltSettlement::HaltPrice ? "halt_price" : "oracle";
}

void MarketSpec::validate() const {
  if (tau < 2) throw Error(ErrorCode::InvalidConfig, "tau must be at least 2");
  if (halt_offset < 0 || halt_offset >= tau) {
    throw Error(ErrorCode::InvalidConfig, "halt_offset must satisfy 0 <= halt_offset < tau");
  }
  if (outcome != 0 && outcome != 1) throw Error(ErrorCode::InvalidConfig, "outcome must be 0 or 1");
  if (!(start_index > 0.0 && start_index < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "start_index must lie strictly inside (0, 1)");
  }
  if (!(terminal_jump_reference >= 0.0 && terminal_jump_reference <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "terminal_jump_reference must lie in [0, 1]");
  }
  if (final_window < 0 || final_window >= tau) {
    throw Error(ErrorCode::InvalidConfig, "final_window must satisfy 0 <= final_window < tau");
  }
}

double logit(double p) { return std::log(p / (1.0 - p)); }

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double IndexPath::terminal_jump() const { return std::abs(outcome - pre_resolution()); }

std::uint64_t IndexPath::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (double v : values) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 0x00000100000001b3ull;
    }
  }
  return h;
}

IndexPath generate_index_path(const MarketSpec& spec, std::uint64_t seed, double volatility) {
  spec.validate();
  if (!(volatility >= 0.0) || !std::isfinite(volatility)) {
    throw Error(ErrorCode::InvalidConfig, "volatility must be non-negative");
  }
  IndexPath path;
  path.values.resize(static_cast<std::size_t>(spec.tau) + 1);

  Rng rng(seed, kPathStream);
  double x = logit(spec.start_index);
  for (int t = 0; t < spec.tau; ++t) {
    if (t > 0 && volatility > 0.0) x += volatility * rng.normal();
    path.values[static_cast<std::size_t>(t)] = logistic(x);
  }

  path.outcome = spec.outcome;
  if (spec.draw_outcome) {
    Rng outcome_rng(seed, kOutcomeStream);
    path.outcome = outcome_rng.bernoulli(path.pre_resolution()) ? 1 : 0;
  }
  path.values.back() = static_cast<double>(path.outcome);
  return path;
}

}  // namespace evperp
