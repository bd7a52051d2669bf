#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "evperp/core_types.hpp"
#include "evperp/run.hpp"

namespace evperp {

/// Informed-trading rent inputs. The detection cost is a fixed USD amount and is never
/// scaled by leverage.
struct RentProfile {
  double rent_per_event = 0.0;  // r, per unit capital
  double return_volatility = 0.0;
  double detection_cost = 0.0;
  Money capital;
  Leverage leverage;
};

/// Checked constructor; rejects negative volatility or detection cost.
RentProfile make_rent_profile(double rent_per_event, double return_volatility,
                              double detection_cost, double capital, double leverage);

/// L * r * C
double leveraged_rent(const RentProfile& p);

/// (L * r - funding) / (L * sigma). Throws DegenerateVolatility when sigma is 0.
double sharpe_ratio(const RentProfile& p, double funding_cost_per_event = 0.0);

/// D / (L * r * C). Throws ZeroRent when the leveraged rent is not positive.
double detection_cost_per_profit(const RentProfile& p);

struct EngineOutcome {
  std::string engine;
  double pnl = 0.0;
  int margin_calls = 0;
  int requirement_increases = 0;
  int positions = 0;
};

// Reports only; no direction is asserted between the two engines.
struct CompressionReport {
  std::string trader;
  std::uint64_t seed = 0;
  std::uint64_t path_hash = 0;
  EngineOutcome dynamic_engine;
  EngineOutcome static_engine;
  double pnl_difference = 0.0;  // dynamic - static
};

/// Compares one trader across two runs that must share seed and index path.
CompressionReport rent_compression_check(const RunReport& dynamic_run, const RunReport& static_run,
                                         std::string_view trader);

}  // namespace evperp
