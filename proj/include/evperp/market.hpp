#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace evperp {

enum class EventClass { Sports, Politics, Crypto, Other };

// What a resolution-zone halt does to open positions.
//   HaltPrice: every position is force-closed at the index on the halt tick.
//   Oracle:    trading and liquidation freeze; positions settle at the outcome at tau.
enum class HaltSettlement { HaltPrice, Oracle };

std::string_view to_string(EventClass c);
std::string_view to_string(HaltSettlement h);

struct MarketSpec {
  int tau = 200;                 // resolution tick
  int halt_offset = 0;           // Delta_R; 0 disables the halt
  int outcome = 1;               // 0 or 1, revealed at tau
  bool draw_outcome = false;     // draw outcome ~ Bernoulli(I_{tau-1}) instead
  double start_index = 0.5;
  double terminal_jump_reference = 0.5;
  EventClass event_class = EventClass::Other;
  HaltSettlement halt_settlement = HaltSettlement::HaltPrice;
  int final_window = 10;         // width of the reporting window when there is no halt

  void validate() const;

  int halt_tick() const noexcept { return tau - halt_offset; }
  bool has_halt() const noexcept { return halt_offset > 0; }
  /// Final liquidation-reporting window is [tau - width, tau).
  int final_window_width() const noexcept { return has_halt() ? halt_offset : final_window; }
};

/// Index values for ticks 0..tau-1 followed by the outcome at tau.
struct IndexPath {
  std::vector<double> values;
  int outcome = 1;

  int tau() const noexcept { return static_cast<int>(values.size()) - 1; }
  double at(int tick) const { return values.at(static_cast<std::size_t>(tick)); }
  double pre_resolution() const { return values.at(values.size() - 2); }
  double terminal_jump() const;
  std::uint64_t fingerprint() const;
};

// Per-tick logit-space step size used when a run config does not set one.
inline constexpr double kDefaultPathVolatility = 0.05;

double logit(double p);
double logistic(double x);

/// Gaussian random walk in logit space starting at spec.start_index, mapped back through
/// the logistic function; the value at tau is the outcome. Deterministic per seed.
IndexPath generate_index_path(const MarketSpec& spec, std::uint64_t seed, double volatility);

}  // namespace evperp
