#pragma once

#include <string_view>

namespace evperp {

enum class EngineKind { StaticE0, DynamicE2 };

std::string_view to_string(EngineKind kind);

// Dynamic requirement = m0 * N * (1 + alpha * max(0, vol / vol_ref - 1)
//                                   + beta  * max(0, 1 - ttr / ttr_ref)
//                                   + gamma * |index - entry|)
// Every stress term is non-negative, so the dynamic requirement never drops below
// the static one for the same m0.
struct MarginEngine {
  EngineKind kind = EngineKind::StaticE0;
  double m0 = 0.1;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double vol_ref = 0.02;
  int vol_window = 20;
  double ttr_ref = 50.0;

  void validate() const;

  static MarginEngine static_e0(double m0) { return MarginEngine{EngineKind::StaticE0, m0}; }
};

struct MarginInputs {
  double notional = 0.0;
  double realized_vol = 0.0;
  double ticks_to_resolution = 0.0;
  double displacement = 0.0;  // |index - entry|
};

struct Requirement {
  double base = 0.0;
  double vol_factor = 0.0;
  double time_factor = 0.0;
  double move_factor = 0.0;
  double total = 0.0;

  /// Requirement with the volatility term removed; used to attribute pre-emptions.
  double without_vol() const { return base * (1.0 + time_factor + move_factor); }
};

Requirement maintenance_requirement(const MarginEngine& engine, const MarginInputs& in);

}  // namespace evperp
