#include "evperp/margin.hpp"

#include <algorithm>

#include "evperp/core_types.hpp"

namespace evperp {

std::string_view to_string(EngineKind kind) {
  return kind == EngineKind::StaticE0 ? "e0" : "e2";
}

void MarginEngine::validate() const {
  if (!(m0 > 0.0 && m0 < 1.0)) throw Error(ErrorCode::InvalidConfig, "m0 must lie in (0, 1)");
  if (!(alpha >= 0.0 && beta >= 0.0 && gamma >= 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "margin coefficients must be >= 0");
  }
  if (!(vol_ref > 0.0)) throw Error(ErrorCode::InvalidConfig, "vol_ref must be > 0");
  if (vol_window < 2) throw Error(ErrorCode::InvalidConfig, "vol_window must be >= 2");
  if (!(ttr_ref > 0.0)) throw Error(ErrorCode::InvalidConfig, "ttr_ref must be > 0");
}

Requirement maintenance_requirement(const MarginEngine& engine, const MarginInputs& in) {
  Requirement r;
  r.base = engine.m0 * in.notional;
  if (engine.kind == EngineKind::DynamicE2) {
    r.vol_factor = engine.alpha * std::max(0.0, in.realized_vol / engine.vol_ref - 1.0);
    r.time_factor = engine.beta * std::max(0.0, 1.0 - in.ticks_to_resolution / engine.ttr_ref);
    r.move_factor = engine.gamma * in.displacement;
  }
  r.total = r.base * (1.0 + r.vol_factor + r.time_factor + r.move_factor);
  return r;
}

}  // namespace evperp
