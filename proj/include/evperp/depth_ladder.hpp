#pragma once

#include <span>
#include <vector>

namespace evperp {

inline constexpr double kBasisPoint = 1e-4;  // one bp of index (probability) units

/// Buy walks the ask side upward, Sell walks the bid side downward.
enum class Direction : int { Buy = 1, Sell = -1 };

constexpr double sign(Direction d) noexcept { return static_cast<double>(static_cast<int>(d)); }
constexpr Direction opposite(Direction d) noexcept {
  return d == Direction::Buy ? Direction::Sell : Direction::Buy;
}

/// Extra resting quantity sitting at a fixed offset on the side being walked.
struct RestingLiquidity {
  int id = 0;
  double offset_bps = 0.0;
  double quantity = 0.0;
};

struct RestingFill {
  int id = 0;
  double quantity = 0.0;
  double price = 0.0;
};

struct LadderWalk {
  double mid = 0.0;
  double filled = 0.0;
  double notional = 0.0;     // sum of quantity * price
  double impact_cost = 0.0;  // sum of quantity * |price - mid|
  double end_offset_bps = 0.0;
  double end_price = 0.0;
  bool exhausted = false;
  std::vector<RestingFill> resting_fills;

  double average_price() const { return filled > 0.0 ? notional / filled : mid; }
};

struct PushPlan {
  double quantity = 0.0;
  double offset_bps = 0.0;
  double impact_cost = 0.0;
  bool reached_target = false;
  bool exhausted = false;
};

// Resting depth per side as contiguous offset buckets [edge_i, edge_{i+1}) bps from mid.
// Within a bucket quantity is spread uniformly over the offsets, so the marginal
// price moves linearly in executed quantity. Depth is multiplied by the boundary ratio
// while the mid sits within `boundary_band` of 0 or 1.
class DepthLadder {
public:
  DepthLadder();
  DepthLadder(std::vector<double> edges_bps, std::vector<double> quantities,
              double boundary_band, double boundary_ratio);

  const std::vector<double>& edges_bps() const noexcept { return edges_; }
  const std::vector<double>& quantities() const noexcept { return quantities_; }
  double boundary_band() const noexcept { return band_; }
  double boundary_ratio() const noexcept { return ratio_; }

  double multiplier(double mid) const noexcept;
  double side_depth(double mid) const noexcept;
  double max_offset_bps() const noexcept { return edges_.back(); }

  /// Executes `quantity` against the ladder from `mid`. Resting liquidity is consumed when
  /// the marginal offset reaches it. If the ladder runs out, `exhausted` is set and the
  /// remainder is either dropped or, with `fill_remainder_at_worst`, filled at the last offset.
  LadderWalk walk(double mid, Direction dir, double quantity,
                  std::span<const RestingLiquidity> resting = {},
                  bool fill_remainder_at_worst = false) const;

  /// Quantity that moves the marginal price to `target_offset_bps` or spends `cost_budget`
  /// of impact cost, whichever comes first.
  PushPlan plan_push(double mid, double target_offset_bps, double cost_budget) const;

private:
  std::vector<double> edges_;
  std::vector<double> quantities_;
  double band_ = 0.1;
  double ratio_ = 1.7;
};

}  // namespace evperp
