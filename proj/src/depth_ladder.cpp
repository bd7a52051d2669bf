#include "evperp/depth_ladder.hpp"

#include <algorithm>
#include <cmath>

#include "evperp/core_types.hpp"

namespace evperp {

namespace {

double price_at(double mid, Direction dir, double offset_bps) {
  return std::clamp(mid + sign(dir) * offset_bps * kBasisPoint, 0.0, 1.0);
}

void record_fill(LadderWalk& w, double quantity, double price) {
  w.filled += quantity;
  w.notional += quantity * price;
  w.impact_cost += quantity * std::abs(price - w.mid);
}

}  // namespace

// Near-mid depth is thin; most resting size sits 200-500 bp out.
DepthLadder::DepthLadder()
    : DepthLadder({0.0, 10.0, 50.0, 200.0, 500.0}, {200.0, 2000.0, 10000.0, 50000.0}, 0.1, 1.7) {}

DepthLadder::DepthLadder(std::vector<double> edges_bps, std::vector<double> quantities,
                         double boundary_band, double boundary_ratio)
    : edges_(std::move(edges_bps)),
      quantities_(std::move(quantities)),
      band_(boundary_band),
      ratio_(boundary_ratio) {
  if (edges_.size() < 2 || quantities_.size() + 1 != edges_.size()) {
    throw Error(ErrorCode::InvalidConfig, "ladder needs n+1 bucket edges for n quantities");
  }
  if (edges_.front() < 0.0) throw Error(ErrorCode::InvalidConfig, "ladder edges must be >= 0");
  for (std::size_t i = 1; i < edges_.size(); ++i) {
    if (!(edges_[i] > edges_[i - 1])) {
      throw Error(ErrorCode::InvalidConfig, "ladder edges must be strictly increasing");
    }
  }
  for (double q : quantities_) {
    if (!(q >= 0.0)) throw Error(ErrorCode::InvalidConfig, "ladder quantities must be >= 0");
  }
  if (!(band_ >= 0.0 && band_ < 0.5)) {
    throw Error(ErrorCode::InvalidConfig, "boundary band must lie in [0, 0.5)");
  }
  if (!(ratio_ > 0.0)) throw Error(ErrorCode::InvalidConfig, "boundary ratio must be > 0");
}

double DepthLadder::multiplier(double mid) const noexcept {
  return (mid < band_ || mid > 1.0 - band_) ? ratio_ : 1.0;
}

double DepthLadder::side_depth(double mid) const noexcept {
  double total = 0.0;
  for (double q : quantities_) total += q;
  return total * multiplier(mid);
}

LadderWalk DepthLadder::walk(double mid, Direction dir, double quantity,
                             std::span<const RestingLiquidity> resting,
                             bool fill_remainder_at_worst) const {
  LadderWalk w;
  w.mid = mid;
  w.end_price = mid;
  w.end_offset_bps = edges_.front();
  if (!(quantity > 0.0)) return w;

  std::vector<RestingLiquidity> queue(resting.begin(), resting.end());
  std::stable_sort(queue.begin(), queue.end(),
                   [](const auto& a, const auto& b) { return a.offset_bps < b.offset_bps; });
  std::size_t next_resting = 0;

  const double m = multiplier(mid);
  double remaining = quantity;
  double cursor = edges_.front();

  const auto drain_resting_at_cursor = [&] {
    while (remaining > 0.0 && next_resting < queue.size() &&
           queue[next_resting].offset_bps <= cursor) {
      auto& r = queue[next_resting];
      const double take = std::min(remaining, r.quantity);
      if (take > 0.0) {
        const double price = price_at(mid, dir, r.offset_bps);
        record_fill(w, take, price);
        w.resting_fills.push_back({r.id, take, price});
        r.quantity -= take;
        remaining -= take;
      }
      if (r.quantity <= 0.0) ++next_resting;
    }
  };

  for (std::size_t i = 0; i + 1 < edges_.size() && remaining > 0.0; ++i) {
    const double hi = edges_[i + 1];
    const double capacity = quantities_[i] * m;
    if (capacity <= 0.0) {
      cursor = hi;
      continue;
    }
    const double density = capacity / (hi - edges_[i]);
    while (cursor < hi && remaining > 0.0) {
      drain_resting_at_cursor();
      if (remaining <= 0.0) break;
      double stop = hi;
      if (next_resting < queue.size()) stop = std::min(stop, queue[next_resting].offset_bps);
      const double take = std::min(remaining, density * (stop - cursor));
      const double end = (take == density * (stop - cursor)) ? stop : cursor + take / density;
      if (take > 0.0) {
        record_fill(w, take, price_at(mid, dir, 0.5 * (cursor + end)));
        remaining -= take;
      }
      cursor = end;
    }
  }
  drain_resting_at_cursor();

  w.end_offset_bps = cursor;
  if (remaining > 0.0) {
    w.exhausted = true;
    if (fill_remainder_at_worst) {
      record_fill(w, remaining, price_at(mid, dir, max_offset_bps()));
      cursor = max_offset_bps();
      w.end_offset_bps = cursor;
    }
  }
  w.end_price = price_at(mid, dir, w.end_offset_bps);
  return w;
}

PushPlan DepthLadder::plan_push(double mid, double target_offset_bps, double cost_budget) const {
  PushPlan plan;
  if (!(target_offset_bps > 0.0) || !(cost_budget > 0.0)) {
    plan.reached_target = !(target_offset_bps > 0.0);
    return plan;
  }
  const double m = multiplier(mid);
  double budget = cost_budget;
  double cursor = edges_.front();
  for (std::size_t i = 0; i + 1 < edges_.size(); ++i) {
    const double lo = std::max(cursor, edges_[i]);
    const double hi = std::min(edges_[i + 1], target_offset_bps);
    const double capacity = quantities_[i] * m;
    if (hi <= lo) break;
    if (capacity <= 0.0) {
      cursor = hi;
      continue;
    }
    const double density = capacity / (edges_[i + 1] - edges_[i]);
    // Impact cost of walking from lo to v: density * bp * (v^2 - lo^2) / 2.
    const double full_cost = density * kBasisPoint * (hi * hi - lo * lo) / 2.0;
    if (full_cost <= budget) {
      plan.quantity += density * (hi - lo);
      plan.impact_cost += full_cost;
      budget -= full_cost;
      cursor = hi;
      continue;
    }
    const double v = std::sqrt(lo * lo + 2.0 * budget / (density * kBasisPoint));
    plan.quantity += density * (v - lo);
    plan.impact_cost += budget;
    plan.offset_bps = v;
    return plan;
  }
  plan.offset_bps = cursor;
  plan.reached_target = cursor >= target_offset_bps;
  plan.exhausted = !plan.reached_target;
  return plan;
}

}  // namespace evperp
