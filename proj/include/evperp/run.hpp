#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "evperp/venue.hpp"

namespace evperp {

/// Margined directional trader; opens `count` positions `open_spacing` ticks apart.
struct TraderSpec {
  std::string name;
  Side side = Side::Long;
  double leverage = 5.0;
  double collateral = 1000.0;
  int open_tick = 0;
  int count = 1;
  int open_spacing = 1;
};

/// Random market orders of size in [0.5, 1.5) x `size` with probability `probability` per tick.
struct NoiseSpec {
  std::string name;
  double size = 100.0;
  double probability = 0.5;
};

/// Alternating buy/sell orders over [start, start + duration) to lift realized volatility,
/// then takes up to `cross_capacity` of forced-close flow. Both legs exit at
/// start + duration + hold.
struct VolInjectorSpec {
  std::string name;
  double size = 1000.0;
  int start = 50;
  int duration = 10;
  int hold = 5;
  double cross_capacity = 0.0;
};

/// Holds a margined position from tick 0 and pushes the index during the last `window`
/// ticks before the halt, spending at most `budget` of impact cost per tick.
struct HaltPusherSpec {
  std::string name;
  Side side = Side::Long;
  double leverage = 5.0;
  double collateral = 1000.0;
  double direction = 1.0;
  double target_move = 0.05;
  double budget = 0.0;
  int window = 5;
};

/// Opens toward the believed outcome with notional = size_multiple x the collateral
/// posted by opposite-side positions.
struct BadDebtShifterSpec {
  std::string name;
  double leverage = 5.0;
  double size_multiple = 1.0;
  double believed_yes = 0.9;
  int open_tick = 1;
};

/// Rests `quantity` at `offset_bps` for `dwell` ticks, then withdraws the remainder.
struct SpoofSpec {
  std::string name;
  Direction order_side = Direction::Buy;
  double offset_bps = 300.0;
  double quantity = 10000.0;
  int place_tick = 10;
  int dwell = 3;
  double reaction = 0.1;
};

using AgentSpec =
    std::variant<TraderSpec, NoiseSpec, VolInjectorSpec, HaltPusherSpec, BadDebtShifterSpec, SpoofSpec>;

std::string_view agent_kind(const AgentSpec& spec);
const std::string& agent_name(const AgentSpec& spec);

/// Spoof reaction of other participants, in index units toward the spoofed side.
double spoof_reaction_shift(double reaction, double quantity, double side_depth);

struct RunConfig {
  VenueConfig venue;
  double path_volatility = kDefaultPathVolatility;
  std::uint64_t seed = 1;
  std::vector<AgentSpec> agents;

  void validate() const;
};

struct AgentResult {
  std::string name;
  std::string kind;
  double pnl = 0.0;
  double position_pnl = 0.0;  // margined positions only
  double flow_pnl = 0.0;      // unmargined accounts
  double cross_pnl = 0.0;     // forced-flow account, when the agent has one
  double impact_cost = 0.0;
  int positions_opened = 0;
  int liquidations = 0;
  int preempted = 0;
  int requirement_increases = 0;
  int spoof_placements = 0;
  int spoof_withdrawals = 0;
  double spoof_filled = 0.0;
  double index_shift = 0.0;
  bool ladder_exhausted = false;
};

struct PositionRecord {
  int id = 0;
  int agent = -1;
  Side side = Side::Long;
  int opened_tick = 0;
  double entry = 0.0;
  double notional = 0.0;
  double collateral = 0.0;
  double leverage = 1.0;
  CloseReason reason = CloseReason::Open;
  int closed_tick = -1;
  double close_price = 0.0;
  double gross_pnl = 0.0;
  double paid_pnl = 0.0;
  double bad_debt = 0.0;
  double pool_covered = 0.0;
  double uncovered = 0.0;
  int requirement_increases = 0;
  bool preempted = false;
};

struct RunReport {
  std::uint64_t seed = 0;
  std::uint64_t path_hash = 0;
  std::string engine;
  int tau = 0;
  int halt_offset = 0;
  std::string halt_settlement;
  int outcome = 0;
  double terminal_jump = 0.0;
  std::optional<double> halt_price;

  int liquidations = 0;
  int liquidations_final_window = 0;
  int final_window_start = 0;
  int preempted = 0;
  int halt_closes = 0;
  double forced_close_volume = 0.0;

  double bad_debt_total = 0.0;
  double uncovered_bad_debt = 0.0;
  double pool_initial = 0.0;
  double pool_final = 0.0;
  double pool_drawdown = 0.0;
  double ledger_residual = 0.0;

  std::vector<AgentResult> agents;
  std::vector<PositionRecord> positions;
  std::vector<double> index;  // observed per tick, then the outcome
  std::vector<Event> events;

  const AgentResult* agent(std::string_view name) const;
  int agent_index(std::string_view name) const;
};

/// Runs one full episode: ticks 0..tau-1, agents acting in roster order each tick, then
/// settlement. Throws InvariantViolation if the ledger does not close.
RunReport run_market(const RunConfig& config);

/// Runs `config` once per seed; results are in seed order whatever `jobs` is.
std::vector<RunReport> run_seeds(const RunConfig& config, std::span<const std::uint64_t> seeds,
                                 int jobs = 1);

}  // namespace evperp
