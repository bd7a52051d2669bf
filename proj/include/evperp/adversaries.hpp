#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>

#include "evperp/core_types.hpp"
#include "evperp/run.hpp"
#include "evperp/venue.hpp"

namespace evperp {

/// Split of a winning manipulator's gross payout by who funded it.
struct PayoutSplit {
  double gross_payout = 0.0;
  double counterparty_funded = 0.0;
  double pool_funded = 0.0;
  double uncovered = 0.0;
  double other_funded = 0.0;  // book or liquidity providers, when counterparties closed early

  double pool_share() const { return gross_payout > 0.0 ? pool_funded / gross_payout : 0.0; }
};

struct AttackReport {
  ManipulationChannel channel = ManipulationChannel::TradeBased;
  bool channel_absent = false;
  double manipulator_pnl = 0.0;    // gross of manipulation cost
  double manipulation_cost = 0.0;  // impact paid plus spoof carry
  double counterparty_losses = 0.0;
  double pool_drawdown = 0.0;
  int preempted = 0;
  int preempted_attributable = 0;  // attack run minus counterfactual
  int liquidations = 0;
  int spoof_placements = 0;
  int spoof_withdrawals = 0;
  double spoof_filled = 0.0;
  double forced_close_volume = 0.0;
  double achieved_move = 0.0;
  double differential_pnl = 0.0;  // against the same-seed counterfactual
  std::optional<double> manipulated_close;
  std::optional<double> counterfactual_close;
  std::optional<PayoutSplit> payout;
  bool profitable = false;

  double net_pnl() const { return manipulator_pnl - manipulation_cost; }
  void finalize() { profitable = net_pnl() > 0.0; }
};

/// Thrown by trade_based_push when the ladder runs out; the partial push stays applied.
class InsufficientDepthError : public Error {
public:
  InsufficientDepthError(const std::string& what, AttackReport partial)
      : Error(ErrorCode::InsufficientDepth, what), partial_(std::move(partial)) {}
  const AttackReport& partial() const noexcept { return partial_; }

private:
  AttackReport partial_;
};

/// Marketable orders toward `target_index_move` until reached or `budget` of impact is spent.
AttackReport trade_based_push(Venue& venue, AccountId account, double target_index_move,
                              double budget);

/// Rests `quantity` at `offset_bps` on `side`, applies the quote reaction, keeps the order for
/// `dwell_ticks` tick boundaries and withdraws what is left. The venue must be inside a tick;
/// `between` runs in every intermediate tick.
AttackReport spoof_and_withdraw(Venue& venue, AccountId account, Direction side, double offset_bps,
                                double quantity, int dwell_ticks, double reaction,
                                const std::function<void(Venue&)>& between = {});

struct PreemptionParams {
  std::string name = "attacker";
  double injection_size = 4000.0;
  int start = 60;
  int duration = 8;
  int hold = 6;
  double cross_capacity = 1e9;
};

struct HaltArbParams {
  std::string name = "attacker";
  Side side = Side::Long;
  double leverage = 5.0;
  double collateral = 1000.0;
  double direction = 1.0;
  double target_move = 0.05;
  double budget = 0.0;
  int window = 3;
};

struct BadDebtParams {
  std::string name = "attacker";
  double leverage = 5.0;
  double size_multiple = 5.0;
  double believed_yes = 0.9;
  int open_tick = 1;
};

using AttackSpec = std::variant<PreemptionParams, HaltArbParams, BadDebtParams>;

struct AttackRun {
  AttackReport report;
  RunReport attack_run;
  RunReport counterfactual;
};

/// Adds a volatility injector to `base` and compares with a same-seed replay where the
/// injector stays idle. Under a static engine the report is flagged ChannelAbsent.
AttackRun run_preemption_attack(const RunConfig& base, const PreemptionParams& params);

/// Adds a position holder that pushes the index before the halt; the counterfactual replays
/// the same seed with a zero push budget. Without a halt the report is flagged ChannelAbsent.
AttackRun run_halt_arbitrage(const RunConfig& base, const HaltArbParams& params);

/// Adds a directional position sized against opposite-side collateral; the counterfactual
/// replays the same seed with size 0.
AttackRun run_bad_debt_shift(const RunConfig& base, const BadDebtParams& params);

AttackRun run_attack(const RunConfig& base, const AttackSpec& attack);

/// Payout attribution for the agent at `agent_index` in a finished run.
PayoutSplit attribute_payout(const RunReport& run, int agent_index);

}  // namespace evperp
