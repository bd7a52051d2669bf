#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evperp/core_types.hpp"
#include "evperp/depth_ladder.hpp"
#include "evperp/margin.hpp"
#include "evperp/market.hpp"

namespace evperp {

enum class Side { Long, Short };

constexpr double sign(Side s) noexcept { return s == Side::Long ? 1.0 : -1.0; }
std::string_view to_string(Side s);

using AccountId = int;
inline constexpr AccountId kBookAccount = 0;

enum class CloseReason { Open, Liquidation, Halt, Settlement };

std::string_view to_string(CloseReason r);

/// A margined position. Quantity is the notional N in contracts paying the index in USD,
/// so a long's PnL is N * (price - entry) and a loss beyond collateral is bad debt.
struct Position {
  int id = 0;
  AccountId owner = kBookAccount;
  Side side = Side::Long;
  double entry = 0.0;
  double notional = 0.0;
  double collateral = 0.0;
  double leverage = 1.0;
  int opened_tick = 0;

  CloseReason status = CloseReason::Open;
  int closed_tick = -1;
  double close_price = 0.0;
  double gross_pnl = 0.0;  // N * (close - entry), signed by side
  double paid_pnl = 0.0;   // gross floored at -collateral
  double bad_debt = 0.0;
  double pool_covered = 0.0;
  double uncovered = 0.0;

  double requirement = 0.0;
  int requirement_increases = 0;
  bool preempted = false;

  bool open() const noexcept { return status == CloseReason::Open; }
  double signed_quantity() const noexcept { return sign(side) * notional; }
  double unrealized(double mark) const noexcept { return signed_quantity() * (mark - entry); }
  double equity(double mark) const noexcept { return collateral + unrealized(mark); }
};

/// Fully funded cash + inventory account (the book, flow traders, attack legs).
struct Account {
  std::string name;
  int agent = -1;
  double cash = 0.0;
  double inventory = 0.0;

  double value(double mark) const noexcept { return cash + inventory * mark; }
};

enum class EventKind {
  Open,
  Trade,
  Liquidation,
  BadDebt,
  Halt,
  HaltClose,
  Settlement,
  SpoofPlace,
  SpoofFill,
  SpoofWithdraw,
  IndexShift,
};

std::string_view to_string(EventKind k);

struct Event {
  int tick = 0;
  double index = 0.0;
  EventKind kind = EventKind::Trade;
  int position_id = -1;
  double amount = 0.0;
};

struct MarketOrder {
  AccountId account = kBookAccount;
  double quantity = 0.0;  // signed; positive buys
};

struct Fill {
  double quantity = 0.0;  // signed executed quantity
  double average_price = 0.0;
  double impact_cost = 0.0;
  double index_before = 0.0;
  double index_after = 0.0;
  bool exhausted = false;
};

struct PushResult {
  Fill fill;
  double achieved_move = 0.0;
  bool reached_target = false;
  bool exhausted = false;
};

struct RestingOrder {
  int id = 0;
  AccountId owner = kBookAccount;
  Direction order_side = Direction::Buy;  // Buy = resting bid, hit by incoming sells
  double offset_bps = 0.0;
  double placed = 0.0;
  double remaining = 0.0;
  bool active = true;
};

struct PoolConfig {
  double fraction = 0.1;  // of aggregate open notional once tick 0 closes
  std::optional<double> initial;
};

struct VenueConfig {
  MarketSpec spec;
  MarginEngine engine;
  DepthLadder ladder;
  PoolConfig pool;
  double impact_decay = 0.5;  // fraction of order-driven displacement kept per tick
  bool record_events = true;

  void validate() const;
};

struct VenueState {
  int tick = 0;
  double index = 0.5;
  double displacement = 0.0;
  bool in_tick = false;
  bool halted = false;
  bool settled = false;
  std::optional<double> halt_price;

  std::vector<Account> accounts;
  std::vector<Position> positions;
  std::vector<RestingOrder> resting;

  double insurance_pool = 0.0;
  double pool_initial = 0.0;
  bool pool_funded = false;
  double bad_debt_total = 0.0;
  double uncovered_bad_debt = 0.0;

  std::deque<double> returns;
  std::vector<double> observed;  // index as observed at the close of each tick, then the outcome
  std::vector<Event> events;

  int liquidations = 0;
  int liquidations_final_window = 0;
  int preempted = 0;
  int halt_closes = 0;
  double forced_close_volume = 0.0;

  double realized_vol() const;
};

// Single binary event-linked perpetual. One tick is begin_tick(), any number of trading
// actions, then end_tick(); step() bundles the three for plain order lists. Trading actions
// are rejected once the venue has halted.
class Venue {
public:
  Venue(VenueConfig config, IndexPath path);

  const VenueConfig& config() const noexcept { return config_; }
  const IndexPath& path() const noexcept { return path_; }
  const VenueState& state() const noexcept { return state_; }

  AccountId add_account(std::string name, int agent = -1);

  void begin_tick();
  void end_tick();
  void step(std::span<const MarketOrder> orders);

  /// Marks every open position to the outcome at tau and flattens all accounts.
  void settle();

  /// Opens a margined position crossed with the book at the current index (no impact).
  int open_position(AccountId owner, Side side, Leverage leverage, Money collateral);

  Fill execute_market_order(AccountId account, double quantity);

  /// Marketable orders toward `target_move` (signed, index units) until the move is reached
  /// or `budget` of impact cost is spent. If the ladder runs out first the partial fill
  /// stays applied and `exhausted` is set.
  PushResult push(AccountId account, double target_move, double budget);

  /// Block-trades the account's inventory to the book at the current index.
  void close_inventory_at_index(AccountId account);

  int place_resting(AccountId owner, Direction order_side, double offset_bps, double quantity);
  double withdraw_resting(int id);

  /// Quote reaction by other participants; moves the index without a trade.
  void shift_index(double delta);

  /// Routes up to `capacity` of forced-close quantity to `account` instead of the book.
  void route_forced_flow(AccountId account, double capacity);
  void clear_forced_flow();
  double forced_flow_remaining() const noexcept { return route_capacity_; }

  Requirement requirement_for(const Position& pos) const;

  double ledger_residual() const;
  double agent_pnl(int agent) const;
  double account_pnl(AccountId account) const;
  double positions_pnl(AccountId owner) const;

  bool trading_open() const noexcept { return state_.in_tick && !state_.halted; }

private:
  void require_trading(std::string_view what) const;
  void log(EventKind kind, int position_id, double amount);
  void halt();
  void fund_pool();
  void close_position(Position& pos, double price, CloseReason reason);
  void flatten_accounts(double price);
  void liquidate(Position& pos, const Requirement& req);
  void apply_trade(AccountId taker, Direction dir, const LadderWalk& walk,
                   std::span<const RestingLiquidity> resting);

  VenueConfig config_;
  IndexPath path_;
  VenueState state_;
  std::optional<AccountId> route_account_;
  double route_capacity_ = 0.0;
};

}  // namespace evperp
