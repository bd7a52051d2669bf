#include "evperp/venue.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace evperp {

std::string_view to_string(Side s) { return s == Side::Long ? "long" : "short"; }

std::string_view to_string(CloseReason r) {
  switch (r) {
    case CloseReason::Open: return "open";
    case CloseReason::Liquidation: return "liquidation";
    case CloseReason::Halt: return "halt";
    case CloseReason::Settlement: return "settlement";
  }
  return "open";
}

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::Open: return "open";
    case EventKind::Trade: return "trade";
    case EventKind::Liquidation: return "liquidation";
    case EventKind::BadDebt: return "bad_debt";
    case EventKind::Halt: return "halt";
    case EventKind::HaltClose: return "halt_close";
    case EventKind::Settlement: return "settlement";
    case EventKind::SpoofPlace: return "spoof_place";
    case EventKind::SpoofFill: return "spoof_fill";
    case EventKind::SpoofWithdraw: return "spoof_withdraw";
    case EventKind::IndexShift: return "index_shift";
  }
  return "trade";
}

void VenueConfig::validate() const {
  spec.validate();
  engine.validate();
  if (!(pool.fraction >= 0.0)) throw Error(ErrorCode::InvalidConfig, "pool fraction must be >= 0");
  if (pool.initial && !(*pool.initial >= 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "initial pool must be >= 0");
  }
  if (!(impact_decay >= 0.0 && impact_decay <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "impact_decay must lie in [0, 1]");
  }
}

double VenueState::realized_vol() const {
  if (returns.size() < 2) return 0.0;
  const double n = static_cast<double>(returns.size());
  const double mean = std::accumulate(returns.begin(), returns.end(), 0.0) / n;
  double ss = 0.0;
  for (double r : returns) ss += (r - mean) * (r - mean);
  return std::sqrt(ss / (n - 1.0));
}

Venue::Venue(VenueConfig config, IndexPath path) : config_(std::move(config)), path_(std::move(path)) {
  config_.validate();
  if (path_.tau() != config_.spec.tau) {
    throw Error(ErrorCode::InvalidConfig, "index path length does not match tau");
  }
  state_.index = path_.at(0);
  state_.accounts.push_back(Account{"book", -1});
}

AccountId Venue::add_account(std::string name, int agent) {
  state_.accounts.push_back(Account{std::move(name), agent});
  return static_cast<AccountId>(state_.accounts.size() - 1);
}

void Venue::log(EventKind kind, int position_id, double amount) {
  if (!config_.record_events) return;
  state_.events.push_back(Event{state_.tick, state_.index, kind, position_id, amount});
}

void Venue::require_trading(std::string_view what) const {
  if (state_.settled) throw Error(ErrorCode::SettledVenue, std::string(what));
  if (state_.halted) throw Error(ErrorCode::VenueHalted, std::string(what));
  if (!state_.in_tick) throw Error(ErrorCode::InvalidConfig, std::string(what) + " outside a tick");
}

void Venue::begin_tick() {
  if (state_.settled) throw Error(ErrorCode::SettledVenue, "cannot step a settled venue");
  if (state_.tick >= config_.spec.tau) {
    throw Error(ErrorCode::SettledVenue, "venue is at resolution; settle it instead");
  }
  if (state_.in_tick) throw Error(ErrorCode::InvalidConfig, "begin_tick called twice");
  state_.in_tick = true;
  state_.index = std::clamp(path_.at(state_.tick) + state_.displacement, 0.0, 1.0);
  if (config_.spec.has_halt() && state_.tick == config_.spec.halt_tick()) halt();
}

void Venue::halt() {
  state_.halted = true;
  state_.halt_price = state_.index;
  log(EventKind::Halt, -1, state_.index);
  for (auto& r : state_.resting) {
    if (r.active) {
      r.active = false;
      log(EventKind::SpoofWithdraw, r.id, r.remaining);
    }
  }
  if (config_.spec.halt_settlement != HaltSettlement::HaltPrice) return;
  for (auto& pos : state_.positions) {
    if (pos.open()) close_position(pos, state_.index, CloseReason::Halt);
  }
  flatten_accounts(state_.index);
}

void Venue::fund_pool() {
  if (state_.pool_funded) return;
  double open_notional = 0.0;
  for (const auto& p : state_.positions) {
    if (p.open()) open_notional += p.notional;
  }
  state_.pool_initial = config_.pool.initial ? *config_.pool.initial
                                             : config_.pool.fraction * open_notional;
  state_.insurance_pool = state_.pool_initial;
  state_.pool_funded = true;
}

void Venue::end_tick() {
  if (!state_.in_tick) throw Error(ErrorCode::InvalidConfig, "end_tick without begin_tick");

  if (!state_.observed.empty()) {
    state_.returns.push_back(state_.index - state_.observed.back());
    while (static_cast<int>(state_.returns.size()) > config_.engine.vol_window) {
      state_.returns.pop_front();
    }
  }
  state_.observed.push_back(state_.index);
  fund_pool();

  if (!state_.halted) {
    for (auto& pos : state_.positions) {
      if (!pos.open()) continue;
      const Requirement req = requirement_for(pos);
      if (pos.requirement > 0.0 && req.total > pos.requirement * (1.0 + 1e-12)) {
        ++pos.requirement_increases;
      }
      pos.requirement = req.total;
      if (pos.equity(state_.index) < req.total) liquidate(pos, req);
    }
  }

  state_.displacement *= config_.impact_decay;
  state_.in_tick = false;
  ++state_.tick;
}

void Venue::step(std::span<const MarketOrder> orders) {
  begin_tick();
  if (!state_.halted) {
    for (const auto& o : orders) execute_market_order(o.account, o.quantity);
  }
  end_tick();
}

Requirement Venue::requirement_for(const Position& pos) const {
  MarginInputs in;
  in.notional = pos.notional;
  in.realized_vol = state_.realized_vol();
  in.ticks_to_resolution = static_cast<double>(config_.spec.tau - state_.tick);
  in.displacement = std::abs(state_.index - pos.entry);
  return maintenance_requirement(config_.engine, in);
}

int Venue::open_position(AccountId owner, Side side, Leverage leverage, Money collateral) {
  require_trading("open_position");
  Position pos;
  pos.id = static_cast<int>(state_.positions.size());
  pos.owner = owner;
  pos.side = side;
  pos.entry = state_.index;
  pos.collateral = collateral.amount();
  pos.leverage = leverage.value();
  pos.notional = leverage.notional(collateral);
  pos.opened_tick = state_.tick;

  auto& book = state_.accounts[kBookAccount];
  book.inventory -= pos.signed_quantity();
  book.cash += pos.signed_quantity() * pos.entry;

  state_.positions.push_back(pos);
  log(EventKind::Open, pos.id, pos.signed_quantity());
  return pos.id;
}

void Venue::apply_trade(AccountId taker, Direction dir, const LadderWalk& walk,
                        std::span<const RestingLiquidity> resting) {
  const double s = sign(dir);
  auto& t = state_.accounts.at(static_cast<std::size_t>(taker));
  t.inventory += s * walk.filled;
  t.cash -= s * walk.notional;

  double book_qty = walk.filled;
  double book_notional = walk.notional;
  for (const auto& f : walk.resting_fills) {
    auto it = std::find_if(state_.resting.begin(), state_.resting.end(),
                           [&](const RestingOrder& r) { return r.id == f.id; });
    auto& maker = state_.accounts.at(static_cast<std::size_t>(it->owner));
    maker.inventory -= s * f.quantity;
    maker.cash += s * f.quantity * f.price;
    it->remaining -= f.quantity;
    book_qty -= f.quantity;
    book_notional -= f.quantity * f.price;
    log(EventKind::SpoofFill, it->id, f.quantity);
  }
  (void)resting;
  auto& book = state_.accounts[kBookAccount];
  book.inventory -= s * book_qty;
  book.cash += s * book_notional;
}

Fill Venue::execute_market_order(AccountId account, double quantity) {
  require_trading("market order");
  Fill fill;
  fill.index_before = state_.index;
  fill.index_after = state_.index;
  if (quantity == 0.0) return fill;

  const Direction dir = quantity > 0.0 ? Direction::Buy : Direction::Sell;
  // Incoming sells hit resting bids and vice versa.
  std::vector<RestingLiquidity> resting;
  for (const auto& r : state_.resting) {
    if (r.active && r.remaining > 0.0 && r.order_side == opposite(dir)) {
      resting.push_back({r.id, r.offset_bps, r.remaining});
    }
  }
  const LadderWalk walk = config_.ladder.walk(state_.index, dir, std::abs(quantity), resting);
  apply_trade(account, dir, walk, resting);

  state_.displacement += walk.end_price - state_.index;
  state_.index = walk.end_price;

  fill.quantity = sign(dir) * walk.filled;
  fill.average_price = walk.average_price();
  fill.impact_cost = walk.impact_cost;
  fill.index_after = state_.index;
  fill.exhausted = walk.exhausted;
  log(EventKind::Trade, -1, fill.quantity);
  return fill;
}

PushResult Venue::push(AccountId account, double target_move, double budget) {
  require_trading("push");
  PushResult out;
  out.fill.index_before = state_.index;
  out.fill.index_after = state_.index;
  if (target_move == 0.0 || !(budget > 0.0)) {
    out.reached_target = target_move == 0.0;
    return out;
  }
  const Direction dir = target_move > 0.0 ? Direction::Buy : Direction::Sell;
  const PushPlan plan =
      config_.ladder.plan_push(state_.index, std::abs(target_move) / kBasisPoint, budget);
  if (plan.quantity > 0.0) out.fill = execute_market_order(account, sign(dir) * plan.quantity);
  out.achieved_move = out.fill.index_after - out.fill.index_before;
  out.reached_target = plan.reached_target;
  out.exhausted = plan.exhausted;
  return out;
}

void Venue::close_inventory_at_index(AccountId account) {
  require_trading("close_inventory_at_index");
  auto& a = state_.accounts.at(static_cast<std::size_t>(account));
  auto& book = state_.accounts[kBookAccount];
  book.inventory += a.inventory;
  book.cash -= a.inventory * state_.index;
  a.cash += a.inventory * state_.index;
  a.inventory = 0.0;
}

int Venue::place_resting(AccountId owner, Direction order_side, double offset_bps, double quantity) {
  require_trading("place_resting");
  if (!(offset_bps >= 0.0 && offset_bps <= config_.ladder.max_offset_bps())) {
    throw Error(ErrorCode::OutOfRange, "resting offset outside the ladder range");
  }
  if (!(quantity >= 0.0)) throw Error(ErrorCode::NegativeValue, "resting quantity");
  RestingOrder r;
  r.id = static_cast<int>(state_.resting.size());
  r.owner = owner;
  r.order_side = order_side;
  r.offset_bps = offset_bps;
  r.placed = quantity;
  r.remaining = quantity;
  state_.resting.push_back(r);
  log(EventKind::SpoofPlace, r.id, quantity);
  return r.id;
}

double Venue::withdraw_resting(int id) {
  auto& r = state_.resting.at(static_cast<std::size_t>(id));
  if (!r.active) return 0.0;
  r.active = false;
  log(EventKind::SpoofWithdraw, r.id, r.remaining);
  return r.remaining;
}

void Venue::shift_index(double delta) {
  require_trading("shift_index");
  const double before = state_.index;
  state_.index = std::clamp(before + delta, 0.0, 1.0);
  state_.displacement += state_.index - before;
  log(EventKind::IndexShift, -1, state_.index - before);
}

void Venue::route_forced_flow(AccountId account, double capacity) {
  route_account_ = account;
  route_capacity_ = std::max(0.0, capacity);
}

void Venue::clear_forced_flow() {
  route_account_.reset();
  route_capacity_ = 0.0;
}

void Venue::close_position(Position& pos, double price, CloseReason reason) {
  pos.status = reason;
  pos.closed_tick = state_.tick;
  pos.close_price = price;
  pos.gross_pnl = pos.signed_quantity() * (price - pos.entry);
  pos.paid_pnl = std::max(pos.gross_pnl, -pos.collateral);
  const double shortfall = pos.paid_pnl - pos.gross_pnl;
  if (shortfall > 0.0) {
    pos.bad_debt = shortfall;
    pos.pool_covered = std::min(shortfall, state_.insurance_pool);
    pos.uncovered = shortfall - pos.pool_covered;
    state_.insurance_pool -= pos.pool_covered;
    state_.bad_debt_total += shortfall;
    state_.uncovered_bad_debt += pos.uncovered;
    log(EventKind::BadDebt, pos.id, shortfall);
  }
  if (reason == CloseReason::Halt) {
    ++state_.halt_closes;
    log(EventKind::HaltClose, pos.id, pos.paid_pnl);
  } else if (reason == CloseReason::Settlement) {
    log(EventKind::Settlement, pos.id, pos.paid_pnl);
  }
}

void Venue::flatten_accounts(double price) {
  for (auto& a : state_.accounts) {
    a.cash += a.inventory * price;
    a.inventory = 0.0;
  }
}

void Venue::liquidate(Position& pos, const Requirement& req) {
  const double equity = pos.equity(state_.index);
  // Forced closes pay their own impact but leave the index where it is.
  const Direction dir = pos.side == Side::Long ? Direction::Sell : Direction::Buy;
  const LadderWalk walk = config_.ladder.walk(state_.index, dir, pos.notional, {}, true);
  const double price = walk.average_price();

  // The counterparty of the forced close receives the position's quantity.
  const double cp_qty = pos.signed_quantity();
  double routed = 0.0;
  if (route_account_ && route_capacity_ > 0.0) {
    routed = std::min(route_capacity_, pos.notional);
    route_capacity_ -= routed;
    auto& cross = state_.accounts.at(static_cast<std::size_t>(*route_account_));
    cross.inventory += sign(pos.side) * routed;
    cross.cash -= sign(pos.side) * routed * price;
  }
  auto& book = state_.accounts[kBookAccount];
  const double book_qty = cp_qty - sign(pos.side) * routed;
  book.inventory += book_qty;
  book.cash -= book_qty * price;

  close_position(pos, price, CloseReason::Liquidation);
  ++state_.liquidations;
  state_.forced_close_volume += pos.notional;
  if (state_.tick >= config_.spec.tau - config_.spec.final_window_width()) {
    ++state_.liquidations_final_window;
  }
  if (config_.engine.kind == EngineKind::DynamicE2 && equity >= req.without_vol()) {
    pos.preempted = true;
    ++state_.preempted;
  }
  log(EventKind::Liquidation, pos.id, pos.notional);
}

void Venue::settle() {
  if (state_.settled) throw Error(ErrorCode::DoubleSettlement, "venue already settled");
  if (state_.tick != config_.spec.tau) {
    throw Error(ErrorCode::NotAtResolution, "settle() before the resolution tick");
  }
  const double outcome = static_cast<double>(path_.outcome);
  state_.index = outcome;
  state_.observed.push_back(outcome);
  for (auto& pos : state_.positions) {
    if (pos.open()) close_position(pos, outcome, CloseReason::Settlement);
  }
  flatten_accounts(outcome);
  state_.settled = true;
}

double Venue::positions_pnl(AccountId owner) const {
  double total = 0.0;
  for (const auto& p : state_.positions) {
    if (p.owner != owner) continue;
    total += p.open() ? p.unrealized(state_.index) : p.paid_pnl;
  }
  return total;
}

double Venue::account_pnl(AccountId account) const {
  return state_.accounts.at(static_cast<std::size_t>(account)).value(state_.index) +
         positions_pnl(account);
}

double Venue::agent_pnl(int agent) const {
  double total = 0.0;
  for (std::size_t i = 0; i < state_.accounts.size(); ++i) {
    if (state_.accounts[i].agent == agent) total += account_pnl(static_cast<AccountId>(i));
  }
  return total;
}

double Venue::ledger_residual() const {
  double agents = 0.0;
  for (std::size_t i = 0; i < state_.accounts.size(); ++i) {
    agents += account_pnl(static_cast<AccountId>(i));
  }
  const double pool_delta = state_.insurance_pool - state_.pool_initial;
  return agents + pool_delta - state_.uncovered_bad_debt;
}

}  // namespace evperp
