#include "evperp/run.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <memory>
#include <set>
#include <thread>

#include "evperp/rng.hpp"

namespace evperp {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

class Agent {
public:
  virtual ~Agent() = default;
  virtual void setup(Venue& venue, int index) = 0;
  virtual void act(Venue& venue, int tick) = 0;
  virtual void finish(const Venue&, AgentResult&) const {}

  double impact_cost = 0.0;
  bool exhausted = false;
  std::optional<AccountId> cross;
};

class Trader final : public Agent {
public:
  explicit Trader(TraderSpec s) : spec_(std::move(s)) {}
  void setup(Venue& venue, int index) override { account_ = venue.add_account(spec_.name, index); }
  void act(Venue& venue, int tick) override {
    if (!venue.trading_open() || opened_ >= spec_.count || tick < spec_.open_tick) return;
    if ((tick - spec_.open_tick) % spec_.open_spacing != 0) return;
    venue.open_position(account_, spec_.side, Leverage(spec_.leverage), Money(spec_.collateral));
    ++opened_;
  }

private:
  TraderSpec spec_;
  AccountId account_ = kBookAccount;
  int opened_ = 0;
};

class Noise final : public Agent {
public:
  Noise(NoiseSpec s, std::uint64_t seed) : spec_(std::move(s)), rng_(seed, fnv1a64(spec_.name)) {}
  void setup(Venue& venue, int index) override { account_ = venue.add_account(spec_.name, index); }
  void act(Venue& venue, int) override {
    const double trade = rng_.uniform();
    const double side = rng_.uniform();
    const double scale = rng_.uniform();
    if (!venue.trading_open() || trade >= spec_.probability) return;
    const double qty = spec_.size * (0.5 + scale) * (side < 0.5 ? 1.0 : -1.0);
    impact_cost += venue.execute_market_order(account_, qty).impact_cost;
  }

private:
  NoiseSpec spec_;
  Rng rng_;
  AccountId account_ = kBookAccount;
};

class VolInjector final : public Agent {
public:
  explicit VolInjector(VolInjectorSpec s) : spec_(std::move(s)) {}
  void setup(Venue& venue, int index) override {
    inject_ = venue.add_account(spec_.name, index);
    cross = venue.add_account(spec_.name + ".cross", index);
  }
  void act(Venue& venue, int tick) override {
    if (!venue.trading_open()) return;
    if (tick == spec_.start && spec_.cross_capacity > 0.0) {
      venue.route_forced_flow(*cross, spec_.cross_capacity);
    }
    if (tick >= spec_.start && tick < spec_.start + spec_.duration && spec_.size > 0.0) {
      const double qty = (tick - spec_.start) % 2 == 0 ? spec_.size : -spec_.size;
      const Fill f = venue.execute_market_order(inject_, qty);
      impact_cost += f.impact_cost;
      exhausted = exhausted || f.exhausted;
    }
    if (tick == spec_.start + spec_.duration + spec_.hold) {
      venue.clear_forced_flow();
      venue.close_inventory_at_index(*cross);
      const double inv = venue.state().accounts[static_cast<std::size_t>(inject_)].inventory;
      if (inv != 0.0) impact_cost += venue.execute_market_order(inject_, -inv).impact_cost;
    }
  }

private:
  VolInjectorSpec spec_;
  AccountId inject_ = kBookAccount;
};

class HaltPusher final : public Agent {
public:
  explicit HaltPusher(HaltPusherSpec s) : spec_(std::move(s)) {}
  void setup(Venue& venue, int index) override {
    position_ = venue.add_account(spec_.name, index);
    pusher_ = venue.add_account(spec_.name + ".push", index);
  }
  void act(Venue& venue, int tick) override {
    if (!venue.trading_open()) return;
    if (tick == 0) {
      venue.open_position(position_, spec_.side, Leverage(spec_.leverage), Money(spec_.collateral));
    }
    const MarketSpec& m = venue.config().spec;
    if (!m.has_halt() || !(spec_.budget > 0.0)) return;
    if (tick >= m.halt_tick() - spec_.window && tick < m.halt_tick()) {
      const PushResult r = venue.push(pusher_, spec_.direction * spec_.target_move, spec_.budget);
      impact_cost += r.fill.impact_cost;
      exhausted = exhausted || r.exhausted;
    }
  }

private:
  HaltPusherSpec spec_;
  AccountId position_ = kBookAccount;
  AccountId pusher_ = kBookAccount;
};

class BadDebtShifter final : public Agent {
public:
  explicit BadDebtShifter(BadDebtShifterSpec s) : spec_(std::move(s)) {}
  void setup(Venue& venue, int index) override { account_ = venue.add_account(spec_.name, index); }
  void act(Venue& venue, int tick) override {
    if (!venue.trading_open() || tick != spec_.open_tick) return;
    const Side side = spec_.believed_yes >= 0.5 ? Side::Long : Side::Short;
    double opposite_collateral = 0.0;
    for (const auto& p : venue.state().positions) {
      if (p.open() && p.side != side && p.owner != account_) opposite_collateral += p.collateral;
    }
    const double notional = spec_.size_multiple * opposite_collateral;
    if (!(notional > 0.0)) return;
    venue.open_position(account_, side, Leverage(spec_.leverage),
                        Money(notional / spec_.leverage));
  }

private:
  BadDebtShifterSpec spec_;
  AccountId account_ = kBookAccount;
};

class Spoofer final : public Agent {
public:
  explicit Spoofer(SpoofSpec s) : spec_(std::move(s)) {}
  void setup(Venue& venue, int index) override { account_ = venue.add_account(spec_.name, index); }
  void act(Venue& venue, int tick) override {
    if (!venue.trading_open()) return;
    if (tick == spec_.place_tick) {
      order_ = venue.place_resting(account_, spec_.order_side, spec_.offset_bps, spec_.quantity);
      ++placements_;
      const double shift = sign(spec_.order_side) *
                           spoof_reaction_shift(spec_.reaction, spec_.quantity,
                                                venue.config().ladder.side_depth(venue.state().index));
      if (shift != 0.0) {
        const double before = venue.state().index;
        venue.shift_index(shift);
        index_shift_ += venue.state().index - before;
      }
    }
    if (order_ && tick == spec_.place_tick + spec_.dwell) {
      venue.withdraw_resting(*order_);
      ++withdrawals_;
    }
  }
  void finish(const Venue& venue, AgentResult& r) const override {
    r.spoof_placements = placements_;
    r.spoof_withdrawals = withdrawals_;
    r.index_shift = index_shift_;
    if (order_) {
      const auto& o = venue.state().resting[static_cast<std::size_t>(*order_)];
      r.spoof_filled = o.placed - o.remaining;
    }
  }

private:
  SpoofSpec spec_;
  AccountId account_ = kBookAccount;
  std::optional<int> order_;
  int placements_ = 0;
  int withdrawals_ = 0;
  double index_shift_ = 0.0;
};

std::unique_ptr<Agent> make_agent(const AgentSpec& spec, std::uint64_t seed) {
  return std::visit(
      overloaded{
          [](const TraderSpec& s) -> std::unique_ptr<Agent> { return std::make_unique<Trader>(s); },
          [&](const NoiseSpec& s) -> std::unique_ptr<Agent> { return std::make_unique<Noise>(s, seed); },
          [](const VolInjectorSpec& s) -> std::unique_ptr<Agent> {
            return std::make_unique<VolInjector>(s);
          },
          [](const HaltPusherSpec& s) -> std::unique_ptr<Agent> {
            return std::make_unique<HaltPusher>(s);
          },
          [](const BadDebtShifterSpec& s) -> std::unique_ptr<Agent> {
            return std::make_unique<BadDebtShifter>(s);
          },
          [](const SpoofSpec& s) -> std::unique_ptr<Agent> { return std::make_unique<Spoofer>(s); },
      },
      spec);
}

void require(bool ok, const std::string& agent, const char* what) {
  if (!ok) throw Error(ErrorCode::InvalidConfig, "agent '" + agent + "': " + what);
}

void validate_agent(const AgentSpec& spec, int tau) {
  std::visit(overloaded{
                 [&](const TraderSpec& s) {
                   require(s.leverage >= 1.0, s.name, "leverage must be >= 1");
                   require(s.collateral > 0.0, s.name, "collateral must be > 0");
                   require(s.open_tick >= 0 && s.open_tick < tau, s.name, "open_tick out of range");
                   require(s.count >= 1, s.name, "count must be >= 1");
                   require(s.open_spacing >= 1, s.name, "open_spacing must be >= 1");
                 },
                 [&](const NoiseSpec& s) {
                   require(s.size >= 0.0, s.name, "size must be >= 0");
                   require(s.probability >= 0.0 && s.probability <= 1.0, s.name,
                           "probability must lie in [0, 1]");
                 },
                 [&](const VolInjectorSpec& s) {
                   require(s.size >= 0.0, s.name, "size must be >= 0");
                   require(s.start >= 0 && s.duration >= 0 && s.hold >= 0, s.name,
                           "start, duration and hold must be >= 0");
                   require(s.cross_capacity >= 0.0, s.name, "cross_capacity must be >= 0");
                 },
                 [&](const HaltPusherSpec& s) {
                   require(s.leverage >= 1.0, s.name, "leverage must be >= 1");
                   require(s.collateral > 0.0, s.name, "collateral must be > 0");
                   require(s.direction == 1.0 || s.direction == -1.0, s.name,
                           "direction must be +1 or -1");
                   require(s.target_move >= 0.0 && s.budget >= 0.0, s.name,
                           "target_move and budget must be >= 0");
                   require(s.window >= 0, s.name, "window must be >= 0");
                 },
                 [&](const BadDebtShifterSpec& s) {
                   require(s.leverage >= 1.0, s.name, "leverage must be >= 1");
                   require(s.size_multiple >= 0.0, s.name, "size_multiple must be >= 0");
                   require(s.believed_yes >= 0.0 && s.believed_yes <= 1.0, s.name,
                           "believed_yes must lie in [0, 1]");
                   require(s.open_tick >= 0 && s.open_tick < tau, s.name, "open_tick out of range");
                 },
                 [&](const SpoofSpec& s) {
                   require(s.offset_bps >= 0.0, s.name, "offset_bps must be >= 0");
                   require(s.quantity >= 0.0, s.name, "quantity must be >= 0");
                   require(s.place_tick >= 0 && s.dwell >= 0, s.name,
                           "place_tick and dwell must be >= 0");
                   require(s.reaction >= 0.0, s.name, "reaction must be >= 0");
                 },
             },
             spec);
}

}  // namespace

std::string_view agent_kind(const AgentSpec& spec) {
  return std::visit(overloaded{
                        [](const TraderSpec&) { return std::string_view("trader"); },
                        [](const NoiseSpec&) { return std::string_view("noise"); },
                        [](const VolInjectorSpec&) { return std::string_view("vol_injector"); },
                        [](const HaltPusherSpec&) { return std::string_view("halt_pusher"); },
                        [](const BadDebtShifterSpec&) { return std::string_view("bad_debt_shifter"); },
                        [](const SpoofSpec&) { return std::string_view("spoofer"); },
                    },
                    spec);
}

const std::string& agent_name(const AgentSpec& spec) {
  return std::visit([](const auto& s) -> const std::string& { return s.name; }, spec);
}

double spoof_reaction_shift(double reaction, double quantity, double side_depth) {
  if (!(quantity > 0.0) || reaction == 0.0) return 0.0;
  return reaction * quantity / (side_depth + quantity);
}

void RunConfig::validate() const {
  venue.validate();
  if (!(path_volatility >= 0.0) || !std::isfinite(path_volatility)) {
    throw Error(ErrorCode::InvalidConfig, "path volatility must be >= 0");
  }
  std::set<std::string> names;
  for (const auto& a : agents) {
    const auto& name = agent_name(a);
    if (name.empty()) throw Error(ErrorCode::InvalidConfig, "agent name must not be empty");
    if (!names.insert(name).second) {
      throw Error(ErrorCode::InvalidConfig, "duplicate agent name '" + name + "'");
    }
    validate_agent(a, venue.spec.tau);
  }
}

const AgentResult* RunReport::agent(std::string_view name) const {
  for (const auto& a : agents) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

int RunReport::agent_index(std::string_view name) const {
  for (std::size_t i = 0; i < agents.size(); ++i) {
    if (agents[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

RunReport run_market(const RunConfig& config) {
  config.validate();
  const MarketSpec& spec = config.venue.spec;
  Venue venue(config.venue, generate_index_path(spec, config.seed, config.path_volatility));

  std::vector<std::unique_ptr<Agent>> agents;
  agents.reserve(config.agents.size());
  for (std::size_t i = 0; i < config.agents.size(); ++i) {
    agents.push_back(make_agent(config.agents[i], config.seed));
    agents.back()->setup(venue, static_cast<int>(i));
  }

  for (int t = 0; t < spec.tau; ++t) {
    venue.begin_tick();
    for (auto& a : agents) a->act(venue, t);
    venue.end_tick();
  }
  venue.settle();

  const VenueState& st = venue.state();
  RunReport r;
  r.seed = config.seed;
  r.path_hash = venue.path().fingerprint();
  r.engine = std::string(to_string(config.venue.engine.kind));
  r.tau = spec.tau;
  r.halt_offset = spec.halt_offset;
  r.halt_settlement = std::string(to_string(spec.halt_settlement));
  r.outcome = venue.path().outcome;
  r.terminal_jump = venue.path().terminal_jump();
  r.halt_price = st.halt_price;
  r.liquidations = st.liquidations;
  r.liquidations_final_window = st.liquidations_final_window;
  r.final_window_start = spec.tau - spec.final_window_width();
  r.preempted = st.preempted;
  r.halt_closes = st.halt_closes;
  r.forced_close_volume = st.forced_close_volume;
  r.bad_debt_total = st.bad_debt_total;
  r.uncovered_bad_debt = st.uncovered_bad_debt;
  r.pool_initial = st.pool_initial;
  r.pool_final = st.insurance_pool;
  r.pool_drawdown = st.pool_initial - st.insurance_pool;
  r.ledger_residual = venue.ledger_residual();
  r.index = st.observed;
  r.events = st.events;

  for (std::size_t i = 0; i < agents.size(); ++i) {
    AgentResult a;
    a.name = agent_name(config.agents[i]);
    a.kind = std::string(agent_kind(config.agents[i]));
    a.impact_cost = agents[i]->impact_cost;
    a.ladder_exhausted = agents[i]->exhausted;
    for (std::size_t id = 0; id < st.accounts.size(); ++id) {
      const auto& acc = st.accounts[id];
      if (acc.agent != static_cast<int>(i)) continue;
      const double flow = acc.value(st.index);
      a.flow_pnl += flow;
      if (agents[i]->cross && *agents[i]->cross == static_cast<AccountId>(id)) a.cross_pnl = flow;
      a.position_pnl += venue.positions_pnl(static_cast<AccountId>(id));
    }
    a.pnl = a.flow_pnl + a.position_pnl;
    agents[i]->finish(venue, a);
    r.agents.push_back(std::move(a));
  }

  for (const auto& p : st.positions) {
    const int owner_agent = st.accounts[static_cast<std::size_t>(p.owner)].agent;
    if (owner_agent >= 0) {
      auto& a = r.agents[static_cast<std::size_t>(owner_agent)];
      ++a.positions_opened;
      if (p.status == CloseReason::Liquidation) ++a.liquidations;
      if (p.preempted) ++a.preempted;
      a.requirement_increases += p.requirement_increases;
    }
    r.positions.push_back(PositionRecord{p.id, owner_agent, p.side, p.opened_tick, p.entry, p.notional,
                                         p.collateral, p.leverage, p.status, p.closed_tick,
                                         p.close_price, p.gross_pnl, p.paid_pnl, p.bad_debt,
                                         p.pool_covered, p.uncovered, p.requirement_increases,
                                         p.preempted});
  }

  double scale = 1.0;
  for (const auto& p : st.positions) scale = std::max(scale, p.notional);
  if (std::abs(r.ledger_residual) > 1e-9 * scale) {
    throw Error(ErrorCode::InvariantViolation,
                "ledger does not close: residual " + std::to_string(r.ledger_residual));
  }
  return r;
}

std::vector<RunReport> run_seeds(const RunConfig& config, std::span<const std::uint64_t> seeds,
                                 int jobs) {
  std::vector<RunReport> out(seeds.size());
  const auto one = [&](std::size_t i) {
    RunConfig c = config;
    c.seed = seeds[i];
    out[i] = run_market(c);
  };
  const std::size_t workers =
      std::min<std::size_t>(seeds.size(), static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < seeds.size(); ++i) one(i);
    return out;
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> failures(seeds.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < seeds.size(); i = next++) {
        try {
          one(i);
        } catch (...) {
          failures[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return out;
}

}  // namespace evperp
