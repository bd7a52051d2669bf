#include "evperp/adversaries.hpp"

#include <algorithm>
#include <cmath>

namespace evperp {

AttackReport trade_based_push(Venue& venue, AccountId account, double target_index_move,
                              double budget) {
  AttackReport r;
  r.channel = ManipulationChannel::TradeBased;
  if (target_index_move != 0.0 && budget > 0.0) {
    const PushResult p = venue.push(account, target_index_move, budget);
    r.manipulation_cost = p.fill.impact_cost;
    r.achieved_move = p.achieved_move;
    if (p.exhausted) {
      r.finalize();
      throw InsufficientDepthError("push exceeds resting ladder depth", r);
    }
  }
  r.finalize();
  return r;
}

AttackReport spoof_and_withdraw(Venue& venue, AccountId account, Direction side, double offset_bps,
                                double quantity, int dwell_ticks, double reaction,
                                const std::function<void(Venue&)>& between) {
  if (dwell_ticks < 0) throw Error(ErrorCode::OutOfRange, "dwell must be >= 0");
  AttackReport r;
  r.channel = ManipulationChannel::SpoofWithdraw;

  const int id = venue.place_resting(account, side, offset_bps, quantity);
  ++r.spoof_placements;
  const double before = venue.state().index;
  const double shift =
      sign(side) * spoof_reaction_shift(reaction, quantity,
                                        venue.config().ladder.side_depth(venue.state().index));
  if (shift != 0.0) venue.shift_index(shift);
  r.achieved_move = venue.state().index - before;

  for (int i = 0; i < dwell_ticks; ++i) {
    venue.end_tick();
    venue.begin_tick();
    if (!venue.trading_open()) break;
    if (between) between(venue);
  }
  venue.withdraw_resting(id);
  ++r.spoof_withdrawals;

  const RestingOrder& o = venue.state().resting[static_cast<std::size_t>(id)];
  r.spoof_filled = o.placed - o.remaining;
  const double value = venue.account_pnl(account);
  r.manipulation_cost = std::max(0.0, -value);
  r.manipulator_pnl = std::max(0.0, value);
  r.finalize();
  return r;
}

namespace {

RunConfig with_agent(const RunConfig& base, AgentSpec agent) {
  RunConfig c = base;
  c.agents.push_back(std::move(agent));
  return c;
}

void fill_common(AttackReport& r, const RunReport& attack, const RunReport& counterfactual,
                 int agent) {
  r.pool_drawdown = attack.pool_drawdown;
  r.liquidations = attack.liquidations;
  r.preempted = attack.preempted;
  r.preempted_attributable = attack.preempted - counterfactual.preempted;
  r.forced_close_volume = attack.forced_close_volume;
  for (const auto& p : attack.positions) {
    if (p.agent != agent && p.paid_pnl < 0.0) r.counterparty_losses -= p.paid_pnl;
  }
}

}  // namespace

AttackRun run_preemption_attack(const RunConfig& base, const PreemptionParams& params) {
  VolInjectorSpec injector{params.name, params.injection_size, params.start, params.duration,
                           params.hold, params.cross_capacity};
  VolInjectorSpec idle = injector;
  idle.size = 0.0;
  idle.cross_capacity = 0.0;

  AttackRun run;
  run.attack_run = run_market(with_agent(base, injector));
  run.counterfactual = run_market(with_agent(base, idle));

  const int idx = run.attack_run.agent_index(params.name);
  const AgentResult& a = run.attack_run.agents[static_cast<std::size_t>(idx)];
  AttackReport& r = run.report;
  r.channel = ManipulationChannel::PreEmption;
  r.channel_absent = base.venue.engine.kind == EngineKind::StaticE0;
  fill_common(r, run.attack_run, run.counterfactual, idx);
  r.manipulator_pnl = a.cross_pnl;
  r.manipulation_cost = a.impact_cost;
  r.differential_pnl = a.pnl - run.counterfactual.agents[static_cast<std::size_t>(idx)].pnl;
  r.finalize();
  return run;
}

AttackRun run_halt_arbitrage(const RunConfig& base, const HaltArbParams& params) {
  HaltPusherSpec pusher{params.name, params.side,        params.leverage, params.collateral,
                        params.direction, params.target_move, params.budget, params.window};
  HaltPusherSpec idle = pusher;
  idle.budget = 0.0;

  AttackRun run;
  run.attack_run = run_market(with_agent(base, pusher));
  run.counterfactual = run_market(with_agent(base, idle));

  const int idx = run.attack_run.agent_index(params.name);
  const AgentResult& a = run.attack_run.agents[static_cast<std::size_t>(idx)];
  const AgentResult& cf = run.counterfactual.agents[static_cast<std::size_t>(idx)];
  AttackReport& r = run.report;
  r.channel = ManipulationChannel::HaltArbitrage;
  r.channel_absent = !base.venue.spec.has_halt();
  fill_common(r, run.attack_run, run.counterfactual, idx);
  r.manipulated_close = run.attack_run.halt_price;
  r.counterfactual_close = run.counterfactual.halt_price;
  if (r.manipulated_close && r.counterfactual_close) {
    r.achieved_move = *r.manipulated_close - *r.counterfactual_close;
  }
  r.differential_pnl = a.position_pnl - cf.position_pnl;
  r.manipulator_pnl = r.differential_pnl;
  r.manipulation_cost = a.impact_cost;
  r.finalize();
  return run;
}

PayoutSplit attribute_payout(const RunReport& run, int agent_index) {
  PayoutSplit s;
  std::optional<Side> side;
  for (const auto& p : run.positions) {
    if (p.agent != agent_index) continue;
    s.gross_payout += p.gross_pnl;
    side = p.side;
  }
  if (!side || !(s.gross_payout > 0.0)) {
    s.gross_payout = std::max(0.0, s.gross_payout);
    return s;
  }

  double cp_loss = 0.0;
  double cp_paid = 0.0;
  double cp_pool = 0.0;
  double cp_uncovered = 0.0;
  for (const auto& p : run.positions) {
    if (p.agent == agent_index || p.side == *side || !(p.gross_pnl < 0.0)) continue;
    cp_loss -= p.gross_pnl;
    cp_paid -= p.paid_pnl;
    cp_pool += p.pool_covered;
    cp_uncovered += p.uncovered;
  }
  const double f = cp_loss > 0.0 ? std::min(1.0, s.gross_payout / cp_loss) : 0.0;
  s.counterparty_funded = f * cp_paid;
  s.pool_funded = f * cp_pool;
  s.uncovered = f * cp_uncovered;
  s.other_funded = s.gross_payout - s.counterparty_funded - s.pool_funded - s.uncovered;
  return s;
}

AttackRun run_bad_debt_shift(const RunConfig& base, const BadDebtParams& params) {
  BadDebtShifterSpec shifter{params.name, params.leverage, params.size_multiple,
                             params.believed_yes, params.open_tick};
  BadDebtShifterSpec idle = shifter;
  idle.size_multiple = 0.0;

  AttackRun run;
  run.attack_run = run_market(with_agent(base, shifter));
  run.counterfactual = run_market(with_agent(base, idle));

  const int idx = run.attack_run.agent_index(params.name);
  const AgentResult& a = run.attack_run.agents[static_cast<std::size_t>(idx)];
  AttackReport& r = run.report;
  r.channel = ManipulationChannel::BadDebtShifting;
  fill_common(r, run.attack_run, run.counterfactual, idx);
  r.manipulator_pnl = a.pnl;
  r.differential_pnl = a.pnl - run.counterfactual.agents[static_cast<std::size_t>(idx)].pnl;
  r.payout = attribute_payout(run.attack_run, idx);
  r.finalize();
  return run;
}

AttackRun run_attack(const RunConfig& base, const AttackSpec& attack) {
  return std::visit(
      [&](const auto& p) -> AttackRun {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, PreemptionParams>) {
          return run_preemption_attack(base, p);
        } else if constexpr (std::is_same_v<T, HaltArbParams>) {
          return run_halt_arbitrage(base, p);
        } else {
          return run_bad_debt_shift(base, p);
        }
      },
      attack);
}

}  // namespace evperp
