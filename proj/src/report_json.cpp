#include "evperp/report_json.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace evperp {

namespace {

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

Json to_json(const RunReport& r, bool include_events) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["seed"] = r.seed;
  j["path_hash"] = r.path_hash;
  j["engine"] = r.engine;
  j["tau"] = r.tau;
  j["halt_offset"] = r.halt_offset;
  j["halt_settlement"] = r.halt_settlement;
  j["outcome"] = r.outcome;
  j["terminal_jump"] = r.terminal_jump;
  j["halt_price"] = optional_number(r.halt_price);
  j["liquidations"] = {{"total", r.liquidations},
                       {"final_window", r.liquidations_final_window},
                       {"final_window_start", r.final_window_start},
                       {"preempted", r.preempted},
                       {"halt_closes", r.halt_closes},
                       {"forced_close_volume", r.forced_close_volume}};
  j["bad_debt"] = {{"total", r.bad_debt_total}, {"uncovered", r.uncovered_bad_debt}};
  j["pool"] = {{"initial", r.pool_initial}, {"final", r.pool_final}, {"drawdown", r.pool_drawdown}};
  j["ledger_residual"] = r.ledger_residual;

  Json agents = Json::array();
  for (const auto& a : r.agents) {
    Json x;
    x["name"] = a.name;
    x["kind"] = a.kind;
    x["pnl"] = a.pnl;
    x["position_pnl"] = a.position_pnl;
    x["flow_pnl"] = a.flow_pnl;
    x["cross_pnl"] = a.cross_pnl;
    x["impact_cost"] = a.impact_cost;
    x["positions_opened"] = a.positions_opened;
    x["liquidations"] = a.liquidations;
    x["preempted"] = a.preempted;
    x["requirement_increases"] = a.requirement_increases;
    if (a.kind == "spoofer") {
      x["spoof_placements"] = a.spoof_placements;
      x["spoof_withdrawals"] = a.spoof_withdrawals;
      x["spoof_filled"] = a.spoof_filled;
      x["index_shift"] = a.index_shift;
    }
    x["ladder_exhausted"] = a.ladder_exhausted;
    agents.push_back(std::move(x));
  }
  j["agents"] = std::move(agents);

  Json positions = Json::array();
  for (const auto& p : r.positions) {
    positions.push_back({{"id", p.id},
                         {"agent", p.agent},
                         {"side", to_string(p.side)},
                         {"opened_tick", p.opened_tick},
                         {"entry", p.entry},
                         {"notional", p.notional},
                         {"collateral", p.collateral},
                         {"leverage", p.leverage},
                         {"close_reason", to_string(p.reason)},
                         {"closed_tick", p.closed_tick},
                         {"close_price", p.close_price},
                         {"gross_pnl", p.gross_pnl},
                         {"paid_pnl", p.paid_pnl},
                         {"bad_debt", p.bad_debt},
                         {"pool_covered", p.pool_covered},
                         {"uncovered", p.uncovered},
                         {"requirement_increases", p.requirement_increases},
                         {"preempted", p.preempted}});
  }
  j["positions"] = std::move(positions);
  j["index"] = r.index;

  if (include_events) {
    Json events = Json::array();
    for (const auto& e : r.events) {
      events.push_back({{"tick", e.tick},
                        {"index", e.index},
                        {"kind", to_string(e.kind)},
                        {"position_id", e.position_id},
                        {"amount", e.amount}});
    }
    j["events"] = std::move(events);
  }
  return j;
}

Json to_json(const AttackReport& r) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["channel"] = to_string(r.channel);
  j["channel_absent"] = r.channel_absent;
  j["manipulator_pnl"] = r.manipulator_pnl;
  j["manipulation_cost"] = r.manipulation_cost;
  j["net_pnl"] = r.net_pnl();
  j["profitable"] = r.profitable;
  j["differential_pnl"] = r.differential_pnl;
  j["counterparty_losses"] = r.counterparty_losses;
  j["pool_drawdown"] = r.pool_drawdown;
  j["liquidations"] = r.liquidations;
  j["preempted"] = r.preempted;
  j["preempted_attributable"] = r.preempted_attributable;
  j["forced_close_volume"] = r.forced_close_volume;
  j["spoof_placements"] = r.spoof_placements;
  j["spoof_withdrawals"] = r.spoof_withdrawals;
  j["spoof_filled"] = r.spoof_filled;
  j["achieved_move"] = r.achieved_move;
  j["manipulated_close"] = optional_number(r.manipulated_close);
  j["counterfactual_close"] = optional_number(r.counterfactual_close);
  if (r.payout) {
    const auto& p = *r.payout;
    j["payout"] = {{"gross", p.gross_payout},
                   {"counterparty_funded", p.counterparty_funded},
                   {"pool_funded", p.pool_funded},
                   {"uncovered", p.uncovered},
                   {"other_funded", p.other_funded},
                   {"pool_share", p.pool_share()}};
  } else {
    j["payout"] = nullptr;
  }
  return j;
}

Json to_json(const CompressionReport& r) {
  const auto side = [](const EngineOutcome& o) {
    return Json{{"engine", o.engine},
                {"pnl", o.pnl},
                {"margin_calls", o.margin_calls},
                {"requirement_increases", o.requirement_increases},
                {"positions", o.positions}};
  };
  Json j;
  j["schema"] = kSchemaVersion;
  j["trader"] = r.trader;
  j["seed"] = r.seed;
  j["path_hash"] = r.path_hash;
  j["dynamic"] = side(r.dynamic_engine);
  j["static"] = side(r.static_engine);
  j["pnl_difference"] = r.pnl_difference;
  return j;
}

Json to_json(const ThresholdRow& r) {
  Json j;
  j["label"] = r.label;
  if (r.result) {
    const auto& t = *r.result;
    j["l_star"] = t.l_star;
    j["raw_l_star"] = t.raw_l_star;
    j["cost_term"] = t.cost_term;
    j["detection_term"] = t.detection_term;
    j["regime"] = to_string(t.regime);
    j["always_profitable"] = t.always_profitable;
  } else {
    j["error"] = r.error;
  }
  return j;
}

Json run_summary(const std::vector<RunReport>& runs) {
  Json j;
  j["runs"] = runs.size();
  if (runs.empty()) return j;
  const auto stats = [&](auto field) {
    double total = 0.0;
    double lo = field(runs.front());
    double hi = lo;
    for (const auto& r : runs) {
      const double v = field(r);
      total += v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    return Json{{"mean", total / static_cast<double>(runs.size())}, {"min", lo}, {"max", hi},
                {"total", total}};
  };
  j["engine"] = runs.front().engine;
  j["halt_offset"] = runs.front().halt_offset;
  j["liquidations"] = stats([](const RunReport& r) { return double(r.liquidations); });
  j["liquidations_final_window"] =
      stats([](const RunReport& r) { return double(r.liquidations_final_window); });
  j["preempted"] = stats([](const RunReport& r) { return double(r.preempted); });
  j["bad_debt"] = stats([](const RunReport& r) { return r.bad_debt_total; });
  j["uncovered_bad_debt"] = stats([](const RunReport& r) { return r.uncovered_bad_debt; });
  j["pool_drawdown"] = stats([](const RunReport& r) { return r.pool_drawdown; });
  double worst = 0.0;
  for (const auto& r : runs) worst = std::max(worst, std::abs(r.ledger_residual));
  j["max_abs_ledger_residual"] = worst;
  return j;
}

std::string events_csv(const RunReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "tick,index,kind,position_id,amount\n";
  for (const auto& e : r.events) {
    os << e.tick << ',' << e.index << ',' << to_string(e.kind) << ',' << e.position_id << ','
       << e.amount << '\n';
  }
  return os.str();
}

}  // namespace evperp
