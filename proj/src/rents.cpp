#include "evperp/rents.hpp"

namespace evperp {

RentProfile make_rent_profile(double rent_per_event, double return_volatility,
                              double detection_cost, double capital, double leverage) {
  if (!(return_volatility >= 0.0)) {
    throw Error(ErrorCode::NegativeValue, "return volatility must be >= 0");
  }
  if (!(detection_cost >= 0.0)) throw Error(ErrorCode::NegativeValue, "detection cost must be >= 0");
  return RentProfile{rent_per_event, return_volatility, detection_cost, Money(capital),
                     Leverage(leverage)};
}

double leveraged_rent(const RentProfile& p) {
  return p.leverage.value() * p.rent_per_event * p.capital.amount();
}

double sharpe_ratio(const RentProfile& p, double funding_cost_per_event) {
  if (!(p.return_volatility > 0.0)) {
    throw Error(ErrorCode::DegenerateVolatility, "return volatility must be > 0");
  }
  const double l = p.leverage.value();
  return (l * p.rent_per_event - funding_cost_per_event) / (l * p.return_volatility);
}

double detection_cost_per_profit(const RentProfile& p) {
  const double rent = leveraged_rent(p);
  if (!(rent > 0.0)) throw Error(ErrorCode::ZeroRent, "leveraged rent must be > 0");
  return p.detection_cost / rent;
}

namespace {

EngineOutcome outcome_for(const RunReport& run, std::string_view trader) {
  const AgentResult* a = run.agent(trader);
  if (!a) throw Error(ErrorCode::InvalidConfig, "no agent named '" + std::string(trader) + "'");
  return EngineOutcome{run.engine, a->pnl, a->liquidations, a->requirement_increases,
                       a->positions_opened};
}

}  // namespace

CompressionReport rent_compression_check(const RunReport& dynamic_run, const RunReport& static_run,
                                         std::string_view trader) {
  if (dynamic_run.seed != static_run.seed) {
    throw Error(ErrorCode::MismatchedSeeds, "runs were produced from different seeds");
  }
  if (dynamic_run.path_hash != static_run.path_hash) {
    throw Error(ErrorCode::MismatchedSeeds, "runs do not share an index path");
  }
  CompressionReport r;
  r.trader = std::string(trader);
  r.seed = dynamic_run.seed;
  r.path_hash = dynamic_run.path_hash;
  r.dynamic_engine = outcome_for(dynamic_run, trader);
  r.static_engine = outcome_for(static_run, trader);
  r.pnl_difference = r.dynamic_engine.pnl - r.static_engine.pnl;
  return r;
}

}  // namespace evperp
