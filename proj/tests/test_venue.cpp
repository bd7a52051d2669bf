#include <doctest.h>

#include <cmath>
#include <vector>

#include "evperp/venue.hpp"

using namespace evperp;

namespace {

VenueConfig flat_config(int tau, int outcome = 1) {
  VenueConfig c;
  c.spec.tau = tau;
  c.spec.outcome = outcome;
  c.spec.final_window = 2;
  c.engine = MarginEngine::static_e0(0.1);
  return c;
}

Venue make_venue(const VenueConfig& c, double vol = 0.0, std::uint64_t seed = 1) {
  return Venue(c, generate_index_path(c.spec, seed, vol));
}

void run_to_end(Venue& v) {
  while (v.state().tick < v.config().spec.tau) v.step({});
}

}  // namespace

TEST_CASE("quiet venue advances without liquidations") {
  auto v = make_venue(flat_config(20));
  const AccountId a = v.add_account("a", 0);
  v.begin_tick();
  const int id = v.open_position(a, Side::Long, Leverage(5.0), Money(1000.0));
  v.end_tick();
  for (int i = 0; i < 10; ++i) v.step({});
  CHECK(v.state().tick == 11);
  CHECK(v.state().liquidations == 0);
  const auto& p = v.state().positions[static_cast<std::size_t>(id)];
  CHECK(p.open());
  CHECK(p.notional == 5.0 * 1000.0);
  CHECK(p.entry == 0.5);
}

TEST_CASE("liquidation threshold boundary") {
  SUBCASE("collateral equal to requirement survives") {
    auto c = flat_config(10);
    c.engine = MarginEngine::static_e0(0.2);
    auto v = make_venue(c);
    const AccountId a = v.add_account("a", 0);
    v.begin_tick();
    v.open_position(a, Side::Long, Leverage(5.0), Money(1000.0));
    v.end_tick();
    CHECK(v.state().liquidations == 0);
  }
  SUBCASE("collateral just below requirement is liquidated") {
    auto c = flat_config(10);
    c.engine = MarginEngine::static_e0(0.2 + 1e-9);
    auto v = make_venue(c);
    const AccountId a = v.add_account("a", 0);
    v.begin_tick();
    v.open_position(a, Side::Long, Leverage(5.0), Money(1000.0));
    v.end_tick();
    CHECK(v.state().liquidations == 1);
    CHECK(v.state().positions[0].status == CloseReason::Liquidation);
  }
}

TEST_CASE("liquidation pays impact without moving the index") {
  auto c = flat_config(10);
  c.engine = MarginEngine::static_e0(0.5);
  auto v = make_venue(c);
  const AccountId a = v.add_account("a", 0);
  v.begin_tick();
  v.open_position(a, Side::Long, Leverage(5.0), Money(100.0));
  v.end_tick();
  const auto& p = v.state().positions[0];
  REQUIRE(p.status == CloseReason::Liquidation);
  CHECK(p.close_price < 0.5);
  CHECK(v.state().index == 0.5);
  CHECK(v.state().forced_close_volume == doctest::Approx(500.0));
  CHECK(std::abs(v.ledger_residual()) < 1e-9);
}

TEST_CASE("forced flow goes to the routed account up to capacity") {
  auto c = flat_config(10);
  c.engine = MarginEngine::static_e0(0.5);
  auto v = make_venue(c);
  const AccountId a = v.add_account("a", 0);
  const AccountId x = v.add_account("cross", 1);
  v.route_forced_flow(x, 300.0);
  v.begin_tick();
  v.open_position(a, Side::Long, Leverage(5.0), Money(100.0));
  v.end_tick();
  CHECK(v.state().accounts[static_cast<std::size_t>(x)].inventory == doctest::Approx(300.0));
  CHECK(v.forced_flow_remaining() == 0.0);
  CHECK(std::abs(v.ledger_residual()) < 1e-9);
}

TEST_CASE("settlement bad debt and pool exhaustion") {
  auto c = flat_config(5, 0);
  c.pool.initial = 0.1 * 5000.0;
  auto v = make_venue(c);
  const AccountId a = v.add_account("a", 0);
  v.begin_tick();
  v.open_position(a, Side::Long, Leverage(5.0), Money(1000.0));
  v.end_tick();
  run_to_end(v);
  v.settle();
  const auto& p = v.state().positions[0];
  const double n = 5000.0;
  CHECK(p.status == CloseReason::Settlement);
  CHECK(p.gross_pnl == doctest::Approx(-0.5 * n));
  CHECK(p.paid_pnl == doctest::Approx(-0.2 * n));
  CHECK(p.bad_debt == doctest::Approx(0.3 * n));
  CHECK(v.state().insurance_pool == 0.0);
  CHECK(v.state().uncovered_bad_debt == doctest::Approx(0.2 * n));
  CHECK(std::abs(v.ledger_residual()) < 1e-9);
}

TEST_CASE("winner at the outcome has no jump and no bad debt") {
  auto c = flat_config(5, 1);
  c.spec.start_index = 1.0 - 1e-15;
  auto v = make_venue(c);
  const AccountId a = v.add_account("a", 0);
  v.begin_tick();
  v.open_position(a, Side::Long, Leverage(5.0), Money(1000.0));
  v.end_tick();
  run_to_end(v);
  v.settle();
  CHECK(v.state().bad_debt_total == 0.0);
  CHECK(v.state().positions[0].gross_pnl == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("settlement errors") {
  auto v = make_venue(flat_config(3));
  CHECK_THROWS_AS(v.settle(), Error);
  run_to_end(v);
  try {
    v.begin_tick();
    FAIL("stepped past resolution");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SettledVenue);
  }
  v.settle();
  try {
    v.settle();
    FAIL("settled twice");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DoubleSettlement);
  }
  CHECK_THROWS_AS(v.step({}), Error);
}

TEST_CASE("halt closes everything at the prevailing index") {
  auto c = flat_config(20);
  c.spec.halt_offset = 5;
  auto v = make_venue(c, 0.1, 9);
  const AccountId a = v.add_account("a", 0);
  const AccountId b = v.add_account("b", 1);
  v.begin_tick();
  v.open_position(a, Side::Long, Leverage(2.0), Money(1000.0));
  v.open_position(b, Side::Short, Leverage(2.0), Money(1000.0));
  v.end_tick();
  while (v.state().tick < 15) v.step({});
  v.begin_tick();
  CHECK(v.state().halted);
  REQUIRE(v.state().halt_price);
  for (const auto& p : v.state().positions) {
    CHECK(p.status == CloseReason::Halt);
    CHECK(p.close_price == *v.state().halt_price);
  }
  CHECK_THROWS_AS(v.execute_market_order(a, 10.0), Error);
  CHECK_THROWS_AS(v.open_position(a, Side::Long, Leverage(2.0), Money(10.0)), Error);
  v.end_tick();
  run_to_end(v);
  const double before = v.account_pnl(a) + v.account_pnl(b);
  v.settle();
  CHECK(v.account_pnl(a) + v.account_pnl(b) == doctest::Approx(before));
  CHECK(v.state().halt_closes == 2);
  CHECK(std::abs(v.ledger_residual()) < 1e-9);
}

TEST_CASE("oracle halt freezes positions until the outcome") {
  auto c = flat_config(20, 0);
  c.spec.halt_offset = 5;
  c.spec.halt_settlement = HaltSettlement::Oracle;
  auto v = make_venue(c);
  const AccountId a = v.add_account("a", 0);
  v.begin_tick();
  v.open_position(a, Side::Long, Leverage(5.0), Money(1000.0));
  v.end_tick();
  run_to_end(v);
  CHECK(v.state().positions[0].open());
  CHECK(v.state().liquidations == 0);
  v.settle();
  CHECK(v.state().positions[0].status == CloseReason::Settlement);
  CHECK(v.state().positions[0].close_price == 0.0);
}

TEST_CASE("market orders move the index and the ledger closes") {
  auto v = make_venue(flat_config(10));
  const AccountId a = v.add_account("a", 0);
  const AccountId b = v.add_account("b", 1);
  v.begin_tick();
  v.open_position(a, Side::Short, Leverage(3.0), Money(500.0));
  const Fill f = v.execute_market_order(b, 100.0);
  CHECK(f.quantity == doctest::Approx(100.0));
  CHECK(f.index_after == doctest::Approx(0.5 + 5e-4));
  CHECK(f.impact_cost == doctest::Approx(100.0 * 2.5e-4));
  v.end_tick();
  const std::vector<MarketOrder> orders{{b, -250.0}, {a, 40.0}};
  v.step(orders);
  run_to_end(v);
  v.settle();
  CHECK(std::abs(v.ledger_residual()) < 1e-9);
  for (double x : v.state().observed) {
    CHECK(x >= 0.0);
    CHECK(x <= 1.0);
  }
  CHECK(v.state().observed.back() == 1.0);
}

TEST_CASE("order displacement decays") {
  auto c = flat_config(10);
  c.impact_decay = 0.5;
  auto v = make_venue(c);
  const AccountId b = v.add_account("b", 0);
  v.begin_tick();
  v.execute_market_order(b, 100.0);
  v.end_tick();
  v.begin_tick();
  CHECK(v.state().index == doctest::Approx(0.5 + 2.5e-4));
  v.end_tick();
}

TEST_CASE("push respects target and exhaustion") {
  auto v = make_venue(flat_config(10));
  const AccountId a = v.add_account("a", 0);
  v.begin_tick();
  const auto zero = v.push(a, 0.0, 1e6);
  CHECK(zero.achieved_move == 0.0);
  CHECK(zero.fill.impact_cost == 0.0);
  const auto up = v.push(a, 0.003, 1e9);
  CHECK(up.reached_target);
  CHECK(up.achieved_move == doctest::Approx(0.003));
  const auto far = v.push(a, 0.2, 1e12);
  CHECK(far.exhausted);
  CHECK_FALSE(far.reached_target);
  v.end_tick();
}

TEST_CASE("resting orders fill against incoming flow and can be withdrawn") {
  auto v = make_venue(flat_config(10));
  const AccountId m = v.add_account("maker", 0);
  const AccountId t = v.add_account("taker", 1);
  v.begin_tick();
  const int id = v.place_resting(m, Direction::Buy, 1.0, 50.0);
  v.execute_market_order(t, -100.0);
  CHECK(v.state().resting[static_cast<std::size_t>(id)].remaining < 50.0);
  CHECK(v.withdraw_resting(id) >= 0.0);
  CHECK(v.withdraw_resting(id) == 0.0);
  CHECK_THROWS_AS(v.place_resting(m, Direction::Buy, 1e6, 1.0), Error);
  v.end_tick();
  run_to_end(v);
  v.settle();
  CHECK(std::abs(v.ledger_residual()) < 1e-9);
}

TEST_CASE("dynamic engine preempts positions that survive the static requirement") {
  auto c = flat_config(30);
  c.engine = MarginEngine{EngineKind::DynamicE2, 0.1, 5.0, 0.0, 0.0, 0.001, 5};
  auto v = make_venue(c);
  const AccountId a = v.add_account("a", 0);
  const AccountId inj = v.add_account("inj", 1);
  v.begin_tick();
  v.open_position(a, Side::Long, Leverage(5.0), Money(1000.0));
  v.end_tick();
  for (int i = 0; i < 8 && v.state().liquidations == 0; ++i) {
    const std::vector<MarketOrder> o{{inj, (i % 2 == 0 ? 1.0 : -1.0) * 2000.0}};
    v.step(o);
  }
  CHECK(v.state().liquidations == 1);
  CHECK(v.state().preempted == 1);
  CHECK(v.state().positions[0].preempted);
}
