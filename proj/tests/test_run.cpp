#include <doctest.h>

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "evperp/report_json.hpp"
#include "evperp/run.hpp"
#include "evperp/run_config.hpp"

using namespace evperp;

namespace {

RunConfig stress(EngineKind kind, int halt, std::uint64_t seed) {
  auto c = load_run_config(std::string(EVPERP_SOURCE_DIR) + "/configs/stress.cfg").run;
  c.venue.engine.kind = kind;
  c.venue.spec.halt_offset = halt;
  c.seed = seed;
  return c;
}

double max_notional(const RunReport& r) {
  double m = 1.0;
  for (const auto& p : r.positions) m = std::max(m, p.notional);
  return m;
}

}  // namespace

TEST_CASE("same inputs give byte-identical reports") {
  const auto c = stress(EngineKind::DynamicE2, 0, 17);
  const auto a = to_json(run_market(c), true).dump();
  const auto b = to_json(run_market(c), true).dump();
  CHECK(a == b);
  CHECK(a != to_json(run_market(stress(EngineKind::DynamicE2, 0, 18)), true).dump());
}

TEST_CASE("seed sweeps are independent of worker count") {
  const auto c = stress(EngineKind::StaticE0, 10, 1);
  std::vector<std::uint64_t> seeds(6);
  std::iota(seeds.begin(), seeds.end(), 100);
  const auto one = run_seeds(c, seeds, 1);
  const auto three = run_seeds(c, seeds, 3);
  REQUIRE(one.size() == seeds.size());
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    CHECK(one[i].seed == seeds[i]);
    CHECK(to_json(one[i]).dump() == to_json(three[i]).dump());
  }
  CHECK(run_summary(one).dump() == run_summary(three).dump());
}

TEST_CASE("ledger closes and marks are bounded") {
  for (auto kind : {EngineKind::StaticE0, EngineKind::DynamicE2}) {
    for (int halt : {0, 10}) {
      for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto r = run_market(stress(kind, halt, seed));
        CHECK(std::abs(r.ledger_residual) <= 1e-9 * max_notional(r));
        for (std::size_t t = 0; t + 1 < r.index.size(); ++t) {
          CHECK(r.index[t] >= 0.0);
          CHECK(r.index[t] <= 1.0);
        }
        CHECK((r.index.back() == 0.0 || r.index.back() == 1.0));
        CHECK(r.pool_final >= 0.0);
      }
    }
  }
}

TEST_CASE("halt removes final-window liquidations") {
  int without_halt = 0;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const auto h = run_market(stress(EngineKind::DynamicE2, 10, seed));
    CHECK(h.liquidations_final_window == 0);
    CHECK(h.final_window_start == 190);
    without_halt += run_market(stress(EngineKind::DynamicE2, 0, seed)).liquidations_final_window;
  }
  CHECK(without_halt > 0);
}

TEST_CASE("halt leaves bad debt unchanged when the halt price is the pre-jump index") {
  RunConfig c;
  c.path_volatility = 0.0;
  c.venue.spec.tau = 60;
  c.venue.spec.draw_outcome = true;
  c.venue.spec.halt_settlement = HaltSettlement::Oracle;
  c.venue.engine = MarginEngine::static_e0(0.1);
  c.agents.push_back(TraderSpec{"longs", Side::Long, 5.0, 1000.0, 0, 3, 5});
  c.agents.push_back(TraderSpec{"shorts", Side::Short, 5.0, 1000.0, 0, 3, 5});
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    c.seed = seed;
    c.venue.spec.halt_offset = 0;
    const auto open = run_market(c);
    c.venue.spec.halt_offset = 10;
    const auto halted = run_market(c);
    REQUIRE(halted.halt_price);
    CHECK(*halted.halt_price == doctest::Approx(open.index[59]));
    CHECK(open.bad_debt_total > 0.0);
    CHECK(std::abs(open.bad_debt_total - halted.bad_debt_total) <= 1e-9);
  }
}

TEST_CASE("agents report results under their names") {
  const auto r = run_market(stress(EngineKind::DynamicE2, 0, 3));
  REQUIRE(r.agent("longs"));
  CHECK(r.agent("longs")->positions_opened == 20);
  CHECK(r.agent("longs")->kind == "trader");
  CHECK(r.agent("spoofer")->spoof_placements == 1);
  CHECK(r.agent("spoofer")->spoof_withdrawals == 1);
  CHECK(r.agent("nobody") == nullptr);
  CHECK(r.agent_index("noise") == 3);
  for (const auto& p : r.positions) CHECK(p.notional == p.leverage * p.collateral);
}

TEST_CASE("spoof reaction function") {
  CHECK(spoof_reaction_shift(0.0, 5000.0, 1e4) == 0.0);
  CHECK(spoof_reaction_shift(0.1, 1e4, 1e4) == doctest::Approx(0.05));
  CHECK(spoof_reaction_shift(0.2, 0.0, 1e4) == 0.0);
}

TEST_CASE("run config validation") {
  auto c = stress(EngineKind::StaticE0, 0, 1);
  c.agents.push_back(NoiseSpec{"noise", 1.0, 0.5});
  CHECK_THROWS_AS(run_market(c), Error);

  RunConfig d;
  d.agents.push_back(TraderSpec{"", Side::Long});
  CHECK_THROWS_AS(d.validate(), Error);

  RunConfig e;
  e.path_volatility = -1.0;
  CHECK_THROWS_AS(e.validate(), Error);
}

TEST_CASE("events are recorded and exported") {
  auto c = stress(EngineKind::DynamicE2, 10, 2);
  const auto r = run_market(c);
  REQUIRE_FALSE(r.events.empty());
  const auto csv = events_csv(r);
  CHECK(csv.rfind("tick,index,kind,position_id,amount\n", 0) == 0);
  CHECK(csv.find("halt") != std::string::npos);

  c.venue.record_events = false;
  CHECK(run_market(c).events.empty());
}
