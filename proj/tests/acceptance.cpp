// Acceptance checks. One PASS/FAIL line per criterion; exit status 1 if any fail.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "evperp/adversaries.hpp"
#include "evperp/costbenefit.hpp"
#include "evperp/kv_config.hpp"
#include "evperp/matrix.hpp"
#include "evperp/rents.hpp"
#include "evperp/rng.hpp"
#include "evperp/run_config.hpp"
#include "evperp/scenario_io.hpp"

namespace fs = std::filesystem;
using namespace evperp;
using Clock = std::chrono::steady_clock;

namespace {

std::string src(const std::string& rel) { return std::string(EVPERP_SOURCE_DIR) + "/" + rel; }

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

// Seconds per call, best of several batches.
double time_call(const std::function<void()>& fn, int batch = 1000) {
  double best = 1e9;
  for (int rep = 0; rep < 5; ++rep) {
    const auto t0 = Clock::now();
    for (int i = 0; i < batch; ++i) fn();
    best = std::min(best, seconds_since(t0) / batch);
  }
  return best;
}

ManipulationScenario scenario_from(const ScenarioEntry& e) { return validate_scenario(e.raw); }

const ScenarioEntry& by_label(const std::vector<ScenarioEntry>& v, const std::string& label) {
  for (const auto& e : v) {
    if (e.raw.label == label) return e;
  }
  throw Error(ErrorCode::InvalidConfig, "scenario " + label + " missing");
}

Outcome scenario_a() {
  // (K + C*P*pen) / (C*(1 - pi)) with every input an integer multiple of 1/10.
  const std::int64_t num = 100000 * 100 + 50000 * 10 * 10;  // scaled by 100
  const std::int64_t den = 50000 * 70;                       // scaled by 100
  const std::int64_t g = std::gcd(num, den);
  const std::int64_t p = num / g;
  const std::int64_t q = den / g;
  const double exact = static_cast<double>(p) / static_cast<double>(q);

  const auto s = validate_scenario(RawScenario{"A", 1e5, 5e4, 0.3, 0.10, 10.0, {}});
  ThresholdResult t;
  const double secs = time_call([&] { t = leverage_threshold(s); });
  const double rel = std::abs(t.l_star - exact) / exact;
  const bool ok = p == 30 && q == 7 && rel <= 1e-12 && t.l_star >= 4.0 && t.l_star <= 5.0 &&
                  secs < 1e-3;
  return {ok, fmt("l_star=%.12g oracle=%lld/%lld rel_err=%.2e %.3g us", t.l_star,
                  static_cast<long long>(p), static_cast<long long>(q), rel, secs * 1e6)};
}

Outcome regimes(const std::vector<ScenarioEntry>& entries) {
  bool ok = true;
  std::string detail;
  struct Want {
    const char* label;
    Regime regime;
    double floor;
  };
  for (const Want w : {Want{"C", Regime::DetectionDominated, 0.0},
                       Want{"D", Regime::CostDominated, 1e3},
                       Want{"E", Regime::CostDominated, 1e4}}) {
    const auto s = scenario_from(by_label(entries, w.label));
    ThresholdResult t;
    const double secs = time_call([&] { t = leverage_threshold(s); });
    const bool row = t.regime == w.regime && t.l_star > w.floor && secs < 1e-3;
    ok = ok && row;
    detail += fmt("%s=%s(l*=%.6g,%.2gus) ", w.label, std::string(to_string(t.regime)).c_str(),
                  t.l_star, secs * 1e6);
  }
  return {ok, detail};
}

// Expected profit written independently of the library.
double oracle_profit(const RawScenario& r, double lev) {
  return lev * r.capital * (1.0 - r.pi_yes) - r.k_manip - r.capital * r.p_detected * r.penalty_factor;
}

Outcome zero_crossing() {
  const auto t0 = Clock::now();
  Rng rng(2024);
  int bad_zero = 0;
  int bad_search = 0;
  double worst_zero = 0.0;
  for (int i = 0; i < 10000; ++i) {
    RawScenario r;
    r.label = "r";
    r.k_manip = std::pow(10.0, 8.0 * rng.uniform()) * (rng.uniform() < 0.05 ? 0.0 : 1.0);
    r.capital = std::pow(10.0, 2.0 + 6.0 * rng.uniform());
    r.pi_yes = 0.98 * rng.uniform();
    r.p_detected = rng.uniform();
    r.penalty_factor = 100.0 * rng.uniform();
    const auto s = validate_scenario(r);
    const auto t = leverage_threshold(s);

    const double scale = std::max({r.k_manip, r.capital * r.p_detected * r.penalty_factor,
                                   t.raw_l_star * r.capital * (1.0 - r.pi_yes), 1e-300});
    const double zero = std::abs(expected_manipulation_profit_at(s, t.raw_l_star)) / scale;
    worst_zero = std::max(worst_zero, zero);
    if (zero > 1e-9) ++bad_zero;

    // Smallest L on a grid of step h with positive profit, by bisection on the grid index.
    const double h = std::max(1e-9, 1e-7 * t.raw_l_star);
    std::int64_t lo = 0;
    std::int64_t hi = 1;
    while (!(oracle_profit(r, static_cast<double>(hi) * h) > 0.0)) hi *= 2;
    while (hi - lo > 1) {
      const std::int64_t mid = lo + (hi - lo) / 2;
      (oracle_profit(r, static_cast<double>(mid) * h) > 0.0 ? hi : lo) = mid;
    }
    const double boundary = static_cast<double>(hi) * h;
    if (std::abs(boundary - t.raw_l_star) > h * (1.0 + 1e-6)) ++bad_search;
  }
  const double secs = seconds_since(t0);
  return {bad_zero == 0 && bad_search == 0 && secs < 5.0,
          fmt("10000 scenarios, worst |profit(l*)|/scale=%.2e, zero misses=%d, search misses=%d, "
              "%.2fs",
              worst_zero, bad_zero, bad_search, secs)};
}

Outcome rent_laws() {
  const auto t0 = Clock::now();
  Rng rng(77);
  int misses = 0;
  double worst_sharpe = 0.0;
  double worst_amort = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double r = 1e-4 + 0.5 * rng.uniform();
    const double sigma = 1e-3 + rng.uniform();
    const double d = 1e5 * rng.uniform();
    const double c = std::pow(10.0, 2.0 + 5.0 * rng.uniform());
    const auto base = make_rent_profile(r, sigma, d, c, 1.0);
    const double sharpe1 = sharpe_ratio(base);
    const double amort1 = detection_cost_per_profit(base) * 1.0;
    for (int k = 0; k < 5; ++k) {
      const double lev = 1.0 + 199.0 * rng.uniform();
      const auto p = make_rent_profile(r, sigma, d, c, lev);
      const double ds = std::abs(sharpe_ratio(p) - sharpe1) / sharpe1;
      const double da = amort1 > 0.0 ? std::abs(detection_cost_per_profit(p) * lev - amort1) / amort1
                                     : std::abs(detection_cost_per_profit(p) * lev);
      worst_sharpe = std::max(worst_sharpe, ds);
      worst_amort = std::max(worst_amort, da);
      if (ds > 1e-12 || da > 1e-12) ++misses;
    }
  }
  const double secs = seconds_since(t0);
  return {misses == 0 && secs < 1.0,
          fmt("1000 profiles x 5 leverages, worst sharpe drift=%.1e, worst D/profit*L drift=%.1e, "
              "%.3fs",
              worst_sharpe, worst_amort, secs)};
}

RunConfig stress_config() { return load_run_config(src("configs/stress.cfg")).run; }

Outcome ledger() {
  const auto t0 = Clock::now();
  const RunConfig base = stress_config();
  int runs = 0;
  int misses = 0;
  double worst = 0.0;
  std::uint64_t seed = 1;
  for (auto kind : {EngineKind::StaticE0, EngineKind::DynamicE2}) {
    for (int halt : {0, 10}) {
      for (auto mode : {HaltSettlement::HaltPrice, HaltSettlement::Oracle}) {
        if (halt == 0 && mode == HaltSettlement::Oracle) continue;
        RunConfig c = base;
        c.venue.engine.kind = kind;
        c.venue.spec.halt_offset = halt;
        c.venue.spec.halt_settlement = mode;
        c.venue.record_events = false;
        const int n = halt == 0 ? 166 : 167;
        for (int i = 0; i < n; ++i) {
          c.seed = seed++;
          const auto r = run_market(c);
          ++runs;
          worst = std::max(worst, std::abs(r.ledger_residual));
          if (!(std::abs(r.ledger_residual) <= 1e-9)) ++misses;
        }
      }
    }
  }
  const double secs = seconds_since(t0);
  return {runs >= 1000 && misses == 0 && secs < 60.0,
          fmt("%d runs (e0/e2 x no-halt/halt-price/oracle-halt), worst |residual|=%.2e, "
              "misses=%d, %.2fs",
              runs, worst, misses, secs)};
}

Outcome halt_mechanics() {
  RunConfig c = stress_config();
  c.venue.record_events = false;
  int halted_nonzero = 0;
  int open_positive = 0;
  for (auto kind : {EngineKind::StaticE0, EngineKind::DynamicE2}) {
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      c.seed = seed;
      c.venue.engine.kind = kind;
      c.venue.spec.halt_offset = 10;
      if (run_market(c).liquidations_final_window != 0) ++halted_nonzero;
      c.venue.spec.halt_offset = 0;
      if (run_market(c).liquidations_final_window > 0) ++open_positive;
    }
  }
  return {halted_nonzero == 0 && open_positive > 0,
          fmt("halt 10: %d/200 runs with final-window liquidations; no halt: %d/200 runs with "
              "final-window liquidations",
              halted_nonzero, open_positive)};
}

Outcome bad_debt() {
  RunConfig c;
  c.path_volatility = 0.0;
  c.venue.spec.tau = 100;
  c.venue.spec.draw_outcome = true;
  c.venue.spec.halt_settlement = HaltSettlement::Oracle;
  c.venue.engine = MarginEngine::static_e0(0.1);
  c.venue.pool.fraction = 0.1;
  c.agents.push_back(TraderSpec{"longs", Side::Long, 5.0, 1000.0, 0, 4, 10});
  c.agents.push_back(TraderSpec{"shorts", Side::Short, 5.0, 1000.0, 0, 4, 10});
  int unequal = 0;
  int with_debt = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    c.seed = seed;
    c.venue.spec.halt_offset = 0;
    const auto open = run_market(c);
    c.venue.spec.halt_offset = 10;
    const auto halted = run_market(c);
    const double diff = std::abs(open.bad_debt_total - halted.bad_debt_total);
    worst = std::max(worst, diff);
    if (!(diff <= 1e-9) || !halted.halt_price ||
        *halted.halt_price != open.index[open.index.size() - 2]) {
      ++unequal;
    }
    if (open.bad_debt_total > 0.0) ++with_debt;
  }

  const auto f = load_run_config(src("configs/bad_debt.cfg"));
  const auto run = run_attack(f.run, *f.attack);
  const double share = run.report.payout ? run.report.payout->pool_share() : -1.0;
  const bool ok = unequal == 0 && with_debt == 100 && std::abs(share - 0.6) <= 1e-12;
  return {ok, fmt("100 paired seeds, worst |bad debt diff|=%.1e, runs with bad debt=%d; "
                  "fixture pool share=%.15g",
                  worst, with_debt, share)};
}

Outcome preemption() {
  const auto f = load_run_config(src("configs/preemption.cfg"));
  RunConfig e2 = f.run;
  RunConfig e0 = f.run;
  e2.venue.engine.kind = EngineKind::DynamicE2;
  e0.venue.engine.kind = EngineKind::StaticE0;
  e2.venue.record_events = e0.venue.record_events = false;
  int violations = 0;
  int strict = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    e2.seed = e0.seed = seed;
    const int l2 = run_market(e2).liquidations;
    const int l0 = run_market(e0).liquidations;
    if (l2 < l0) ++violations;
    if (l2 > l0) ++strict;
  }
  const auto absent = run_attack(e0, *f.attack).report;
  const bool ok = violations == 0 && strict >= 20 && absent.channel_absent && absent.preempted == 0;
  return {ok, fmt("100 paired seeds: E2<E0 in %d, E2>E0 in %d; E0 attack channel_absent=%s "
                  "preempted=%d",
                  violations, strict, absent.channel_absent ? "true" : "false", absent.preempted)};
}

Outcome halt_arbitrage() {
  auto f = load_run_config(src("configs/halt_arbitrage.cfg"));
  f.run.venue.record_events = false;
  const auto params = std::get<HaltArbParams>(*f.attack);
  auto zero = params;
  zero.budget = 0.0;
  const double expected_sign = params.direction * sign(params.side);
  int nonzero_at_zero = 0;
  int matching = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    f.run.seed = seed;
    if (run_halt_arbitrage(f.run, zero).report.differential_pnl != 0.0) ++nonzero_at_zero;
    const double d = run_halt_arbitrage(f.run, params).report.differential_pnl;
    if (d != 0.0 && d * expected_sign > 0.0) ++matching;
  }
  return {nonzero_at_zero == 0 && matching >= 95,
          fmt("budget 0: %d/100 nonzero differentials; budget %.3g: %d/100 with sign = "
              "direction x side",
              nonzero_at_zero, params.budget, matching)};
}

Outcome matrix() {
  const std::string golden = read_text_file(src("tests/golden/channel_control_matrix.json"));
  const bool same = golden == std::string(embedded_matrix_json());
  const auto& m = ChannelControlMatrix::embedded();
  const auto parsed_golden = ChannelControlMatrix::parse(golden);
  const auto fi = m.channels_by_effect(LeverageEffect::FrameworkIntroduced);
  const bool fi_ok = fi == std::vector<ManipulationChannel>{ManipulationChannel::PreEmption,
                                                             ManipulationChannel::HaltArbitrage};
  const bool ok = same && m.rows() == parsed_golden.rows() && m.rows().size() == 10 && fi_ok;
  return {ok, fmt("byte-identical=%s rows=%zu framework-introduced=%zu", same ? "yes" : "no",
                  m.rows().size(), fi.size())};
}

std::string band_text(const std::optional<ReferenceBand>& b) {
  if (!b) return "";
  return format_number(b->low) + "-" + (b->high ? format_number(*b->high) : std::string("inf"));
}

// Computed thresholds against the reference ranges shipped with the scenario file.
std::string deviations_csv(const std::vector<ScenarioEntry>& entries) {
  std::ostringstream os;
  os << "label,quantity,computed,reference,within\n";
  for (const auto& e : entries) {
    const auto s = scenario_from(e);
    const auto t = leverage_threshold(s);
    if (e.base_band) {
      os << e.raw.label << ",base_l_star," << format_number(t.l_star) << ','
         << band_text(e.base_band) << ',' << (e.base_band->contains(t.l_star) ? "yes" : "no")
         << '\n';
    }
    const auto g = sweep_thresholds(s, e.axes);
    if (e.grid_band) {
      const bool lo_in = e.grid_band->contains(g.min_l_star());
      const bool hi_in = e.grid_band->contains(g.max_l_star());
      os << e.raw.label << ",grid_min_l_star," << format_number(g.min_l_star()) << ','
         << band_text(e.grid_band) << ',' << (lo_in ? "yes" : "no") << '\n';
      os << e.raw.label << ",grid_max_l_star," << format_number(g.max_l_star()) << ','
         << band_text(e.grid_band) << ',' << (hi_in ? "yes" : "no") << '\n';
      const double lo_ratio = g.min_l_star() / e.grid_band->low;
      const double hi_ratio = e.grid_band->high ? g.max_l_star() / *e.grid_band->high : 1.0;
      const bool order = lo_ratio >= 0.1 && lo_ratio <= 10.0 && hi_ratio >= 0.1 && hi_ratio <= 10.0;
      os << e.raw.label << ",grid_within_order_of_magnitude,," << band_text(e.grid_band) << ','
         << (order ? "yes" : "no") << '\n';
    }
    if (!e.regime_label.empty()) {
      os << e.raw.label << ",regime," << to_string(t.regime) << ',' << e.regime_label << ','
         << (e.regime_label == to_string(t.regime) ? "yes" : "no") << '\n';
    }
  }
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::string out;
  app.add_option("--out", out, "Directory for the deviations table and the result log");
  CLI11_PARSE(app, argc, argv);

  const auto entries = parse_scenarios(read_text_file(src("scenarios/table_scenarios.txt")));

  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria = {
      {1, "scenario A threshold", scenario_a},
      {2, "regime labels", [&] { return regimes(entries); }},
      {3, "zero crossing and brute-force boundary", zero_crossing},
      {4, "rent laws", rent_laws},
      {5, "ledger conservation", ledger},
      {6, "halt mechanics", halt_mechanics},
      {7, "bad debt under halt and payout split", bad_debt},
      {8, "pre-emption ordering", preemption},
      {9, "halt-arbitrage differencing", halt_arbitrage},
      {10, "channel-control matrix", matrix},
  };

  std::ostringstream log;
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    const std::string line = fmt("%s %2d %s: ", o.pass ? "PASS" : "FAIL", c.id, c.name) + o.detail;
    std::printf("%s\n", line.c_str());
    log << line << '\n';
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());

  if (!out.empty()) {
    fs::create_directories(out);
    std::ofstream(fs::path(out) / "acceptance.txt") << log.str();
    std::ofstream(fs::path(out) / "deviations.csv") << deviations_csv(entries);
  }
  return failed == 0 ? 0 : 1;
}
