#include "evperp/run_config.hpp"

#include <algorithm>
#include <iterator>

#include "evperp/kv_config.hpp"

namespace evperp {

namespace {

Side parse_side(const KvBlock& b, std::string_view key, Side fallback) {
  const KvEntry* e = b.find(key);
  if (!e) return fallback;
  if (e->value == "long") return Side::Long;
  if (e->value == "short") return Side::Short;
  b.fail(e->line, "'" + e->key + "' expects long or short");
}

Direction parse_direction(const KvBlock& b, std::string_view key, Direction fallback) {
  const KvEntry* e = b.find(key);
  if (!e) return fallback;
  if (e->value == "buy" || e->value == "bid") return Direction::Buy;
  if (e->value == "sell" || e->value == "ask") return Direction::Sell;
  b.fail(e->line, "'" + e->key + "' expects buy or sell");
}

void read_market(const KvBlock& b, VenueConfig& v) {
  b.reject_unknown({"tau", "halt_offset", "outcome", "draw_outcome", "start_index",
                    "terminal_jump_reference", "event_class", "halt_settlement", "final_window",
                    "impact_decay"});
  MarketSpec& m = v.spec;
  m.tau = b.get_int("tau", m.tau);
  m.halt_offset = b.get_int("halt_offset", m.halt_offset);
  m.outcome = b.get_int("outcome", m.outcome);
  m.draw_outcome = b.get_bool("draw_outcome", m.draw_outcome);
  m.start_index = b.get_double("start_index", m.start_index);
  m.terminal_jump_reference = b.get_double("terminal_jump_reference", m.terminal_jump_reference);
  m.final_window = b.get_int("final_window", m.final_window);
  v.impact_decay = b.get_double("impact_decay", v.impact_decay);
  if (const KvEntry* e = b.find("event_class")) {
    if (e->value == "sports") m.event_class = EventClass::Sports;
    else if (e->value == "politics") m.event_class = EventClass::Politics;
    else if (e->value == "crypto") m.event_class = EventClass::Crypto;
    else if (e->value == "other") m.event_class = EventClass::Other;
    else b.fail(e->line, "event_class expects sports, politics, crypto or other");
  }
  if (const KvEntry* e = b.find("halt_settlement")) {
    if (e->value == "halt_price") m.halt_settlement = HaltSettlement::HaltPrice;
    else if (e->value == "oracle") m.halt_settlement = HaltSettlement::Oracle;
    else b.fail(e->line, "halt_settlement expects halt_price or oracle");
  }
}

void read_engine(const KvBlock& b, MarginEngine& e) {
  b.reject_unknown({"kind", "m0", "alpha", "beta", "gamma", "vol_ref", "vol_window", "ttr_ref"});
  if (const KvEntry* k = b.find("kind")) {
    if (k->value == "e0") e.kind = EngineKind::StaticE0;
    else if (k->value == "e2") e.kind = EngineKind::DynamicE2;
    else b.fail(k->line, "engine kind expects e0 or e2");
  }
  e.m0 = b.get_double("m0", e.m0);
  e.alpha = b.get_double("alpha", e.alpha);
  e.beta = b.get_double("beta", e.beta);
  e.gamma = b.get_double("gamma", e.gamma);
  e.vol_ref = b.get_double("vol_ref", e.vol_ref);
  e.vol_window = b.get_int("vol_window", e.vol_window);
  e.ttr_ref = b.get_double("ttr_ref", e.ttr_ref);
}

void read_ladder(const KvBlock& b, DepthLadder& l) {
  b.reject_unknown({"edges_bps", "quantities", "boundary_band", "boundary_ratio"});
  l = DepthLadder(b.get_doubles("edges_bps", l.edges_bps()),
                  b.get_doubles("quantities", l.quantities()),
                  b.get_double("boundary_band", l.boundary_band()),
                  b.get_double("boundary_ratio", l.boundary_ratio()));
}

void read_pool(const KvBlock& b, PoolConfig& p) {
  b.reject_unknown({"fraction", "initial"});
  p.fraction = b.get_double("fraction", p.fraction);
  p.initial = b.get_optional_double("initial");
}

AgentSpec read_agent(const KvBlock& b) {
  const std::string kind = b.require_string("kind");
  const std::string name = b.require_string("name");
  if (kind == "trader") {
    b.reject_unknown({"kind", "name", "side", "leverage", "collateral", "open_tick", "count",
                      "open_spacing"});
    TraderSpec s{name};
    s.side = parse_side(b, "side", s.side);
    s.leverage = b.get_double("leverage", s.leverage);
    s.collateral = b.get_double("collateral", s.collateral);
    s.open_tick = b.get_int("open_tick", s.open_tick);
    s.count = b.get_int("count", s.count);
    s.open_spacing = b.get_int("open_spacing", s.open_spacing);
    return s;
  }
  if (kind == "noise") {
    b.reject_unknown({"kind", "name", "size", "probability"});
    NoiseSpec s{name};
    s.size = b.get_double("size", s.size);
    s.probability = b.get_double("probability", s.probability);
    return s;
  }
  if (kind == "vol_injector") {
    b.reject_unknown({"kind", "name", "size", "start", "duration", "hold", "cross_capacity"});
    VolInjectorSpec s{name};
    s.size = b.get_double("size", s.size);
    s.start = b.get_int("start", s.start);
    s.duration = b.get_int("duration", s.duration);
    s.hold = b.get_int("hold", s.hold);
    s.cross_capacity = b.get_double("cross_capacity", s.cross_capacity);
    return s;
  }
  if (kind == "halt_pusher") {
    b.reject_unknown({"kind", "name", "side", "leverage", "collateral", "direction", "target_move",
                      "budget", "window"});
    HaltPusherSpec s{name};
    s.side = parse_side(b, "side", s.side);
    s.leverage = b.get_double("leverage", s.leverage);
    s.collateral = b.get_double("collateral", s.collateral);
    s.direction = b.get_double("direction", s.direction);
    s.target_move = b.get_double("target_move", s.target_move);
    s.budget = b.get_double("budget", s.budget);
    s.window = b.get_int("window", s.window);
    return s;
  }
  if (kind == "bad_debt_shifter") {
    b.reject_unknown({"kind", "name", "leverage", "size_multiple", "believed_yes", "open_tick"});
    BadDebtShifterSpec s{name};
    s.leverage = b.get_double("leverage", s.leverage);
    s.size_multiple = b.get_double("size_multiple", s.size_multiple);
    s.believed_yes = b.get_double("believed_yes", s.believed_yes);
    s.open_tick = b.get_int("open_tick", s.open_tick);
    return s;
  }
  if (kind == "spoofer") {
    b.reject_unknown({"kind", "name", "side", "offset_bps", "quantity", "place_tick", "dwell",
                      "reaction"});
    SpoofSpec s{name};
    s.order_side = parse_direction(b, "side", s.order_side);
    s.offset_bps = b.get_double("offset_bps", s.offset_bps);
    s.quantity = b.get_double("quantity", s.quantity);
    s.place_tick = b.get_int("place_tick", s.place_tick);
    s.dwell = b.get_int("dwell", s.dwell);
    s.reaction = b.get_double("reaction", s.reaction);
    return s;
  }
  b.fail(b.find("kind")->line, "unknown agent kind '" + kind + "'");
}

AttackSpec read_attack(const KvBlock& b) {
  const std::string kind = b.require_string("kind");
  if (kind == "preemption") {
    b.reject_unknown({"kind", "name", "injection_size", "start", "duration", "hold",
                      "cross_capacity"});
    PreemptionParams p;
    p.name = b.get_string("name", p.name);
    p.injection_size = b.get_double("injection_size", p.injection_size);
    p.start = b.get_int("start", p.start);
    p.duration = b.get_int("duration", p.duration);
    p.hold = b.get_int("hold", p.hold);
    p.cross_capacity = b.get_double("cross_capacity", p.cross_capacity);
    return p;
  }
  if (kind == "halt_arbitrage") {
    b.reject_unknown({"kind", "name", "side", "leverage", "collateral", "direction", "target_move",
                      "budget", "window"});
    HaltArbParams p;
    p.name = b.get_string("name", p.name);
    p.side = parse_side(b, "side", p.side);
    p.leverage = b.get_double("leverage", p.leverage);
    p.collateral = b.get_double("collateral", p.collateral);
    p.direction = b.get_double("direction", p.direction);
    p.target_move = b.get_double("target_move", p.target_move);
    p.budget = b.get_double("budget", p.budget);
    p.window = b.get_int("window", p.window);
    return p;
  }
  if (kind == "bad_debt_shift") {
    b.reject_unknown({"kind", "name", "leverage", "size_multiple", "believed_yes", "open_tick"});
    BadDebtParams p;
    p.name = b.get_string("name", p.name);
    p.leverage = b.get_double("leverage", p.leverage);
    p.size_multiple = b.get_double("size_multiple", p.size_multiple);
    p.believed_yes = b.get_double("believed_yes", p.believed_yes);
    p.open_tick = b.get_int("open_tick", p.open_tick);
    return p;
  }
  b.fail(b.find("kind")->line, "unknown attack kind '" + kind + "'");
}

}  // namespace

RunFile parse_run_config(std::string_view text, std::string source) {
  const KvDocument doc = parse_kv(text, source);
  for (const auto& b : doc.blocks) {
    static constexpr std::string_view known[] = {"run",   "market", "engine",
                                                 "ladder", "pool",  "agent", "attack"};
    if (std::find(std::begin(known), std::end(known), b.name()) == std::end(known)) {
      b.fail(b.line(), "unknown block [" + b.name() + "]");
    }
  }

  RunFile f;
  if (const KvBlock* b = doc.single("run")) {
    b->reject_unknown({"seed", "reps", "path_volatility", "record_events"});
    const int seed = b->get_int("seed", 1);
    if (seed < 0) b->fail(b->find("seed")->line, "seed must be >= 0");
    f.run.seed = static_cast<std::uint64_t>(seed);
    f.reps = b->get_int("reps", f.reps);
    if (f.reps < 1) b->fail(b->find("reps")->line, "reps must be >= 1");
    f.run.path_volatility = b->get_double("path_volatility", f.run.path_volatility);
    f.run.venue.record_events = b->get_bool("record_events", f.run.venue.record_events);
  }
  if (const KvBlock* b = doc.single("market")) read_market(*b, f.run.venue);
  if (const KvBlock* b = doc.single("engine")) read_engine(*b, f.run.venue.engine);
  if (const KvBlock* b = doc.single("ladder")) {
    try {
      read_ladder(*b, f.run.venue.ladder);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ParseError) throw;
      b->fail(b->line(), e.what());
    }
  }
  if (const KvBlock* b = doc.single("pool")) read_pool(*b, f.run.venue.pool);
  for (const KvBlock* b : doc.all("agent")) f.run.agents.push_back(read_agent(*b));
  if (const KvBlock* b = doc.single("attack")) f.attack = read_attack(*b);

  f.run.validate();
  return f;
}

RunFile load_run_config(const std::string& path) { return parse_run_config(read_text_file(path), path); }

}  // namespace evperp
