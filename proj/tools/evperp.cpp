#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "evperp/adversaries.hpp"
#include "evperp/costbenefit.hpp"
#include "evperp/kv_config.hpp"
#include "evperp/matrix.hpp"
#include "evperp/rents.hpp"
#include "evperp/report_json.hpp"
#include "evperp/rng.hpp"
#include "evperp/run_config.hpp"
#include "evperp/scenario_io.hpp"

namespace fs = std::filesystem;
using namespace evperp;

namespace {

enum ExitCode { kOk = 0, kInputError = 1, kInvariantViolation = 2 };

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Collects outputs; with --out they become files under that directory plus manifest.json,
// otherwise the primary output goes to stdout and the manifest to stderr.
class Emitter {
public:
  Emitter(std::string command, std::string input, std::string out_dir)
      : command_(std::move(command)), input_(std::move(input)), out_dir_(std::move(out_dir)) {
    if (!out_dir_.empty()) fs::create_directories(out_dir_);
  }

  void seeds(std::vector<std::uint64_t> s) { seeds_ = std::move(s); }

  void emit(const std::string& name, const std::string& content, bool primary = true) {
    outputs_.push_back({name, fnv1a64(content)});
    if (out_dir_.empty()) {
      if (primary) std::cout << content;
      return;
    }
    std::ofstream f(fs::path(out_dir_) / name, std::ios::binary);
    if (!f) throw Error(ErrorCode::InvalidConfig, "cannot write " + name);
    f << content;
  }

  void finish() {
    Json m;
    m["command"] = command_;
    m["config"] = input_;
    m["seeds"] = seeds_;
    m["version"] = EVPERP_VERSION;
    m["schema"] = kSchemaVersion;
    Json outs = Json::array();
    std::string combined;
    for (const auto& o : outputs_) {
      outs.push_back({{"path", out_dir_.empty() ? "-" : (fs::path(out_dir_) / o.name).string()},
                      {"name", o.name},
                      {"fnv1a64", hex64(o.hash)}});
      combined += o.name + ":" + hex64(o.hash) + "\n";
    }
    m["outputs"] = std::move(outs);
    m["content_hash"] = hex64(fnv1a64(combined));
    if (out_dir_.empty()) {
      std::cerr << "manifest " << m.dump() << '\n';
    } else {
      std::ofstream(fs::path(out_dir_) / "manifest.json", std::ios::binary) << m.dump(2) << '\n';
    }
  }

private:
  struct Output {
    std::string name;
    std::uint64_t hash;
  };
  std::string command_;
  std::string input_;
  std::string out_dir_;
  std::vector<std::uint64_t> seeds_;
  std::vector<Output> outputs_;
};

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> reps;
  std::string engine;
  std::optional<int> halt_ticks;
};

void add_run_overrides(CLI::App* cmd, RunOverrides& o) {
  cmd->add_option("--seed", o.seed, "Base seed (default: [run] seed)");
  cmd->add_option("--engine", o.engine, "Margin engine override")->check(CLI::IsMember({"e0", "e2"}));
  cmd->add_option("--halt-ticks", o.halt_ticks, "Halt offset override in ticks (0 disables)")
      ->check(CLI::NonNegativeNumber);
}

void apply(const RunOverrides& o, RunFile& f) {
  if (o.seed) f.run.seed = *o.seed;
  if (o.reps) f.reps = *o.reps;
  if (o.engine == "e0") f.run.venue.engine.kind = EngineKind::StaticE0;
  if (o.engine == "e2") f.run.venue.engine.kind = EngineKind::DynamicE2;
  if (o.halt_ticks) f.run.venue.spec.halt_offset = *o.halt_ticks;
  f.run.validate();
}

int cmd_threshold(const std::string& path, const std::string& format, const std::string& out) {
  const auto entries = parse_scenarios(read_text_file(path), path);
  const auto rows = evaluate_thresholds(entries);
  Emitter e("threshold", path, out);
  if (format == "json") {
    Json j = Json::array();
    for (const auto& r : rows) j.push_back(to_json(r));
    e.emit("thresholds.json", j.dump(2) + "\n");
  } else if (format == "csv") {
    e.emit("thresholds.csv", threshold_csv(rows));
  } else {
    e.emit("thresholds.txt", threshold_table(rows));
  }
  e.finish();
  const bool any_error = std::any_of(rows.begin(), rows.end(), [](const auto& r) { return !r.result; });
  for (const auto& r : rows) {
    if (!r.result) std::cerr << "evperp: " << r.label << ": " << r.error << '\n';
  }
  return any_error ? kInputError : kOk;
}

int cmd_sweep(const std::string& path, const std::string& label, const std::string& format,
              const std::string& out) {
  const auto entries = parse_scenarios(read_text_file(path), path);
  std::vector<SensitivityGrid> grids;
  for (const auto& entry : entries) {
    if (!label.empty() && entry.raw.label != label) continue;
    grids.push_back(sweep_thresholds(validate_scenario(entry.raw), entry.axes));
  }
  if (grids.empty()) throw Error(ErrorCode::EmptyInput, "no scenario labelled '" + label + "'");
  Emitter e("sweep", path, out);
  if (format == "json") {
    Json j = Json::array();
    for (const auto& g : grids) {
      Json pts = Json::array();
      for (const auto& p : g.points) {
        pts.push_back({{"k_manip", p.k_manip},
                       {"p_detected", p.p_detected},
                       {"penalty_factor", p.penalty_factor},
                       {"capital", p.capital},
                       {"pi_yes", p.pi_yes},
                       {"l_star", p.threshold.l_star},
                       {"regime", to_string(p.threshold.regime)}});
      }
      j.push_back({{"label", g.label},
                   {"min_l_star", g.min_l_star()},
                   {"max_l_star", g.max_l_star()},
                   {"points", std::move(pts)}});
    }
    e.emit("sweep.json", j.dump(2) + "\n");
  } else {
    e.emit("sweep.csv", grid_csv(grids));
  }
  e.finish();
  return kOk;
}

int cmd_simulate(const std::string& path, const RunOverrides& o, int jobs, bool events,
                 const std::string& out) {
  RunFile f = load_run_config(path);
  apply(o, f);
  f.run.venue.record_events = events;
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(f.reps));
  std::iota(seeds.begin(), seeds.end(), f.run.seed);
  const auto runs = run_seeds(f.run, seeds, jobs);

  Emitter e("simulate", path, out);
  e.seeds(seeds);
  Json all = Json::array();
  for (const auto& r : runs) all.push_back(to_json(r, events));
  Json summary = run_summary(runs);
  if (out.empty()) {
    e.emit("summary.json", summary.dump(2) + "\n");
  } else {
    e.emit("runs.json", all.dump(2) + "\n");
    e.emit("summary.json", summary.dump(2) + "\n");
    if (events) {
      for (const auto& r : runs) e.emit("events_" + std::to_string(r.seed) + ".csv", events_csv(r));
    }
    std::cout << summary.dump(2) << '\n';
  }
  e.finish();
  return kOk;
}

int cmd_attack(const std::string& path, const RunOverrides& o, const std::string& out) {
  RunFile f = load_run_config(path);
  apply(o, f);
  if (!f.attack) throw Error(ErrorCode::InvalidConfig, path + ": no [attack] block");
  const AttackRun run = run_attack(f.run, *f.attack);

  Emitter e("attack", path, out);
  e.seeds({f.run.seed});
  Json j;
  j["report"] = to_json(run.report);
  j["attack_run"] = to_json(run.attack_run);
  j["counterfactual"] = to_json(run.counterfactual);
  if (out.empty()) {
    e.emit("attack.json", to_json(run.report).dump(2) + "\n");
  } else {
    e.emit("attack.json", j.dump(2) + "\n");
    std::cout << to_json(run.report).dump(2) << '\n';
  }
  e.finish();
  return kOk;
}

int cmd_matrix(const std::string& format, const std::string& out) {
  const auto& m = ChannelControlMatrix::embedded();
  Emitter e("matrix", "<embedded>", out);
  if (format == "csv") {
    e.emit("channel_control_matrix.csv", m.to_csv());
  } else {
    e.emit("channel_control_matrix.json", std::string(embedded_matrix_json()));
  }
  e.finish();
  return kOk;
}

struct RentArgs {
  double rent = 0.05;
  double sigma = 0.2;
  double detection = 0.0;
  double capital = 1e4;
  double leverage = 1.0;
  double funding = 0.0;
};

int cmd_rents(const RentArgs& a) {
  const RentProfile p = make_rent_profile(a.rent, a.sigma, a.detection, a.capital, a.leverage);
  Json j;
  j["leveraged_rent"] = leveraged_rent(p);
  j["sharpe_ratio"] = sharpe_ratio(p, a.funding);
  if (leveraged_rent(p) > 0.0) {
    j["detection_cost_per_profit"] = detection_cost_per_profit(p);
  } else {
    j["detection_cost_per_profit"] = nullptr;
  }
  std::cout << j.dump(2) << '\n';
  return kOk;
}

int cmd_compress(const std::string& path, const std::string& trader, const RunOverrides& o,
                 const std::string& out) {
  RunFile f = load_run_config(path);
  apply(o, f);
  RunConfig dyn = f.run;
  RunConfig stat = f.run;
  dyn.venue.engine.kind = EngineKind::DynamicE2;
  stat.venue.engine.kind = EngineKind::StaticE0;
  const CompressionReport r = rent_compression_check(run_market(dyn), run_market(stat), trader);
  Emitter e("compress", path, out);
  e.seeds({f.run.seed});
  e.emit("compression.json", to_json(r).dump(2) + "\n");
  e.finish();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Event-linked perpetual manipulation toolkit"};
  app.set_version_flag("--version", std::string(EVPERP_VERSION));
  app.require_subcommand(1);

  std::string input;
  std::string out;
  std::string format = "table";
  std::string label;
  int jobs = 1;
  bool events = false;
  RunOverrides overrides;
  int reps = 0;
  std::string trader;
  RentArgs rent;

  auto* threshold = app.add_subcommand("threshold", "Leverage threshold per scenario");
  threshold->add_option("scenarios", input, "Scenario file")->required()->check(CLI::ExistingFile);
  threshold->add_option("--format", format, "table, csv or json")
      ->check(CLI::IsMember({"table", "csv", "json"}));
  threshold->add_option("--out", out, "Output directory");

  auto* sweep = app.add_subcommand("sweep", "Sensitivity grid of the leverage threshold");
  sweep->add_option("scenarios", input, "Scenario file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--label", label, "Only this scenario");
  sweep->add_option("--format", format, "csv or json")->check(CLI::IsMember({"table", "csv", "json"}));
  sweep->add_option("--out", out, "Output directory");

  auto* simulate = app.add_subcommand("simulate", "Seeded venue runs");
  simulate->add_option("config", input, "Run config")->required()->check(CLI::ExistingFile);
  add_run_overrides(simulate, overrides);
  simulate->add_option("--reps", reps, "Runs, seeds base..base+reps-1 (default: [run] reps)")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  simulate->add_flag("--events", events, "Record the per-tick event log");
  simulate->add_option("--out", out, "Output directory");

  auto* attack = app.add_subcommand("attack", "Attack run against a same-seed counterfactual");
  attack->add_option("config", input, "Run config with an [attack] block")
      ->required()
      ->check(CLI::ExistingFile);
  add_run_overrides(attack, overrides);
  attack->add_option("--out", out, "Output directory");

  auto* matrix = app.add_subcommand("matrix", "Export the channel-control matrix");
  matrix->add_option("--format", format, "json or csv")->check(CLI::IsMember({"table", "csv", "json"}));
  matrix->add_option("--out", out, "Output directory");

  auto* rents = app.add_subcommand("rents", "Leveraged informed-trading rent metrics");
  rents->add_option("--rent", rent.rent, "Unleveraged rent per event per unit capital");
  rents->add_option("--sigma", rent.sigma, "Unleveraged return volatility per event");
  rents->add_option("--detection-cost", rent.detection, "Fixed detection cost (USD)");
  rents->add_option("--capital", rent.capital, "Capital (USD)");
  rents->add_option("--leverage", rent.leverage, "Leverage");
  rents->add_option("--funding", rent.funding, "Funding cost per event");

  auto* compress = app.add_subcommand("compress", "Dynamic vs static engine for one trader");
  compress->add_option("config", input, "Run config")->required()->check(CLI::ExistingFile);
  compress->add_option("--trader", trader, "Agent name")->required();
  add_run_overrides(compress, overrides);
  compress->add_option("--out", out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInputError;
  }
  if (reps > 0) overrides.reps = reps;

  try {
    if (*threshold) return cmd_threshold(input, format, out);
    if (*sweep) return cmd_sweep(input, label, format == "table" ? "csv" : format, out);
    if (*simulate) return cmd_simulate(input, overrides, jobs, events, out);
    if (*attack) return cmd_attack(input, overrides, out);
    if (*matrix) return cmd_matrix(format == "table" ? "json" : format, out);
    if (*rents) return cmd_rents(rent);
    if (*compress) return cmd_compress(input, trader, overrides, out);
  } catch (const Error& e) {
    std::cerr << "evperp: " << e.what() << '\n';
    return e.code() == ErrorCode::InvariantViolation ? kInvariantViolation : kInputError;
  } catch (const std::exception& e) {
    std::cerr << "evperp: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}
