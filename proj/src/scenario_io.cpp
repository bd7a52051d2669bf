#include "evperp/scenario_io.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "evperp/kv_config.hpp"

namespace evperp {

namespace {

std::optional<ReferenceBand> read_band(const KvBlock& b, std::string_view low_key,
                                       std::string_view high_key) {
  const auto low = b.get_optional_double(low_key);
  const auto high = b.get_optional_double(high_key);
  if (!low && !high) return std::nullopt;
  return ReferenceBand{low.value_or(0.0), high};
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

std::vector<ScenarioEntry> parse_scenarios(std::string_view text, std::string source) {
  const KvDocument doc = parse_kv(text, source);
  std::vector<ScenarioEntry> out;
  for (const auto& b : doc.blocks) {
    if (b.name() != "scenario") b.fail(b.line(), "unexpected block [" + b.name() + "]");
    b.reject_unknown({"label", "k_manip", "capital", "pi_yes", "p_detected", "penalty_factor",
                      "leverage", "sweep_k_manip", "sweep_p_detected", "sweep_penalty_factor",
                      "sweep_capital", "sweep_pi_yes", "base_low", "base_high", "grid_low",
                      "grid_high", "regime"});
    ScenarioEntry e;
    e.line = b.line();
    e.raw.label = b.require_string("label");
    for (const char* key : {"k_manip", "capital", "pi_yes", "p_detected", "penalty_factor"}) {
      if (!b.has(key)) b.fail(b.line(), "scenario '" + e.raw.label + "' requires '" + key + "'");
    }
    e.raw.k_manip = b.get_double("k_manip", 0.0);
    e.raw.capital = b.get_double("capital", 0.0);
    e.raw.pi_yes = b.get_double("pi_yes", 0.0);
    e.raw.p_detected = b.get_double("p_detected", 0.0);
    e.raw.penalty_factor = b.get_double("penalty_factor", 0.0);
    e.raw.leverage = b.get_optional_double("leverage");
    e.axes.k_manip = b.get_doubles("sweep_k_manip", {});
    e.axes.p_detected = b.get_doubles("sweep_p_detected", {});
    e.axes.penalty_factor = b.get_doubles("sweep_penalty_factor", {});
    e.axes.capital = b.get_doubles("sweep_capital", {});
    e.axes.pi_yes = b.get_doubles("sweep_pi_yes", {});
    e.base_band = read_band(b, "base_low", "base_high");
    e.grid_band = read_band(b, "grid_low", "grid_high");
    e.regime_label = b.get_string("regime", "");
    out.push_back(std::move(e));
  }
  if (out.empty()) throw Error(ErrorCode::EmptyInput, source + ": no [scenario] blocks");
  return out;
}

std::vector<ThresholdRow> evaluate_thresholds(const std::vector<ScenarioEntry>& entries) {
  std::vector<ThresholdRow> rows;
  for (const auto& e : entries) {
    ThresholdRow row;
    row.label = e.raw.label;
    try {
      row.result = leverage_threshold(validate_scenario(e.raw));
    } catch (const Error& err) {
      row.error = "line " + std::to_string(e.line) + ": " + err.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string threshold_csv(const std::vector<ThresholdRow>& rows) {
  std::ostringstream os;
  os << "label,l_star,raw_l_star,cost_term,detection_term,regime,always_profitable,error\n";
  for (const auto& r : rows) {
    os << r.label << ',';
    if (r.result) {
      const auto& t = *r.result;
      os << format_number(t.l_star) << ',' << format_number(t.raw_l_star) << ','
         << format_number(t.cost_term) << ',' << format_number(t.detection_term) << ','
         << to_string(t.regime) << ',' << (t.always_profitable ? "true" : "false") << ",\n";
    } else {
      os << ",,,,,,\"" << r.error << "\"\n";
    }
  }
  return os.str();
}

std::string threshold_table(const std::vector<ThresholdRow>& rows) {
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-10s %14s %14s %14s  %s\n", "label", "l_star", "cost_term",
                "detect_term", "regime");
  os << buf;
  for (const auto& r : rows) {
    if (!r.result) {
      os << r.label << "  error: " << r.error << '\n';
      continue;
    }
    const auto& t = *r.result;
    std::snprintf(buf, sizeof(buf), "%-10s %14.6g %14.6g %14.6g  %s%s\n", r.label.c_str(), t.l_star,
                  t.cost_term, t.detection_term, std::string(to_string(t.regime)).c_str(),
                  t.always_profitable ? " (always profitable)" : "");
    os << buf;
  }
  return os.str();
}

std::string grid_csv(const std::vector<SensitivityGrid>& grids) {
  std::ostringstream os;
  os << kGridCsvHeader << '\n';
  for (const auto& g : grids) {
    for (const auto& p : g.points) {
      os << g.label << ',' << format_number(p.k_manip) << ',' << format_number(p.p_detected) << ','
         << format_number(p.penalty_factor) << ',' << format_number(p.capital) << ','
         << format_number(p.pi_yes) << ',' << format_number(p.threshold.l_star) << ','
         << format_number(p.threshold.raw_l_star) << ',' << format_number(p.threshold.cost_term)
         << ',' << format_number(p.threshold.detection_term) << ','
         << to_string(p.threshold.regime) << ','
         << (p.threshold.always_profitable ? "true" : "false") << '\n';
    }
  }
  return os.str();
}

}  // namespace evperp
