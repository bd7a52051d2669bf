#include "evperp/matrix.hpp"

#include <algorithm>
#include <array>
#include <sstream>

#include <json.hpp>

namespace evperp {

namespace detail {
extern const std::string_view kMatrixJson;
}

namespace {

constexpr std::array<std::string_view, 5> kEffectNames = {
    "Multiplicative", "ThresholdShifting", "Negligible", "FrameworkIntroduced",
    "MultiplicativePlusAmortized"};

constexpr std::size_t kMatrixRows = 10;

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string required_string(const nlohmann::json& row, const char* key, std::size_t index) {
  if (!row.contains(key) || !row[key].is_string()) {
    throw Error(ErrorCode::ParseError,
                "matrix row " + std::to_string(index) + ": missing string field '" + key + "'");
  }
  return row[key].get<std::string>();
}

}  // namespace

std::string_view to_string(LeverageEffect e) { return kEffectNames[static_cast<std::size_t>(e)]; }

std::optional<LeverageEffect> parse_leverage_effect(std::string_view name) {
  for (std::size_t i = 0; i < kEffectNames.size(); ++i) {
    if (kEffectNames[i] == name) return static_cast<LeverageEffect>(i);
  }
  return std::nullopt;
}

ManipulationChannel row_channel(ManipulationChannel c) {
  switch (c) {
    case ManipulationChannel::OutcomeSubNationalPolitical:
    case ManipulationChannel::InformationReleaseTiming:
      return ManipulationChannel::OutcomeSports;
    case ManipulationChannel::OutcomeMacro:
      return ManipulationChannel::OutcomeLargeElectorate;
    default:
      return c;
  }
}

ChannelControlMatrix ChannelControlMatrix::parse(std::string_view json) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string("matrix dataset: ") + e.what());
  }
  if (!doc.contains("rows") || !doc["rows"].is_array()) {
    throw Error(ErrorCode::ParseError, "matrix dataset: missing 'rows' array");
  }

  ChannelControlMatrix m;
  for (std::size_t i = 0; i < doc["rows"].size(); ++i) {
    const auto& row = doc["rows"][i];
    ChannelControlRow r;
    const auto channel = parse_channel(required_string(row, "channel", i));
    if (!channel || row_channel(*channel) != *channel) {
      throw Error(ErrorCode::ParseError, "matrix row " + std::to_string(i) + ": bad channel");
    }
    const auto effect = parse_leverage_effect(required_string(row, "leverage_effect", i));
    if (!effect) {
      throw Error(ErrorCode::ParseError, "matrix row " + std::to_string(i) + ": bad leverage_effect");
    }
    r.channel = *channel;
    r.leverage_effect = *effect;
    r.label = required_string(row, "label", i);
    r.detection_source = required_string(row, "detection_source", i);
    r.engine_control = required_string(row, "engine_control", i);
    r.regulatory_control = required_string(row, "regulatory_control", i);
    r.anchor = required_string(row, "anchor", i);
    const bool duplicate = std::any_of(m.rows_.begin(), m.rows_.end(),
                                       [&](const auto& x) { return x.channel == r.channel; });
    if (duplicate) {
      throw Error(ErrorCode::ParseError, "matrix row " + std::to_string(i) + ": duplicate channel");
    }
    m.rows_.push_back(std::move(r));
  }
  if (m.rows_.size() != kMatrixRows) {
    throw Error(ErrorCode::ParseError, "matrix dataset must have exactly 10 rows, found " +
                                           std::to_string(m.rows_.size()));
  }
  return m;
}

const ChannelControlMatrix& ChannelControlMatrix::embedded() {
  static const ChannelControlMatrix m = parse(detail::kMatrixJson);
  return m;
}

const ChannelControlRow& ChannelControlMatrix::lookup(ManipulationChannel c) const {
  const ManipulationChannel target = row_channel(c);
  for (const auto& r : rows_) {
    if (r.channel == target) return r;
  }
  throw Error(ErrorCode::InvalidConfig, "no matrix row for " + std::string(to_string(c)));
}

std::vector<ManipulationChannel> ChannelControlMatrix::channels_by_effect(LeverageEffect effect) const {
  std::vector<ManipulationChannel> out;
  for (const auto& r : rows_) {
    if (r.leverage_effect == effect) out.push_back(r.channel);
  }
  return out;
}

std::string ChannelControlMatrix::to_csv() const {
  std::ostringstream os;
  os << "channel,label,leverage_effect,detection_source,engine_control,regulatory_control,anchor\n";
  for (const auto& r : rows_) {
    os << to_string(r.channel) << ',' << csv_field(r.label) << ',' << to_string(r.leverage_effect)
       << ',' << csv_field(r.detection_source) << ',' << csv_field(r.engine_control) << ','
       << csv_field(r.regulatory_control) << ',' << csv_field(r.anchor) << '\n';
  }
  return os.str();
}

std::string_view embedded_matrix_json() { return detail::kMatrixJson; }

}  // namespace evperp
