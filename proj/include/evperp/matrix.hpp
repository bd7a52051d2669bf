#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evperp/core_types.hpp"

namespace evperp {

enum class LeverageEffect {
  Multiplicative,
  ThresholdShifting,
  Negligible,
  FrameworkIntroduced,
  MultiplicativePlusAmortized,
};

inline constexpr LeverageEffect kAllLeverageEffects[] = {
    LeverageEffect::Multiplicative, LeverageEffect::ThresholdShifting, LeverageEffect::Negligible,
    LeverageEffect::FrameworkIntroduced, LeverageEffect::MultiplicativePlusAmortized};

std::string_view to_string(LeverageEffect e);
std::optional<LeverageEffect> parse_leverage_effect(std::string_view name);

struct ChannelControlRow {
  ManipulationChannel channel = ManipulationChannel::TradeBased;
  std::string label;
  LeverageEffect leverage_effect = LeverageEffect::Multiplicative;
  std::string detection_source;
  std::string engine_control;
  std::string regulatory_control;
  std::string anchor;

  friend bool operator==(const ChannelControlRow&, const ChannelControlRow&) = default;
};

/// Row channel that a channel kind is reported under. Three kinds share a row with a
/// broader one: sub-national political outcomes and information-release timing sit with
/// the sports row, macro outcomes with the large-electorate row.
ManipulationChannel row_channel(ManipulationChannel c);

class ChannelControlMatrix {
public:
  /// Parses and validates the JSON dataset: ten rows, one per row channel.
  static ChannelControlMatrix parse(std::string_view json);
  /// The dataset compiled into the library.
  static const ChannelControlMatrix& embedded();

  const std::vector<ChannelControlRow>& rows() const noexcept { return rows_; }
  const ChannelControlRow& lookup(ManipulationChannel c) const;
  /// Row channels carrying `effect`, in dataset order.
  std::vector<ManipulationChannel> channels_by_effect(LeverageEffect effect) const;

  std::string to_csv() const;

private:
  std::vector<ChannelControlRow> rows_;
};

/// Raw text of the embedded dataset, byte-for-byte as shipped in data/.
std::string_view embedded_matrix_json();

}  // namespace evperp
