#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "evperp/adversaries.hpp"
#include "evperp/run.hpp"

namespace evperp {

struct RunFile {
  RunConfig run;
  int reps = 1;
  std::optional<AttackSpec> attack;
};

// Blocks: [run] [market] [engine] [ladder] [pool], any number of [agent], at most one [attack].
// Every key is optional; unknown keys are errors carrying their line number.
RunFile parse_run_config(std::string_view text, std::string source = "<input>");
RunFile load_run_config(const std::string& path);

}  // namespace evperp
