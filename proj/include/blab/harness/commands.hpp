#pragma once

// Command table for the blab CLI.

#include <functional>
#include <map>

#include "checks.hpp"
#include "counterexample.hpp"
#include "hinfty.hpp"
#include "llogl.hpp"
#include "necessity.hpp"

namespace blab {

using Command = std::function<ExperimentResult(const ExperimentConfig&)>;

inline const std::map<std::string, Command>& command_table() {
  static const std::map<std::string, Command> table = {
      {"counterexample", cmd_counterexample},
      {"llogl-verify", cmd_llogl_verify},
      {"hinfty", cmd_hinfty},
      {"necessity", cmd_necessity},
      {"weaktype-mod", cmd_weaktype_mod},
      {"exp-osc", cmd_exp_osc},
      {"geometry-check", cmd_geometry_check},
  };
  return table;
}

// Runs a command by name. The optional `experiment` key must agree with the name.
inline ExperimentResult run_command(const std::string& name, const ExperimentConfig& cfg) {
  const auto& table = command_table();
  const auto it = table.find(name);
  if (it == table.end()) throw ConfigError("unknown command '" + name + "'");
  if (cfg.has("experiment") && cfg.text("experiment", "") != name)
    throw ConfigError("config is for '" + cfg.text("experiment", "") + "', not '" + name + "'");
  return it->second(cfg);
}

}  // namespace blab
