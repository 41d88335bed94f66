#pragma once

#include "hypoflow/config.hpp"

#include <iosfwd>
#include <optional>

namespace hypoflow {

struct RunFlags {
  std::string out_path;
  std::optional<double> kappa;
  std::optional<double> tmax;
  std::optional<double> dt;
  std::string which = "b";      // shorttime scan selector
  std::string dump_operators;   // assemble: dense text dump prefix
};

// Exit codes: 0 success, 1 verification failure (an envelope was violated),
// 2 usage error. Subcommands write their CSV plus `<out>.manifest`.
int run_subcommand(const std::string& subcommand, const Config& cfg, const RunFlags& flags,
                   std::ostream& log);

}  // namespace hypoflow
