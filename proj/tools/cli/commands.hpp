#pragma once

#include <filesystem>

#include "config.hpp"
#include "output.hpp"

namespace hconv::cli {

using Dir = std::filesystem::path;

CommandResult cmd_verify_transforms(const RunConfig& c, const Dir& out);
CommandResult cmd_spectral_bounds(const RunConfig& c, const Dir& out);
CommandResult cmd_scaling(const RunConfig& c, const Dir& out);
CommandResult cmd_scan(const RunConfig& c, const Dir& out);
CommandResult cmd_kernel_decay(const RunConfig& c, const Dir& out);
CommandResult cmd_plancherel(const RunConfig& c, const Dir& out);
CommandResult cmd_group_selftest(const RunConfig& c, const Dir& out);

}  // namespace hconv::cli
