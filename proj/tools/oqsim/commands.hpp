// commands.hpp — Subcommand entry points for the batch experiment runner.

#pragma once

#include <string>

#include "config.hpp"

namespace oqsim {

inline constexpr const char* kVersion = "0.1.0";

struct RunContext {
    Config config;
    std::string out_dir;
};

int cmd_relax(const RunContext& ctx);
int cmd_rate_scan(const RunContext& ctx);
int cmd_dephase(const RunContext& ctx);
int cmd_resources(const RunContext& ctx);
int cmd_verify();

} // namespace oqsim
