#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace wpc::cli {

inline constexpr std::string_view kVersion = "wpc 1.0.0";

/// Exit statuses of run().
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNumerical = 2;

/// Runs one subcommand (eval, sweep, mc, opt-rate, opt-tau, eh-curve, fit).
/// `args` excludes the program name. CSV goes to --out or `out`;
/// diagnostics go to `err` as a single line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace wpc::cli
