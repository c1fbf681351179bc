#pragma once

// Subcommand implementations behind the hoferlab executable.
//
// Exit codes: 0 every asserted check passed, 1 a check failed, 2 the config
// or an input file is invalid, 3 a file could not be read or written.

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <stdexcept>
#include <string>

namespace hoferlab::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfigInvalid = 2;
inline constexpr int kExitIO = 3;

class IOFailure : public std::runtime_error
{
public:
	using std::runtime_error::runtime_error;
};

/// Reads --config (if present) and lays `options` over it.
nlohmann::json merge_config(const nlohmann::json& options);

/// Validates `config` against the command's schema, runs it and maps errors
/// to exit codes. Reports go to `out`, diagnostics to `err`.
int run(const std::string& command, const nlohmann::json& config, std::ostream& out, std::ostream& err);

} // namespace hoferlab::cli
