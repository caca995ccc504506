#pragma once

#include <string>

#include "nsfd/config.hpp"

namespace nsfd {

/// executes one command per the config and writes artifacts under
/// cfg.out_dir; returns the process exit code: 0 success, 2 bad config,
/// 3 solve failure, 4 verification failure
int run_app(const RunConfig& cfg);

/// write-to-temp-then-rename; creates missing parent directories
void atomic_write(const std::string& path, const std::string& content);

} // namespace nsfd
