#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "lrbms/scheme.hpp"

namespace lrbms::app {

enum ExitCode { kOk = 0, kConfigFailure = 2, kNumericalFailure = 3, kIoFailure = 4 };

nlohmann::json offline_report_json(const OfflineResult& result);
nlohmann::json run_summary_json(const Trajectory& run);
nlohmann::json metrics_summary_json(const RunMetrics& m);

/// Parses the command line and runs one subcommand; library errors become exit
/// codes (configuration 2, numerical 3, IO 4) with the message on stderr.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);

}  // namespace lrbms::app
