#pragma once

#include <functional>
#include <string>

namespace lrbms {

using WarningHandler = std::function<void(const std::string&)>;

/// Reports a non-fatal condition. The default handler prints to stderr.
void warn(const std::string& message);

/// Installs a handler and returns the previous one. An empty handler restores
/// the default.
WarningHandler set_warning_handler(WarningHandler handler);

}  // namespace lrbms
