#include "lrbms/log.hpp"

#include <iostream>
#include <mutex>

namespace lrbms {

namespace {

std::mutex& handler_mutex() {
    static std::mutex m;
    return m;
}

WarningHandler& current_handler() {
    static WarningHandler h;
    return h;
}

}  // namespace

void warn(const std::string& message) {
    std::lock_guard<std::mutex> lock(handler_mutex());
    if (current_handler()) {
        current_handler()(message);
    } else {
        std::cerr << "warning: " << message << '\n';
    }
}

WarningHandler set_warning_handler(WarningHandler handler) {
    std::lock_guard<std::mutex> lock(handler_mutex());
    WarningHandler previous = std::move(current_handler());
    current_handler() = std::move(handler);
    return previous;
}

}  // namespace lrbms
