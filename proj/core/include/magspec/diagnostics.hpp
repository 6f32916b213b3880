#pragma once

#include <functional>
#include <string>

namespace magspec {

/// Warnings are routed through a replaceable sink (stderr by default).
using WarningSink = std::function<void(const std::string&)>;

void set_warning_sink(WarningSink sink);
void warn(const std::string& message);

/// Number of warnings emitted since start (used by tests).
long warning_count();

} // namespace magspec
