#pragma once

#include <string_view>

namespace t2veval {

inline constexpr std::string_view kHarnessVersion = "1.0.0";
inline constexpr std::string_view kSuiteFormat = "t2veval.suite";
inline constexpr std::string_view kSuiteSchemaVersion = "1";

}  // namespace t2veval
