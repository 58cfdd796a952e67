#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace confine {

/// Milliseconds since the UNIX epoch (UTC).
using Timestamp = std::int64_t;

/// Parses the ISO-8601 forms found in event logs:
///   2022-07-14T10:36
///   2022-07-14T10:36:00
///   2022-07-14T10:36:00.123
///   2022-07-14 10:36:00.123+02:00 / ...Z
/// A bare integer is taken as milliseconds since epoch.
/// Throws Error{kUnparsableTimestamp}.
Timestamp parse_timestamp(std::string_view text);

/// Canonical rendering: YYYY-MM-DDTHH:MM:SS.mmmZ. Round-trips through
/// parse_timestamp exactly.
std::string format_timestamp(Timestamp ts);

}  // namespace confine
