#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace ppmaudit {

// UTC instant with millisecond precision.
using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

// Parses ISO-8601 / xs:dateTime text such as "2010-01-13T08:40:25.123+01:00".
// Accepts 'T' or ' ' as the date/time separator, an optional fraction of any
// length (truncated to milliseconds), and "Z", "+HH:MM", "+HHMM" or no offset
// (read as UTC). A bare date "YYYY-MM-DD" is midnight UTC.
std::optional<Timestamp> parse_iso8601(std::string_view text);

// strptime-style format, interpreted as UTC. A ".fff" fraction directly after
// the consumed text is accepted. Returns nullopt if the text does not match or
// has trailing characters.
std::optional<Timestamp> parse_timestamp(std::string_view text, std::string_view format);

// "2022-05-01T00:00:00.000+00:00"; parse_iso8601 inverts it exactly.
std::string format_iso8601(Timestamp ts);

// Midnight UTC on the first day of the given month.
Timestamp month_start(int year, unsigned month);

}  // namespace ppmaudit
