// UTC timestamps as Unix epoch seconds, plus strict ISO 8601 parse/format.
#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace stormrisk {

using UnixTime = std::int64_t;  // seconds since 1970-01-01T00:00:00Z

// Accepts "YYYY-MM-DDTHH:MM:SS" with optional trailing "Z". A space instead
// of 'T' is tolerated. Throws InputError(malformed_row) on anything else.
UnixTime parse_iso8601(std::string_view text);

// Always renders "YYYY-MM-DDTHH:MM:SSZ".
std::string format_iso8601(UnixTime t);

}  // namespace stormrisk
