#pragma once

#include <string>
#include <string_view>

namespace crashdet {

/// Shortest-stable text form used in every file the toolkit writes:
/// printf "%.9g". Nine significant digits keep round-trip error far below
/// the numeric tolerances used on parsed data.
std::string format_number(double value);

/// "%.17g": exact round-trip, used for fitted model parameters.
std::string format_exact(double value);

/// Strict double parse of the whole token; returns false on junk or empty input.
/// Accepts "nan"/"inf" spellings; finiteness is checked by callers.
bool parse_double(std::string_view token, double& out);

std::string_view trim(std::string_view s) noexcept;

}  // namespace crashdet
