#include "crashdet/errors.hpp"

#include "crashdet/format.hpp"

namespace crashdet {

NonFiniteSampleError::NonFiniteSampleError(std::string channel, double t)
    : DataError("non-finite value in channel '" + channel + "' at t=" + format_number(t)),
      channel_(std::move(channel)),
      t_(t) {}

namespace {

std::string parse_message(const std::string& what, std::size_t line, const std::string& column) {
  std::string msg = "line " + std::to_string(line);
  if (!column.empty()) msg += ", column '" + column + "'";
  return msg + ": " + what;
}

}  // namespace

ParseError::ParseError(const std::string& what, std::size_t line, std::string column)
    : DataError(parse_message(what, line, column)), line_(line), column_(std::move(column)) {}

CalibrationError::CalibrationError(double normal_max, double crash_min)
    : DataError("calibration infeasible: nominal envelope max " + format_number(normal_max) +
                " is not below crash envelope min " + format_number(crash_min)),
      normal_max_(normal_max),
      crash_min_(crash_min) {}

}  // namespace crashdet
