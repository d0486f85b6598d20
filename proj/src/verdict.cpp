#include "crashdet/verdict.hpp"

#include <string>

#include "crashdet/errors.hpp"

namespace crashdet {

std::string_view to_string(DetectorId id) noexcept {
  switch (id) {
    case DetectorId::threshold:
      return "threshold";
    case DetectorId::mahalanobis:
      return "mahalanobis";
    case DetectorId::cepstral:
      return "cepstral";
  }
  return "unknown";
}

DetectorId parse_detector_id(std::string_view name) {
  if (name == "threshold") return DetectorId::threshold;
  if (name == "mahalanobis") return DetectorId::mahalanobis;
  if (name == "cepstral") return DetectorId::cepstral;
  throw ConfigError("unknown detector '" + std::string(name) + "'");
}

}  // namespace crashdet
