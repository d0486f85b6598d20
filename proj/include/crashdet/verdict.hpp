#pragma once

#include <string_view>

namespace crashdet {

enum class DetectorId { threshold, mahalanobis, cepstral };

std::string_view to_string(DetectorId id) noexcept;
/// Throws ConfigError for unknown names.
DetectorId parse_detector_id(std::string_view name);

/// Per-sample detector output. `score` is d_cep, d_Mah, or the acceleration
/// norm for the threshold detector, whose angular-rate norm goes in `aux`.
/// `ready` is false during the cepstral warm-up, when flag and score are 0.
struct DetectorVerdict {
  double t = 0.0;
  bool flag = false;
  double score = 0.0;
  double aux = 0.0;
  DetectorId detector = DetectorId::cepstral;
  bool ready = true;

  bool operator==(const DetectorVerdict&) const = default;
};

}  // namespace crashdet
