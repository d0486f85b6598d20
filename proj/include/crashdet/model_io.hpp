#pragma once

#include "crashdet/kv.hpp"
#include "crashdet/mahalanobis.hpp"

namespace crashdet {

struct StoredModel {
  MahalanobisModel model;
  FeatureSet features;
};

/// `format=crashdet-mahalanobis/1` with mean and row-major covariance as
/// comma-separated "%.17g" lists, so a reload rebuilds the identical model.
KvDocument model_to_kv(const MahalanobisModel& model, FeatureSet features);
/// Throws ConfigError on a malformed or inconsistent document and FitError
/// when the stored covariance is unusable.
StoredModel model_from_kv(const KvDocument& doc);

}  // namespace crashdet
