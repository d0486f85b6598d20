#include "crashdet/model_io.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "crashdet/errors.hpp"
#include "crashdet/format.hpp"

namespace crashdet {

namespace {

std::string join_exact(const double* values, Eigen::Index n) {
  std::string s;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i > 0) s += ',';
    s += format_exact(values[i]);
  }
  return s;
}

std::vector<double> split_numbers(const std::string& key, const std::string& text) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find(',', start);
    const auto token = std::string_view(text).substr(start, end == std::string::npos ? std::string::npos : end - start);
    double v = 0.0;
    if (!parse_double(token, v) || !std::isfinite(v))
      throw ConfigError("model key '" + key + "' has a malformed entry '" + std::string(token) + "'");
    values.push_back(v);
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return values;
}

}  // namespace

KvDocument model_to_kv(const MahalanobisModel& model, FeatureSet features) {
  KvDocument doc;
  doc.set("format", std::string("crashdet-mahalanobis/1"));
  doc.set("features", std::string(to_string(features)));
  doc.set("dimension", model.dimension());
  doc.set("samples", model.sample_count());
  doc.set("alpha", format_exact(model.alpha()));
  doc.set("gamma", format_exact(model.gamma()));
  doc.set("mean", join_exact(model.mean().data(), model.mean().size()));
  // Eigen is column-major; the covariance is symmetric, so order is moot,
  // but rows are written explicitly to keep the format independent of that.
  const Eigen::MatrixXd row_major = model.covariance().transpose();
  doc.set("covariance", join_exact(row_major.data(), row_major.size()));
  return doc;
}

StoredModel model_from_kv(const KvDocument& doc) {
  if (doc.require("format") != "crashdet-mahalanobis/1") throw ConfigError("not a crashdet-mahalanobis/1 model");
  const FeatureSet features = parse_feature_set(doc.require("features"));
  const std::size_t p = doc.require_size("dimension");
  if (p != feature_count(features))
    throw ConfigError("model dimension " + std::to_string(p) + " does not match feature set " +
                      std::string(to_string(features)));
  const std::size_t n = doc.require_size("samples");
  const double alpha = doc.require_double("alpha");

  const auto mean = split_numbers("mean", doc.require("mean"));
  const auto cov = split_numbers("covariance", doc.require("covariance"));
  if (mean.size() != p || cov.size() != p * p) throw ConfigError("model mean/covariance sizes do not match dimension");

  Eigen::VectorXd mu(static_cast<Eigen::Index>(p));
  Eigen::MatrixXd s(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
  for (std::size_t i = 0; i < p; ++i) {
    mu(static_cast<Eigen::Index>(i)) = mean[i];
    for (std::size_t j = 0; j < p; ++j)
      s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cov[i * p + j];
  }
  return {MahalanobisModel::from_parameters(std::move(mu), std::move(s), n, alpha), features};
}

}  // namespace crashdet
