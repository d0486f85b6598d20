#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "crashdet/imu.hpp"
#include "crashdet/verdict.hpp"

namespace crashdet {

/// Which channels make up the Mahalanobis feature vector l(t).
enum class FeatureSet {
  inertial,        // ax, ay, az, wx, wz
  inertial_speed,  // speed plus all inertial channels
  speed_ax,        // speed and longitudinal acceleration
};

std::string_view to_string(FeatureSet set) noexcept;
FeatureSet parse_feature_set(std::string_view name);
std::size_t feature_count(FeatureSet set) noexcept;
/// Throws DataError when the set needs speed and the sample has none.
std::vector<double> features(const ImuSample& sample, FeatureSet set);
Matrix feature_matrix(std::span<const ImuSample> samples, FeatureSet set);

/// Outlier model fitted on nominal data. The threshold is learned from the
/// F approximation of the squared distance of a new observation and
/// compared on the root scale.
class MahalanobisModel {
 public:
  /// Rebuilds the inverse and the threshold from stored parameters.
  static MahalanobisModel from_parameters(Eigen::VectorXd mean, Eigen::MatrixXd covariance, std::size_t n,
                                          double alpha);

  const Eigen::VectorXd& mean() const noexcept { return mean_; }
  const Eigen::MatrixXd& covariance() const noexcept { return covariance_; }
  const Eigen::MatrixXd& inverse() const noexcept { return inverse_; }
  double gamma() const noexcept { return gamma_; }
  std::size_t dimension() const noexcept { return static_cast<std::size_t>(mean_.size()); }
  std::size_t sample_count() const noexcept { return n_; }
  double alpha() const noexcept { return alpha_; }

  /// sqrt((l - mu)' S^-1 (l - mu))
  double distance(std::span<const double> l) const;

 private:
  MahalanobisModel() = default;

  Eigen::VectorXd mean_;
  Eigen::MatrixXd covariance_;
  Eigen::MatrixXd inverse_;
  double gamma_ = 0.0;
  std::size_t n_ = 0;
  double alpha_ = 0.0;
};

inline constexpr double kMaxCovarianceCondition = 1e12;

/// Upper quantile helper: F_{d1,d2}^{-1}(prob).
double f_quantile(double prob, double d1, double d2);

/// gamma = sqrt( p(n-1)(n+1) / (n(n-p)) * F^{-1}(1 - alpha; p, n - p) )
double mahalanobis_threshold(std::size_t p, std::size_t n, double alpha);

/// Fits mean and (n-1)-normalized covariance of an n x p training matrix.
/// Throws FitError when n <= p + 2 or the covariance is singular or has a
/// condition number above 1e12.
MahalanobisModel mahalanobis_fit(const Matrix& training, double alpha = 0.05);

DetectorVerdict mahalanobis_step(double t, std::span<const double> l, const MahalanobisModel& model);

std::vector<DetectorVerdict> run_mahalanobis(std::span<const ImuSample> samples, const MahalanobisModel& model,
                                             FeatureSet set);

}  // namespace crashdet
