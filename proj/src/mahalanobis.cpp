#include "crashdet/mahalanobis.hpp"

#include <cmath>
#include <string>

#include <boost/math/distributions/fisher_f.hpp>

#include "crashdet/errors.hpp"
#include "crashdet/format.hpp"

namespace crashdet {

std::string_view to_string(FeatureSet set) noexcept {
  switch (set) {
    case FeatureSet::inertial:
      return "inertial";
    case FeatureSet::inertial_speed:
      return "inertial+speed";
    case FeatureSet::speed_ax:
      return "speed+ax";
  }
  return "unknown";
}

FeatureSet parse_feature_set(std::string_view name) {
  if (name == "inertial") return FeatureSet::inertial;
  if (name == "inertial+speed") return FeatureSet::inertial_speed;
  if (name == "speed+ax") return FeatureSet::speed_ax;
  throw ConfigError("unknown feature set '" + std::string(name) + "'");
}

std::size_t feature_count(FeatureSet set) noexcept {
  switch (set) {
    case FeatureSet::inertial:
      return 5;
    case FeatureSet::inertial_speed:
      return 6;
    case FeatureSet::speed_ax:
      return 2;
  }
  return 0;
}

namespace {

double require_speed(const ImuSample& s) {
  if (!s.speed) throw DataError("feature set needs speed but sample at t=" + format_number(s.t) + " has none");
  return *s.speed;
}

}  // namespace

std::vector<double> features(const ImuSample& s, FeatureSet set) {
  switch (set) {
    case FeatureSet::inertial:
      return {s.ax, s.ay, s.az, s.wx, s.wz};
    case FeatureSet::inertial_speed:
      return {require_speed(s), s.ax, s.ay, s.az, s.wx, s.wz};
    case FeatureSet::speed_ax:
      return {require_speed(s), s.ax};
  }
  return {};
}

Matrix feature_matrix(std::span<const ImuSample> samples, FeatureSet set) {
  Matrix out(samples.size(), feature_count(set));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto f = features(samples[i], set);
    std::copy(f.begin(), f.end(), out.row(i).begin());
  }
  return out;
}

double f_quantile(double prob, double d1, double d2) {
  if (!(prob > 0.0 && prob < 1.0)) throw ConfigError("quantile probability must be in (0, 1)");
  if (!(d1 > 0.0 && d2 > 0.0)) throw ConfigError("F degrees of freedom must be positive");
  return boost::math::quantile(boost::math::fisher_f_distribution<double>(d1, d2), prob);
}

double mahalanobis_threshold(std::size_t p, std::size_t n, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must be in (0, 1)");
  if (p == 0 || n <= p + 2) throw FitError("need n > p + 2 training samples (n=" + std::to_string(n) +
                                           ", p=" + std::to_string(p) + ")");
  const double pd = static_cast<double>(p);
  const double nd = static_cast<double>(n);
  const double scale = pd * (nd - 1.0) * (nd + 1.0) / (nd * (nd - pd));
  return std::sqrt(scale * f_quantile(1.0 - alpha, pd, nd - pd));
}

MahalanobisModel MahalanobisModel::from_parameters(Eigen::VectorXd mean, Eigen::MatrixXd covariance,
                                                   std::size_t n, double alpha) {
  const auto p = static_cast<std::size_t>(mean.size());
  if (covariance.rows() != mean.size() || covariance.cols() != mean.size())
    throw DimensionError("covariance shape does not match mean");
  if (!covariance.allFinite() || !mean.allFinite()) throw FitError("non-finite model parameters");

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(covariance, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > kMaxCovarianceCondition)
    throw FitError("covariance is singular or ill-conditioned (eigenvalues " + format_number(lo) + " .. " +
                   format_number(hi) + ")");

  MahalanobisModel model;
  model.gamma_ = mahalanobis_threshold(p, n, alpha);
  model.inverse_ = covariance.llt().solve(Eigen::MatrixXd::Identity(mean.size(), mean.size()));
  model.inverse_ = 0.5 * (model.inverse_ + model.inverse_.transpose()).eval();
  const double residual =
      (model.inverse_ * covariance - Eigen::MatrixXd::Identity(mean.size(), mean.size())).cwiseAbs().maxCoeff();
  if (residual > 1e-8) throw FitError("covariance inverse is inaccurate (residual " + format_number(residual) + ")");
  model.mean_ = std::move(mean);
  model.covariance_ = std::move(covariance);
  model.n_ = n;
  model.alpha_ = alpha;
  return model;
}

double MahalanobisModel::distance(std::span<const double> l) const {
  if (l.size() != dimension()) throw DimensionError("sample dimension does not match model");
  const Eigen::VectorXd diff = Eigen::Map<const Eigen::VectorXd>(l.data(), mean_.size()) - mean_;
  return std::sqrt(std::max(0.0, diff.dot(inverse_ * diff)));
}

MahalanobisModel mahalanobis_fit(const Matrix& training, double alpha) {
  const std::size_t n = training.rows();
  const std::size_t p = training.cols();
  if (p == 0) throw FitError("training matrix has no columns");
  if (n <= p + 2)
    throw FitError("need n > p + 2 training samples (n=" + std::to_string(n) + ", p=" + std::to_string(p) + ")");

  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> x(
      training.data().data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  Eigen::VectorXd mean = x.colwise().mean().transpose();
  const Eigen::MatrixXd centered = x.rowwise() - mean.transpose();
  Eigen::MatrixXd covariance = (centered.transpose() * centered) / static_cast<double>(n - 1);
  return MahalanobisModel::from_parameters(std::move(mean), std::move(covariance), n, alpha);
}

DetectorVerdict mahalanobis_step(double t, std::span<const double> l, const MahalanobisModel& model) {
  const double d = model.distance(l);
  return {t, d > model.gamma(), d, 0.0, DetectorId::mahalanobis, true};
}

std::vector<DetectorVerdict> run_mahalanobis(std::span<const ImuSample> samples, const MahalanobisModel& model,
                                             FeatureSet set) {
  if (feature_count(set) != model.dimension())
    throw ConfigError("feature set '" + std::string(to_string(set)) + "' has " +
                      std::to_string(feature_count(set)) + " features but the model has " +
                      std::to_string(model.dimension()));
  std::vector<DetectorVerdict> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    require_finite(s);
    const auto l = features(s, set);
    out.push_back(mahalanobis_step(s.t, l, model));
  }
  return out;
}

}  // namespace crashdet
