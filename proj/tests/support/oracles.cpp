#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace oracle {

namespace {

std::complex<double> unit(std::size_t k, std::size_t n, std::size_t m, double sign) {
  const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>((k * n) % m) / static_cast<double>(m);
  return {std::cos(angle), std::sin(angle)};
}

}  // namespace

std::vector<std::complex<double>> dft(const std::vector<double>& x) {
  const std::size_t m = x.size();
  std::vector<std::complex<double>> X(m);
  for (std::size_t k = 0; k < m; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t n = 0; n < m; ++n) acc += x[n] * unit(k, n, m, -1.0);
    X[k] = acc;
  }
  return X;
}

std::vector<std::complex<double>> idft(const std::vector<std::complex<double>>& X) {
  const std::size_t m = X.size();
  std::vector<std::complex<double>> x(m);
  for (std::size_t n = 0; n < m; ++n) {
    std::complex<double> acc = 0.0;
    for (std::size_t k = 0; k < m; ++k) acc += X[k] * unit(k, n, m, 1.0);
    x[n] = acc / static_cast<double>(m);
  }
  return x;
}

std::vector<double> periodogram(const std::vector<double>& x) {
  const auto X = dft(x);
  std::vector<double> phi(X.size());
  for (std::size_t k = 0; k < X.size(); ++k) phi[k] = std::norm(X[k]) / static_cast<double>(x.size());
  return phi;
}

std::vector<double> cepstrum(const std::vector<double>& phi, double floor) {
  std::vector<std::complex<double>> L(phi.size());
  for (std::size_t k = 0; k < phi.size(); ++k) L[k] = std::log(std::max(phi[k], floor));
  const auto c = idft(L);
  std::vector<double> out(c.size());
  for (std::size_t n = 0; n < c.size(); ++n) out[n] = c[n].real();
  return out;
}

double martin(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b, std::size_t K) {
  double total = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    double diff = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) diff += a[j][k] - b[j][k];
    total += static_cast<double>(k) * diff * diff;
  }
  return std::sqrt(total);
}

namespace {

double beta_cf(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 10000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) return h;
  }
  throw std::runtime_error("incomplete beta continued fraction did not converge");
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double f_cdf(double x, double d1, double d2) {
  if (x <= 0.0) return 0.0;
  return incomplete_beta(d1 / 2.0, d2 / 2.0, d1 * x / (d1 * x + d2));
}

double f_quantile(double prob, double d1, double d2) {
  double lo = 0.0;
  double hi = 1.0;
  while (f_cdf(hi, d1, d2) < prob) hi *= 2.0;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    (f_cdf(mid, d1, d2) < prob ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double mahalanobis_gamma(std::size_t p, std::size_t n, double alpha) {
  const double pd = static_cast<double>(p);
  const double nd = static_cast<double>(n);
  return std::sqrt(pd * (nd - 1.0) * (nd + 1.0) / (nd * (nd - pd)) * f_quantile(1.0 - alpha, pd, nd - pd));
}

std::vector<std::vector<double>> inverse(std::vector<std::vector<double>> a) {
  const std::size_t n = a.size();
  std::vector<std::vector<double>> inv(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    std::swap(a[col], a[pivot]);
    std::swap(inv[col], inv[pivot]);
    const double d = a[col][col];
    for (std::size_t c = 0; c < n; ++c) {
      a[col][c] /= d;
      inv[col][c] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col];
      for (std::size_t c = 0; c < n; ++c) {
        a[r][c] -= f * a[col][c];
        inv[r][c] -= f * inv[col][c];
      }
    }
  }
  return inv;
}

double quadratic_form(const std::vector<std::vector<double>>& s_inv, const std::vector<double>& x) {
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) total += x[i] * s_inv[i][j] * x[j];
  return total;
}

std::vector<double> ListRing::snapshot() const {
  std::vector<double> out;
  if (rows_.empty()) return out;
  const std::size_t channels = rows_.front().size();
  for (std::size_t c = 0; c < channels; ++c)
    for (const auto& row : rows_) out.push_back(row[c]);
  return out;
}

std::vector<bool> debounce(const std::vector<bool>& raw, std::size_t on, std::size_t off) {
  std::vector<bool> out(raw.size());
  bool state = false;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const std::size_t need = state ? off : on;
    const bool target = !state;
    bool all = i + 1 >= need;
    for (std::size_t back = 0; all && back < need; ++back) all = raw[i - back] == target;
    if (all) state = target;
    out[i] = state;
  }
  return out;
}

}  // namespace oracle
