#include "decaf/metrics.hpp"

#include <cmath>

#include "decaf/errors.hpp"

namespace decaf {

static void check_shapes(const std::vector<Slice>& a, const std::vector<Slice>& b) {
  if (a.size() != b.size())
    throw ConfigError("metric inputs differ in slice count");
  for (size_t q = 0; q < a.size(); ++q)
    if (a[q].rows() != b[q].rows() || a[q].cols() != b[q].cols())
      throw ConfigError("metric inputs differ in slice shape");
}

double mse(const std::vector<Slice>& a, const std::vector<Slice>& b) {
  check_shapes(a, b);
  double acc = 0;
  long n = 0;
  for (size_t q = 0; q < a.size(); ++q) {
    acc += (a[q] - b[q]).squaredNorm();
    n += a[q].size();
  }
  if (n == 0) throw ConfigError("metric inputs are empty");
  return acc / static_cast<double>(n);
}

double mae(const std::vector<Slice>& a, const std::vector<Slice>& b) {
  check_shapes(a, b);
  double acc = 0;
  long n = 0;
  for (size_t q = 0; q < a.size(); ++q) {
    acc += (a[q] - b[q]).cwiseAbs().sum();
    n += a[q].size();
  }
  if (n == 0) throw ConfigError("metric inputs are empty");
  return acc / static_cast<double>(n);
}

static std::vector<Slice> pooled(const PermittivityVolume& v) {
  std::vector<Slice> s = v.re;
  s.insert(s.end(), v.im.begin(), v.im.end());
  return s;
}

double mse(const PermittivityVolume& a, const PermittivityVolume& b) {
  return mse(pooled(a), pooled(b));
}

double mae(const PermittivityVolume& a, const PermittivityVolume& b) {
  return mae(pooled(a), pooled(b));
}

std::optional<double> psnr_from(double peak, double mse_value, PsnrOptions opts) {
  if (mse_value < 0 || !std::isfinite(mse_value))
    throw ConfigError("psnr needs a finite non-negative mse");
  if (mse_value == 0.0) return std::nullopt;
  const double num = opts.printed_form ? peak : peak * peak;
  return 10.0 * std::log10(num / mse_value);
}

std::optional<double> psnr(const std::vector<Slice>& ref,
                           const std::vector<Slice>& est, PsnrOptions opts) {
  return psnr_from(max_value(ref), mse(ref, est), opts);
}

}  // namespace decaf
