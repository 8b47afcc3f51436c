#include "phasefilter/radial_profile.hpp"

#include <algorithm>
#include <cmath>

#include "phasefilter/types.hpp"

namespace phasefilter {

RadialProfile RadialProfile::sample(const std::function<double(double)>& f, double r_max,
                                    int n_knots, double end_slope, double tail_value) {
  if (n_knots < 4) throw DomainError("RadialProfile: need at least 4 knots");
  std::vector<double> v(n_knots);
  const double h = r_max / (n_knots - 1);
  for (int i = 0; i < n_knots; ++i) v[i] = f(i * h);
  return RadialProfile(std::move(v), r_max, end_slope, tail_value);
}

RadialProfile::RadialProfile(std::vector<double> values, double r_max, double end_slope,
                             double tail_value)
    : values_(std::move(values)), r_max_(r_max), tail_(tail_value) {
  if (values_.size() < 4) throw DomainError("RadialProfile: need at least 4 knots");
  if (!(r_max > 0.0)) throw DomainError("RadialProfile: r_max must be positive");
  h_ = r_max_ / static_cast<double>(values_.size() - 1);
  build(end_slope);
}

void RadialProfile::build(double end_slope) {
  // clamped spline: f'(0) = 0, f'(r_max) = end_slope; Thomas algorithm
  const std::size_t n = values_.size();
  std::vector<double> a(n), b(n), c(n), d(n);
  const double h = h_;
  b[0] = h / 3.0;
  c[0] = h / 6.0;
  d[0] = (values_[1] - values_[0]) / h;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    a[i] = h / 6.0;
    b[i] = 2.0 * h / 3.0;
    c[i] = h / 6.0;
    d[i] = (values_[i + 1] - 2.0 * values_[i] + values_[i - 1]) / h;
  }
  a[n - 1] = h / 6.0;
  b[n - 1] = h / 3.0;
  d[n - 1] = end_slope - (values_[n - 1] - values_[n - 2]) / h;
  for (std::size_t i = 1; i < n; ++i) {
    const double m = a[i] / b[i - 1];
    b[i] -= m * c[i - 1];
    d[i] -= m * d[i - 1];
  }
  second_.assign(n, 0.0);
  second_[n - 1] = d[n - 1] / b[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) second_[i] = (d[i] - c[i] * second_[i + 1]) / b[i];
}

double RadialProfile::operator()(double r) const {
  r = std::abs(r);
  if (r > r_max_) return tail_;
  const std::size_t n = values_.size();
  std::size_t i = std::min(static_cast<std::size_t>(r / h_), n - 2);
  const double t = (r - i * h_) / h_;
  const double A = 1.0 - t;
  const double B = t;
  return A * values_[i] + B * values_[i + 1] +
         ((A * A * A - A) * second_[i] + (B * B * B - B) * second_[i + 1]) * h_ * h_ / 6.0;
}

std::vector<double> RadialProfile::radii() const {
  std::vector<double> r(values_.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = i * h_;
  return r;
}

double RadialProfile::estimate_interpolation_error(const std::function<double(double)>& f) {
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < values_.size(); ++i) {
    const double r = (i + 0.5) * h_;
    worst = std::max(worst, std::abs(f(r) - (*this)(r)));
  }
  interpolation_error_ = worst;
  return worst;
}

}  // namespace phasefilter
