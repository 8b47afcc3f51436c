#pragma once

#include <functional>
#include <vector>

namespace phasefilter {

// Clamped cubic spline of a radial function on uniform knots over [0, r_max].
// The slope at the origin is pinned to zero (smooth radial functions are even);
// beyond r_max the profile returns `tail_value`.
class RadialProfile {
 public:
  RadialProfile() = default;

  // Samples `f` on `n_knots` uniform knots; `end_slope` is f'(r_max).
  static RadialProfile sample(const std::function<double(double)>& f, double r_max, int n_knots,
                              double end_slope = 0.0, double tail_value = 0.0);

  RadialProfile(std::vector<double> values, double r_max, double end_slope = 0.0,
                double tail_value = 0.0);

  double operator()(double r) const;

  double r_max() const { return r_max_; }
  double spacing() const { return h_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double> radii() const;

  // max |f - spline| observed at knot midpoints against the reference `f`,
  // recorded on the profile
  double estimate_interpolation_error(const std::function<double(double)>& f);
  double interpolation_error() const { return interpolation_error_; }

 private:
  void build(double end_slope);

  std::vector<double> values_;
  std::vector<double> second_;
  double r_max_ = 0.0;
  double h_ = 0.0;
  double tail_ = 0.0;
  double interpolation_error_ = 0.0;
};

}  // namespace phasefilter
