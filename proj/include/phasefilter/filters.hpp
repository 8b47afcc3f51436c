#pragma once

// Filter functions Omega(xi), their transforms
//   Omega~(alpha) = (1/pi^2) int Omega(xi) e^{alpha xi* - xi alpha*} d^2 xi
// and samplers of Omega~ for the filters whose transform is a density.

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <variant>

#include "phasefilter/radial_profile.hpp"
#include "phasefilter/states.hpp"

namespace phasefilter {

namespace filter {
// exp(-r |xi|^2 / 2)
struct Gaussian {
  double r;
};
// autocorrelation of w_L(xi) = (1/L) 2^{1/q} sqrt(q / (2 pi Gamma(2/q))) exp(-|xi|^q / L^q)
struct Nonclassicality {
  double L;
  double q;
};
// g(u) g(v), g(u) = exp(-f(u - L) - f(-u - L)), f(x) = x^4 e^{-1/x^2} for x > 0,
// with (u, v) the canonical coordinates of xi
struct Klauder {
  double L;
};
// characteristic function of a kernel state; Omega~ is its Wigner function
struct SmoothingKernel {
  StateSpec kernel;
};
// (1 - 3|xi|^2/2) exp(-|xi|^2)
struct NarcowichCounterexample {};
}  // namespace filter

using FilterSpec = std::variant<filter::Gaussian, filter::Nonclassicality, filter::Klauder,
                                filter::SmoothingKernel, filter::NarcowichCounterexample>;

class Filter {
 public:
  explicit Filter(FilterSpec spec);

  static Filter gaussian(double r) { return Filter(filter::Gaussian{r}); }
  static Filter nonclassicality(double L, double q) {
    return Filter(filter::Nonclassicality{L, q});
  }
  static Filter klauder(double L) { return Filter(filter::Klauder{L}); }
  static Filter kernel(StateSpec s) { return Filter(filter::SmoothingKernel{std::move(s)}); }
  static Filter narcowich_counterexample() { return Filter(filter::NarcowichCounterexample{}); }

  const FilterSpec& spec() const { return spec_; }
  std::string describe() const;

  cplx eval(cplx xi) const;
  double fourier(cplx alpha) const;

  bool is_real() const;
  bool is_radial() const;
  // Omega~(-alpha) = Omega~(alpha)
  bool is_even() const;
  // Omega~ is a probability density for this catalog entry
  bool has_density_transform() const;
  DecayClass decay() const;

  // radial profiles; only for is_radial() filters
  double eval_radial(double t) const;
  double fourier_radial(double rho) const;

  // |xi| beyond which |Omega| < 1e-15 (infinity when Omega does not decay)
  double support_radius() const;
  // |alpha| beyond which the transform mass is negligible (for scans and tables)
  double fourier_radius() const;

  // "larger is closer to the identity": L for Nonclassicality and Klauder, 1/r for Gaussian
  std::optional<double> width() const;

  struct Impl;

 private:
  FilterSpec spec_;
  std::shared_ptr<const Impl> impl_;
};

cplx filter_eval(const Filter& f, PhasePoint xi);
double filter_fourier(const Filter& f, PhasePoint alpha);

// i.i.d. draws from Omega~; holds its own RNG, one per consumer
class FilterSampler {
 public:
  FilterSampler(const Filter& f, std::uint64_t seed);
  PhasePoint next();

 private:
  Filter filter_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  // Gaussian branch: alpha = mean + chol * (n1, n2)
  Eigen::Matrix2d chol_ = Eigen::Matrix2d::Zero();
  Eigen::Vector2d mean_ = Eigen::Vector2d::Zero();
  bool gaussian_ = false;
  // radial branch: radius by inverse CDF
  std::shared_ptr<const std::vector<double>> radii_, cdf_;
  double scale_ = 1.0;
};

// throws UnphysicalFilterError for filters whose transform is not a density
FilterSampler filter_sampler(const Filter& f, std::uint64_t seed);

// Radius table used by the radial samplers: knots rho_i and CDF of 2 pi rho Omega~(rho)
struct RadialCdf {
  std::vector<double> radii;
  std::vector<double> cdf;
  double tail_mass = 0.0;
};
RadialCdf radial_cdf(const Filter& f);

// Nonclassicality profiles at L = 1; Omega_L(t) = Omega_1(t/L) and
// Omega~_L(rho) = L^2 Omega~_1(L rho). The transform is kept as the profile of
// w~_1 and squared on use, Omega~ = pi^2 w~^2, so it never dips below zero.
const RadialProfile& noncl_filter_profile(double q);
const RadialProfile& noncl_mother_fourier_profile(double q);
// mother function w_1(t)
double noncl_mother(double t, double q);

// Klauder's one-dimensional factor g_L(u) and its cosine transform int g(u) cos(k u) du
double klauder_factor(double u, double L);
double klauder_cosine_transform(double k, double L);

}  // namespace phasefilter
