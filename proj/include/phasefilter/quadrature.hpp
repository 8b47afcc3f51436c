#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "phasefilter/types.hpp"

namespace phasefilter {

// Nodes and weights of a 1D rule; integrates sum_i w_i f(x_i).
struct QuadratureRule {
  std::vector<double> x;
  std::vector<double> w;

  std::size_t size() const { return x.size(); }
};

// Gauss-Legendre rule on [-1, 1], computed once per order.
const QuadratureRule& gauss_legendre(int order);

// Composite Gauss-Legendre over [a, b] with equal-width panels.
QuadratureRule composite_gauss_legendre(double a, double b, int panels, int order = 16);

template <class F>
double integrate(F&& f, const QuadratureRule& rule) {
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) acc += rule.w[i] * f(rule.x[i]);
  return acc;
}

// Doubles the panel count until two successive estimates agree to `tol`
// (absolute). Throws QuadratureError after `max_levels` doublings.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double tol = 1e-13, int initial_panels = 8, int max_levels = 10);

// int_0^cutoff f(t) J0(k t) t dt, panel width adapted to the Bessel oscillation.
double hankel_j0(const std::function<double(double)>& f, double k, double cutoff,
                 double max_panel_width = 0.25);

// Smallest radius R (on a `step` lattice) such that ring_max(r) < tol for every
// ring r in [R, R + margin]. Returns nullopt when nothing below r_max qualifies.
std::optional<double> decay_radius(const std::function<double(double)>& ring_max, double tol,
                                   double r_max, double step = 0.25, double margin = 2.0);

// max_phi |f(r e^{i phi})| sampled on `n_angles` equispaced angles
double ring_max_abs(const std::function<cplx(cplx)>& f, double r, int n_angles = 64);

}  // namespace phasefilter
