#pragma once

// s-ordered quasiprobability distributions
//   W^(s)(alpha) = (1/pi^2) int Phi(xi) e^{s|xi|^2/2} e^{alpha xi* - xi alpha*} d^2 xi
// s = 1 is the P function, s = 0 the Wigner function, s = -1 the Husimi Q function.

#include <Eigen/Dense>

#include "phasefilter/states.hpp"

namespace phasefilter {

// Square grid centred on the origin. values(iy, ix): rows run along the
// imaginary axis, columns along the real axis.
struct PQDGrid {
  double s = 0.0;
  double half_extent = 6.0;
  int n_points = 257;
  Eigen::MatrixXd values;
  // quadrature cutoff K of the xi integral and the estimated per-node error
  double cutoff = 0.0;
  double quadrature_error = 0.0;

  double spacing() const { return 2.0 * half_extent / (n_points - 1); }
  double coord(int i) const { return -half_extent + i * spacing(); }
  PhasePoint point(int ix, int iy) const { return {coord(ix), coord(iy)}; }
  double cell_area() const { return spacing() * spacing(); }
  double riemann_sum() const { return values.sum() * cell_area(); }
  double normalization_residual() const { return riemann_sum() - 1.0; }
  double min_value() const { return values.minCoeff(); }
};

struct SpqdOptions {
  // the integrand must stay below this on every ring beyond the cutoff
  double tail_tol = 1e-12;
  double r_search = 60.0;
  // doubled-panel agreement required on the check nodes
  double tol = 1e-10;
  bool verify = true;
};

// Radius beyond which |Phi(xi)| e^{s|xi|^2/2} < tail_tol; throws SingularPqdError.
double spqd_cutoff(const CharFn& phi, double s, const SpqdOptions& opt = {});

PQDGrid spqd_grid(const CharFn& phi, double s, double half_extent = 6.0, int n_points = 257,
                  const SpqdOptions& opt = {});
PQDGrid spqd_grid(const StateSpec& state, double s, double half_extent = 6.0, int n_points = 257,
                  const SpqdOptions& opt = {});

// W^(s) at one point by the same quadrature
double spqd_point(const CharFn& phi, double s, PhasePoint alpha, const SpqdOptions& opt = {});

}  // namespace phasefilter
