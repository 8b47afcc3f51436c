#pragma once

// The filtering map rho -> rho_Omega with Phi_Omega = Phi * Omega, equivalently
// rho_Omega = int Omega~(alpha) D(alpha) rho D(alpha)^dag d^2 alpha.

#include <cstdint>

#include "phasefilter/filters.hpp"
#include "phasefilter/pqd.hpp"

namespace phasefilter {

CharFn apply_filter_charfn(const StateSpec& state, const Filter& filter);

enum class FilterRoute { charfn_quadrature, mc_displacement };
std::string to_string(FilterRoute r);

struct FilterParams {
  // Monte-Carlo route
  long n_samples = 100000;
  std::uint64_t seed = 1;
  int chunks = 64;
  // quadrature route: max abs change of any element between refinements
  double tol = 1e-11;
  // eigenvalues of the input below this are dropped on the MC route
  double rank_tol = 1e-14;
};

struct FilteredState {
  StateSpec input;
  std::string filter;
  FockMatrix fock;
  FilterRoute route = FilterRoute::charfn_quadrature;
  long n_samples = 0;
  std::uint64_t seed = 0;
  // quadrature: refinement disagreement; MC: standard error of the trace
  // distance to the exact output (batch means over chunks)
  double route_error = 0.0;
  // MC: per-entry standard errors
  Eigen::MatrixXd entry_stderr;
  // leakage 1 - sum_{n<N} p_n of the input
  double input_leakage = 0.0;
};

FilteredState apply_filter_fock(const StateSpec& state, const Filter& filter, int dim,
                                FilterRoute route = FilterRoute::charfn_quadrature,
                                const FilterParams& params = {});

// P_Omega on a grid (s = 1 transform of Phi * Omega); throws FilterTooWeakError
PQDGrid regularized_p_grid(const StateSpec& state, const Filter& filter, double half_extent = 6.0,
                           int n_points = 257);

struct ReconstructOptions {
  // grid normalization must be within this of 1
  double norm_tol = 1e-4;
  // P-weighted coherent-state mass beyond the truncation
  double leakage_tol = 1e-6;
};

// sum over the grid of P(alpha) dA |alpha><alpha|, optionally with probes |scale*alpha>
FockMatrix reconstruct_from_p(const PQDGrid& grid, int dim, const ReconstructOptions& opt = {},
                              double amplitude_scale = 1.0);

}  // namespace phasefilter
