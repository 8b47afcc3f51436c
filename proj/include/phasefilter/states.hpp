#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "phasefilter/fock.hpp"
#include "phasefilter/types.hpp"

namespace phasefilter {

namespace state {
struct Vacuum {};
struct Coherent {
  cplx amplitude;
};
struct Fock {
  int n;
};
struct Thermal {
  double nbar;
};
// S(zeta)|0> with zeta = r e^{i phase}, S(zeta) = exp((zeta* a^2 - zeta a^dag^2)/2)
struct Squeezed {
  double r;
  double phase;
};
// N (|alpha> + parity |-alpha>)
struct Cat {
  cplx amplitude;
  int parity;
};
struct Numeric {
  FockMatrix rho;
};
}  // namespace state

using StateSpec = std::variant<state::Vacuum, state::Coherent, state::Fock, state::Thermal,
                               state::Squeezed, state::Cat, state::Numeric>;

enum class CharFnKind { analytic_catalog, numeric_from_fock, filtered_product };

// gaussian_dominated: |Phi| <= C exp(-a|xi|^2); subgaussian: decays faster than
// any Gaussian; none: no decay guarantee.
enum class DecayClass { gaussian_dominated, subgaussian, none };

// Characteristic function Phi(xi) = Tr[rho D(xi)] (or a filtered product).
struct CharFn {
  std::function<cplx(cplx)> evaluator;
  CharFnKind kind = CharFnKind::analytic_catalog;
  DecayClass decay = DecayClass::gaussian_dominated;
  // angular bandwidth of Phi(t e^{i phi}) in phi; bounds the Fock-support size
  int angular_bandwidth = 0;

  cplx operator()(PhasePoint xi) const { return evaluator(xi.z()); }
  cplx at(cplx xi) const { return evaluator(xi); }
};

void validate(const StateSpec& s);
std::string describe(const StateSpec& s);

cplx charfn_eval(const StateSpec& s, PhasePoint xi);
CharFn characteristic_function(const StateSpec& s);

// Exact truncated density matrix <m|rho|n>, 0 <= m, n < dim.
FockMatrix to_fock(const StateSpec& s, int dim);

// photon-number distribution p_0 .. p_{n_max}
std::vector<double> photon_distribution(const StateSpec& s, int n_max);

// 1 - sum_{n < dim} p_n
double truncation_leakage(const StateSpec& s, int dim);

// smallest dim whose leakage is below `tol`; Numeric states return their dimension
int support_dim(const StateSpec& s, double tol = 1e-15, int cap = 4096);

double mean_photon_number(const StateSpec& s);

bool is_pure(const StateSpec& s);
// state vector for pure states (throws DomainError for mixed states)
FockVector pure_vector(const StateSpec& s, int dim);

bool is_radially_symmetric(const StateSpec& s);

// Q(alpha) = <alpha|rho|alpha> / pi
double husimi_q(const StateSpec& s, PhasePoint alpha);
// same, with the per-state setup done once
std::function<double(cplx)> husimi_evaluator(const StateSpec& s);

// Wigner function; Gaussian states in closed form, the rest through the
// displaced-parity sum (2/pi) sum_k (-1)^k <k|D(-alpha) rho D(alpha)|k>
double wigner(const StateSpec& s, PhasePoint alpha);

// <psi|D(gamma) (x) I|psi> for the two-mode squeezed vacuum
// sqrt(1 - chi^2) sum_n chi^n |n, n>
double tmsv_displaced_overlap(PhasePoint gamma, double chi);
// same quantity as the truncated sum (1 - chi^2) sum_{n<dim} chi^{2n} <n|D|n>
double tmsv_displaced_overlap_fock(PhasePoint gamma, double chi, int dim);

// 2x2 covariance of (Re alpha, Im alpha) under the Wigner function of a
// Gaussian catalog state (vacuum variance 1/4 per axis) and its centre;
// nullopt for non-Gaussian states
struct GaussianMoments {
  Eigen::Matrix2d cov;
  Eigen::Vector2d mean;
};
std::optional<GaussianMoments> gaussian_moments(const StateSpec& s);

}  // namespace phasefilter
