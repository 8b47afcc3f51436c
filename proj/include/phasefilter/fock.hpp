#pragma once

// Truncated Fock-space linear algebra. Everything here is templated on the real
// scalar so the same code runs in float, double or long double.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "phasefilter/types.hpp"

namespace phasefilter {

template <class Scalar>
using FockMatrixT = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using FockVectorT = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;
template <class Scalar>
using RealVectorT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using FockMatrix = FockMatrixT<double>;
using FockVector = FockVectorT<double>;

// relative PSD tolerance for physicality validation
inline constexpr double eps_psd = 1e-8;

// L_0^{(alpha)}(x) ... L_{n_max}^{(alpha)}(x) by upward recurrence in n
template <class Scalar>
std::vector<Scalar> laguerre_sequence(int n_max, int alpha, Scalar x) {
  std::vector<Scalar> out(static_cast<std::size_t>(std::max(n_max, 0)) + 1);
  out[0] = Scalar(1);
  if (n_max >= 1) out[1] = Scalar(1 + alpha) - x;
  for (int j = 1; j < n_max; ++j) {
    out[j + 1] = ((Scalar(2 * j + 1 + alpha) - x) * out[j] - Scalar(j + alpha) * out[j - 1]) /
                 Scalar(j + 1);
  }
  return out;
}

template <class Scalar>
Scalar laguerre(int n, int alpha, Scalar x) {
  return laguerre_sequence(n, alpha, x).back();
}

// Rectangular block <m|D(gamma)|n>, 0 <= m < rows, 0 <= n < cols. Each diagonal
// m - n = k is one associated-Laguerre recurrence, so the cost is O(rows * cols).
template <class Scalar>
FockMatrixT<Scalar> displacement_block(std::complex<Scalar> gamma, int rows, int cols) {
  using C = std::complex<Scalar>;
  using std::abs;
  using std::arg;
  using std::exp;
  using std::lgamma;
  using std::log;
  using std::sqrt;
  if (rows < 1 || cols < 1) throw DomainError("displacement_block: dimensions must be >= 1");
  if (!std::isfinite(static_cast<double>(gamma.real())) ||
      !std::isfinite(static_cast<double>(gamma.imag())))
    throw DomainError("displacement_block: non-finite displacement");

  FockMatrixT<Scalar> d = FockMatrixT<Scalar>::Zero(rows, cols);
  const Scalar r = abs(gamma);
  const Scalar x = r * r;
  if (r == Scalar(0)) {
    for (int i = 0; i < std::min(rows, cols); ++i) d(i, i) = C(1);
    return d;
  }
  const Scalar log_r = log(r);
  const Scalar theta = arg(gamma);

  // k >= 0: <n+k|D|n> = sqrt(n!/(n+k)!) gamma^k e^{-x/2} L_n^{(k)}(x)
  // k <  0: <m|D|m+j> = sqrt(m!/(m+j)!) (-gamma*)^j e^{-x/2} L_m^{(j)}(x)
  for (int k = -(cols - 1); k <= rows - 1; ++k) {
    const int j = std::abs(k);
    const int len = (k >= 0) ? std::min(cols, rows - k) : std::min(rows, cols - j);
    if (len <= 0) continue;
    const std::vector<Scalar> lag = laguerre_sequence(len - 1, j, x);
    const C phase = (k >= 0) ? std::polar(Scalar(1), Scalar(j) * theta)
                             : std::polar(Scalar(1), Scalar(j) * (Scalar(pi) - theta));
    Scalar pref = exp(-x / Scalar(2) + Scalar(j) * log_r - Scalar(0.5) * lgamma(Scalar(j + 1)));
    for (int i = 0; i < len; ++i) {
      if (i > 0) pref *= sqrt(Scalar(i) / Scalar(i + j));
      const C val = phase * (pref * lag[i]);
      if (k >= 0)
        d(i + j, i) = val;
      else
        d(i, i + j) = val;
    }
  }
  return d;
}

template <class Scalar>
FockMatrixT<Scalar> displacement_matrix(std::complex<Scalar> gamma, int dim) {
  return displacement_block(gamma, dim, dim);
}

inline FockMatrix displacement_matrix(PhasePoint gamma, int dim) {
  require_finite(gamma, "displacement_matrix");
  return displacement_block<double>(gamma.z(), dim, dim);
}

// |alpha> truncated to `dim` levels (not renormalized)
template <class Scalar>
FockVectorT<Scalar> coherent_vector(std::complex<Scalar> alpha, int dim) {
  using std::exp;
  using std::norm;
  using std::sqrt;
  FockVectorT<Scalar> v(dim);
  std::complex<Scalar> c(exp(-norm(alpha) / Scalar(2)), Scalar(0));
  for (int n = 0; n < dim; ++n) {
    v(n) = c;
    c *= alpha / sqrt(Scalar(n + 1));
  }
  return v;
}

template <class Scalar>
Scalar hermiticity_defect(const FockMatrixT<Scalar>& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

template <class Scalar>
FockMatrixT<Scalar> hermitize(const FockMatrixT<Scalar>& m) {
  return (m + m.adjoint()) / Scalar(2);
}

template <class Scalar>
RealVectorT<Scalar> hermitian_eigenvalues(const FockMatrixT<Scalar>& m) {
  Eigen::SelfAdjointEigenSolver<FockMatrixT<Scalar>> es(hermitize(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

template <class Scalar>
Scalar min_eigenvalue(const FockMatrixT<Scalar>& m) {
  return hermitian_eigenvalues(m).minCoeff();
}

template <class Scalar>
void require_hermitian(const FockMatrixT<Scalar>& m, const char* what, Scalar tol = Scalar(1e-9)) {
  if (m.rows() != m.cols()) throw ValidationError(std::string(what) + ": matrix is not square");
  if (m.rows() < 1) throw ValidationError(std::string(what) + ": empty matrix");
  const Scalar scale = std::max(Scalar(1), m.cwiseAbs().maxCoeff());
  if (hermiticity_defect(m) > tol * scale)
    throw ValidationError(std::string(what) + ": matrix is not Hermitian");
}

// Hermitian, trace within `trace_tol` of 1, min eigenvalue >= -eps_psd * max eigenvalue.
template <class Scalar>
void require_density(const FockMatrixT<Scalar>& m, const char* what,
                     Scalar trace_tol = Scalar(1e-6)) {
  require_hermitian(m, what);
  const Scalar tr = m.trace().real();
  if (std::abs(static_cast<double>(tr - Scalar(1))) > static_cast<double>(trace_tol))
    throw PhysicalityError(std::string(what) + ": trace " + std::to_string(double(tr)) +
                           " differs from 1");
  const RealVectorT<Scalar> ev = hermitian_eigenvalues(m);
  const Scalar top = std::max(ev.maxCoeff(), Scalar(0));
  if (ev.minCoeff() < -Scalar(eps_psd) * top)
    throw PhysicalityError(std::string(what) + ": negative eigenvalue " +
                           std::to_string(double(ev.minCoeff())));
}

// Hermitian positive square root, negative eigenvalues clipped to zero
template <class Scalar>
FockMatrixT<Scalar> psd_sqrt(const FockMatrixT<Scalar>& m) {
  Eigen::SelfAdjointEigenSolver<FockMatrixT<Scalar>> es(hermitize(m));
  RealVectorT<Scalar> ev = es.eigenvalues().cwiseMax(Scalar(0)).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

// Uhlmann fidelity (Tr sqrt(sqrt(r1) r2 sqrt(r1)))^2, which equals the
// purification overlap max |<mu1|mu2>|^2.
template <class Scalar>
Scalar fidelity(const FockMatrixT<Scalar>& rho1, const FockMatrixT<Scalar>& rho2,
                Scalar trace_tol = Scalar(1e-6)) {
  if (rho1.rows() != rho2.rows())
    throw ValidationError("fidelity: dimensions differ");
  require_density(rho1, "fidelity(rho1)", trace_tol);
  require_density(rho2, "fidelity(rho2)", trace_tol);
  // a pure argument reduces to <psi|rho|psi>, avoiding square roots of noise eigenvalues
  for (int pass = 0; pass < 2; ++pass) {
    const FockMatrixT<Scalar>& a = pass == 0 ? rho1 : rho2;
    const FockMatrixT<Scalar>& b = pass == 0 ? rho2 : rho1;
    Eigen::SelfAdjointEigenSolver<FockMatrixT<Scalar>> es(hermitize(a));
    const Eigen::Index top = a.rows() - 1;
    const Scalar lead = es.eigenvalues()(top);
    const Scalar rest = es.eigenvalues().cwiseAbs().sum() - std::abs(lead);
    if (static_cast<double>(rest) < 1e-12) {
      const FockVectorT<Scalar> v = es.eigenvectors().col(top);
      const Scalar f = (v.adjoint() * b * v)(0, 0).real() * lead;
      return std::clamp(f, Scalar(0), Scalar(1));
    }
  }
  const FockMatrixT<Scalar> s1 = psd_sqrt(rho1);
  const FockMatrixT<Scalar> inner = s1 * rho2 * s1;
  const RealVectorT<Scalar> ev = hermitian_eigenvalues(inner);
  Scalar acc = Scalar(0);
  for (Eigen::Index i = 0; i < ev.size(); ++i) acc += std::sqrt(std::max(ev(i), Scalar(0)));
  return std::clamp(acc * acc, Scalar(0), Scalar(1));
}

// (1/2) Tr |rho1 - rho2|
template <class Scalar>
Scalar trace_distance(const FockMatrixT<Scalar>& rho1, const FockMatrixT<Scalar>& rho2,
                      Scalar trace_tol = Scalar(1e-6)) {
  if (rho1.rows() != rho2.rows())
    throw ValidationError("trace_distance: dimensions differ");
  require_density(rho1, "trace_distance(rho1)", trace_tol);
  require_density(rho2, "trace_distance(rho2)", trace_tol);
  const FockMatrixT<Scalar> diff = rho1 - rho2;
  return std::clamp(hermitian_eigenvalues(diff).cwiseAbs().sum() / Scalar(2), Scalar(0), Scalar(1));
}

// (1/2) Tr |A| for any Hermitian A, without density checks
template <class Scalar>
Scalar half_trace_norm(const FockMatrixT<Scalar>& a) {
  return hermitian_eigenvalues(a).cwiseAbs().sum() / Scalar(2);
}

}  // namespace phasefilter
