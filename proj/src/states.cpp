#include "phasefilter/states.hpp"

#include <cmath>
#include <sstream>

namespace phasefilter {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double cat_norm2(const state::Cat& c) {
  return 1.0 / (2.0 * (1.0 + c.parity * std::exp(-2.0 * std::norm(c.amplitude))));
}

// <beta|delta> for coherent states
cplx coherent_overlap(cplx beta, cplx delta) {
  return std::exp(-0.5 * std::norm(beta) - 0.5 * std::norm(delta) + std::conj(beta) * delta);
}

// <beta|D(xi)|gamma>
cplx coherent_displacement_element(cplx beta, cplx xi, cplx gamma) {
  const cplx phase = std::exp(0.5 * (xi * std::conj(gamma) - std::conj(xi) * gamma));
  return phase * coherent_overlap(beta, xi + gamma);
}

FockVector squeezed_vector(const state::Squeezed& s, int dim) {
  FockVector v = FockVector::Zero(dim);
  if (s.r == 0.0) {
    v(0) = 1.0;
    return v;
  }
  const double t = std::tanh(std::abs(s.r));
  // negative r is the same as r -> |r|, phase -> phase + pi
  const double phase = s.phase + (s.r < 0.0 ? pi : 0.0);
  const double log_pref = -0.5 * std::log(std::cosh(s.r));
  for (int m = 0; 2 * m < dim; ++m) {
    const double logmag = log_pref + m * std::log(0.5 * t) + 0.5 * std::lgamma(2.0 * m + 1.0) -
                          std::lgamma(m + 1.0);
    v(2 * m) = std::polar(std::exp(logmag), m * (phase + pi));
  }
  return v;
}

FockVector cat_vector(const state::Cat& c, int dim) {
  const FockVector plus = coherent_vector<double>(c.amplitude, dim);
  const FockVector minus = coherent_vector<double>(-c.amplitude, dim);
  return std::sqrt(cat_norm2(c)) * (plus + static_cast<double>(c.parity) * minus);
}

void require_numeric(const state::Numeric& s) {
  require_density(s.rho, "Numeric state");
}

}  // namespace

void validate(const StateSpec& s) {
  std::visit(overloaded{
                 [](const state::Vacuum&) {},
                 [](const state::Coherent& c) {
                   if (!std::isfinite(c.amplitude.real()) || !std::isfinite(c.amplitude.imag()))
                     throw ValidationError("Coherent: non-finite amplitude");
                 },
                 [](const state::Fock& f) {
                   if (f.n < 0) throw ValidationError("Fock: n must be nonnegative");
                 },
                 [](const state::Thermal& t) {
                   if (!(t.nbar >= 0.0) || !std::isfinite(t.nbar))
                     throw ValidationError("Thermal: nbar must be a nonnegative real");
                 },
                 [](const state::Squeezed& q) {
                   if (!std::isfinite(q.r) || !std::isfinite(q.phase))
                     throw ValidationError("Squeezed: non-finite parameters");
                 },
                 [](const state::Cat& c) {
                   if (c.parity != 1 && c.parity != -1)
                     throw ValidationError("Cat: parity must be +1 or -1");
                   if (c.parity == -1 && std::abs(c.amplitude) == 0.0)
                     throw ValidationError("Cat: odd cat with zero amplitude is not normalizable");
                 },
                 [](const state::Numeric& n) { require_numeric(n); },
             },
             s);
}

std::string describe(const StateSpec& s) {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const state::Vacuum&) { os << "vacuum"; },
                 [&](const state::Coherent& c) {
                   os << "coherent:re=" << format_number(c.amplitude.real()) << ",im=" << format_number(c.amplitude.imag());
                 },
                 [&](const state::Fock& f) { os << "fock:n=" << f.n; },
                 [&](const state::Thermal& t) { os << "thermal:nbar=" << format_number(t.nbar); },
                 [&](const state::Squeezed& q) { os << "squeezed:r=" << format_number(q.r) << ",phase=" << format_number(q.phase); },
                 [&](const state::Cat& c) {
                   os << "cat:re=" << format_number(c.amplitude.real()) << ",im=" << format_number(c.amplitude.imag())
                      << ",parity=" << c.parity;
                 },
                 [&](const state::Numeric& n) { os << "numeric:dim=" << n.rho.rows(); },
             },
             s);
  return os.str();
}

cplx charfn_eval(const StateSpec& s, PhasePoint p) {
  require_finite(p, "charfn_eval");
  const cplx xi = p.z();
  const double x = std::norm(xi);
  return std::visit(
      overloaded{
          [&](const state::Vacuum&) -> cplx { return std::exp(-0.5 * x); },
          [&](const state::Coherent& c) -> cplx {
            const cplx a = c.amplitude;
            return std::exp(-0.5 * x + xi * std::conj(a) - std::conj(xi) * a);
          },
          [&](const state::Fock& f) -> cplx {
            return std::exp(-0.5 * x) * laguerre<double>(f.n, 0, x);
          },
          [&](const state::Thermal& t) -> cplx { return std::exp(-0.5 * (1.0 + 2.0 * t.nbar) * x); },
          [&](const state::Squeezed& q) -> cplx {
            const cplx w =
                xi * std::cosh(q.r) + std::conj(xi) * std::polar(std::sinh(q.r), q.phase);
            return std::exp(-0.5 * std::norm(w));
          },
          [&](const state::Cat& c) -> cplx {
            const cplx a = c.amplitude;
            const double p2 = static_cast<double>(c.parity);
            const cplx sum = coherent_displacement_element(a, xi, a) +
                             coherent_displacement_element(-a, xi, -a) +
                             p2 * coherent_displacement_element(a, xi, -a) +
                             p2 * coherent_displacement_element(-a, xi, a);
            return cat_norm2(c) * sum;
          },
          [&](const state::Numeric& n) -> cplx {
            require_numeric(n);
            const int dim = static_cast<int>(n.rho.rows());
            const FockMatrix d = displacement_block<double>(xi, dim, dim);
            // Tr[rho D] = sum_{m,n} rho(n,m) D(m,n)
            return n.rho.transpose().cwiseProduct(d).sum();
          },
      },
      s);
}

CharFn characteristic_function(const StateSpec& s) {
  validate(s);
  CharFn f;
  f.evaluator = [s](cplx xi) { return charfn_eval(s, PhasePoint(xi)); };
  f.kind = std::holds_alternative<state::Numeric>(s) ? CharFnKind::numeric_from_fock
                                                     : CharFnKind::analytic_catalog;
  f.decay = DecayClass::gaussian_dominated;
  f.angular_bandwidth = support_dim(s);
  return f;
}

std::vector<double> photon_distribution(const StateSpec& s, int n_max) {
  const int dim = n_max + 1;
  return std::visit(overloaded{
                        [&](const state::Thermal& t) {
                          std::vector<double> p(dim);
                          const double q = t.nbar / (1.0 + t.nbar);
                          double v = 1.0 / (1.0 + t.nbar);
                          for (int n = 0; n < dim; ++n) {
                            p[n] = v;
                            v *= q;
                          }
                          return p;
                        },
                        [&](const state::Numeric& num) {
                          std::vector<double> p(dim, 0.0);
                          for (int n = 0; n < dim && n < num.rho.rows(); ++n)
                            p[n] = num.rho(n, n).real();
                          return p;
                        },
                        [&](const auto&) {
                          const FockVector v = pure_vector(s, dim);
                          std::vector<double> p(dim);
                          for (int n = 0; n < dim; ++n) p[n] = std::norm(v(n));
                          return p;
                        },
                    },
                    s);
}

double truncation_leakage(const StateSpec& s, int dim) {
  if (const auto* num = std::get_if<state::Numeric>(&s)) {
    if (dim >= num->rho.rows()) return 0.0;
    const double tr = num->rho.trace().real();
    double kept = 0.0;
    for (int n = 0; n < dim; ++n) kept += num->rho(n, n).real();
    return tr - kept;
  }
  if (const auto* t = std::get_if<state::Thermal>(&s)) {
    // geometric tail, exact
    return std::pow(t->nbar / (1.0 + t->nbar), dim);
  }
  const std::vector<double> p = photon_distribution(s, dim - 1);
  double kept = 0.0;
  for (double v : p) kept += v;
  return std::max(0.0, 1.0 - kept);
}

int support_dim(const StateSpec& s, double tol, int cap) {
  if (const auto* num = std::get_if<state::Numeric>(&s)) return static_cast<int>(num->rho.rows());
  if (const auto* f = std::get_if<state::Fock>(&s)) return f->n + 1;
  if (std::holds_alternative<state::Vacuum>(s)) return 1;
  int dim = 8;
  while (dim < cap && truncation_leakage(s, dim) >= tol) dim = dim + dim / 2;
  // shrink back to the smallest passing size
  int lo = std::max(1, dim * 2 / 3 - 1), hi = std::min(dim, cap);
  while (lo < hi) {
    const int mid = (lo + hi) / 2;
    if (truncation_leakage(s, mid) < tol)
      hi = mid;
    else
      lo = mid + 1;
  }
  return hi;
}

double mean_photon_number(const StateSpec& s) {
  return std::visit(overloaded{
                        [](const state::Vacuum&) { return 0.0; },
                        [](const state::Coherent& c) { return std::norm(c.amplitude); },
                        [](const state::Fock& f) { return static_cast<double>(f.n); },
                        [](const state::Thermal& t) { return t.nbar; },
                        [](const state::Squeezed& q) { return std::pow(std::sinh(q.r), 2); },
                        [](const state::Cat& c) {
                          const double a2 = std::norm(c.amplitude);
                          const double e = std::exp(-2.0 * a2);
                          return a2 * (1.0 - c.parity * e) / (1.0 + c.parity * e);
                        },
                        [](const state::Numeric& n) {
                          double acc = 0.0;
                          for (Eigen::Index k = 0; k < n.rho.rows(); ++k)
                            acc += k * n.rho(k, k).real();
                          return acc;
                        },
                    },
                    s);
}

bool is_pure(const StateSpec& s) {
  if (const auto* t = std::get_if<state::Thermal>(&s)) return t->nbar == 0.0;
  if (const auto* n = std::get_if<state::Numeric>(&s)) {
    const double purity = (n->rho * n->rho).trace().real();
    const double tr = n->rho.trace().real();
    return std::abs(purity - tr * tr) < 1e-10;
  }
  return true;
}

FockVector pure_vector(const StateSpec& s, int dim) {
  if (dim < 1) throw DomainError("pure_vector: dim must be >= 1");
  return std::visit(
      overloaded{
          [&](const state::Vacuum&) {
            FockVector v = FockVector::Zero(dim);
            v(0) = 1.0;
            return v;
          },
          [&](const state::Coherent& c) { return coherent_vector<double>(c.amplitude, dim); },
          [&](const state::Fock& f) {
            FockVector v = FockVector::Zero(dim);
            if (f.n < dim) v(f.n) = 1.0;
            return v;
          },
          [&](const state::Thermal& t) -> FockVector {
            if (t.nbar != 0.0) throw DomainError("pure_vector: thermal state is mixed");
            FockVector v = FockVector::Zero(dim);
            v(0) = 1.0;
            return v;
          },
          [&](const state::Squeezed& q) { return squeezed_vector(q, dim); },
          [&](const state::Cat& c) { return cat_vector(c, dim); },
          [&](const state::Numeric& n) -> FockVector {
            if (!is_pure(s)) throw DomainError("pure_vector: numeric state is mixed");
            Eigen::SelfAdjointEigenSolver<FockMatrix> es(hermitize(n.rho));
            const Eigen::Index top = n.rho.rows() - 1;
            FockVector v = FockVector::Zero(dim);
            const Eigen::Index k = std::min<Eigen::Index>(dim, n.rho.rows());
            v.head(k) = std::sqrt(es.eigenvalues()(top)) * es.eigenvectors().col(top).head(k);
            return v;
          },
      },
      s);
}

FockMatrix to_fock(const StateSpec& s, int dim) {
  if (dim < 1) throw DomainError("to_fock: dim must be >= 1");
  validate(s);
  if (const auto* t = std::get_if<state::Thermal>(&s)) {
    const std::vector<double> p = photon_distribution(s, dim - 1);
    FockMatrix m = FockMatrix::Zero(dim, dim);
    for (int n = 0; n < dim; ++n) m(n, n) = p[n];
    (void)t;
    return m;
  }
  if (const auto* num = std::get_if<state::Numeric>(&s)) {
    FockMatrix m = FockMatrix::Zero(dim, dim);
    const Eigen::Index k = std::min<Eigen::Index>(dim, num->rho.rows());
    m.topLeftCorner(k, k) = num->rho.topLeftCorner(k, k);
    return m;
  }
  const FockVector v = pure_vector(s, dim);
  return v * v.adjoint();
}

bool is_radially_symmetric(const StateSpec& s) {
  if (std::holds_alternative<state::Vacuum>(s) || std::holds_alternative<state::Fock>(s) ||
      std::holds_alternative<state::Thermal>(s))
    return true;
  if (const auto* c = std::get_if<state::Coherent>(&s)) return std::abs(c->amplitude) == 0.0;
  if (const auto* q = std::get_if<state::Squeezed>(&s)) return q->r == 0.0;
  if (const auto* n = std::get_if<state::Numeric>(&s)) {
    const FockMatrix off = n->rho - FockMatrix(n->rho.diagonal().asDiagonal());
    return off.cwiseAbs().maxCoeff() < 1e-14;
  }
  return false;
}

double husimi_q(const StateSpec& s, PhasePoint alpha) {
  require_finite(alpha, "husimi_q");
  return husimi_evaluator(s)(alpha.z());
}

}  // namespace phasefilter

namespace phasefilter {

std::optional<GaussianMoments> gaussian_moments(const StateSpec& s) {
  GaussianMoments g;
  g.mean.setZero();
  g.cov = Eigen::Matrix2d::Identity() / 4.0;
  if (std::holds_alternative<state::Vacuum>(s)) return g;
  if (const auto* c = std::get_if<state::Coherent>(&s)) {
    g.mean << c->amplitude.real(), c->amplitude.imag();
    return g;
  }
  if (const auto* t = std::get_if<state::Thermal>(&s)) {
    g.cov *= 1.0 + 2.0 * t->nbar;
    return g;
  }
  if (const auto* q = std::get_if<state::Squeezed>(&s)) {
    const double ch = std::cosh(2.0 * q->r), sh = std::sinh(2.0 * q->r);
    g.cov << ch - sh * std::cos(q->phase), -sh * std::sin(q->phase), -sh * std::sin(q->phase),
        ch + sh * std::cos(q->phase);
    g.cov /= 4.0;
    return g;
  }
  if (const auto* f = std::get_if<state::Fock>(&s); f && f->n == 0) return g;
  return std::nullopt;
}

double wigner(const StateSpec& s, PhasePoint alpha) {
  require_finite(alpha, "wigner");
  if (const auto g = gaussian_moments(s)) {
    const Eigen::Vector2d d = Eigen::Vector2d(alpha.re, alpha.im) - g->mean;
    const double q = d.dot(g->cov.inverse() * d);
    return std::exp(-0.5 * q) / (2.0 * pi * std::sqrt(g->cov.determinant()));
  }
  if (const auto* f = std::get_if<state::Fock>(&s)) {
    const double x = alpha.norm2();
    const double sign = (f->n % 2 == 0) ? 1.0 : -1.0;
    return sign * (2.0 / pi) * std::exp(-2.0 * x) * laguerre<double>(f->n, 0, 4.0 * x);
  }
  const int dim = support_dim(s);
  const double a = alpha.abs();
  const int rows = dim + static_cast<int>(std::ceil(a * a + 12.0 * a * std::sqrt(dim + 1.0) + 40.0));
  const FockMatrix b = displacement_block<double>(-alpha.z(), rows, dim);
  Eigen::VectorXd pop(rows);
  if (is_pure(s) && !std::holds_alternative<state::Numeric>(s)) {
    pop = (b * pure_vector(s, dim)).cwiseAbs2();
  } else {
    const FockMatrix rho = to_fock(s, dim);
    pop = (b * rho * b.adjoint()).diagonal().real();
  }
  double acc = 0.0;
  for (int k = 0; k < rows; ++k) acc += (k % 2 == 0 ? 1.0 : -1.0) * pop(k);
  return 2.0 / pi * acc;
}

std::function<double(cplx)> husimi_evaluator(const StateSpec& s) {
  validate(s);
  if (std::holds_alternative<state::Vacuum>(s))
    return [](cplx a) { return std::exp(-std::norm(a)) / pi; };
  if (const auto* c = std::get_if<state::Coherent>(&s)) {
    const cplx a0 = c->amplitude;
    return [a0](cplx a) { return std::exp(-std::norm(a - a0)) / pi; };
  }
  if (const auto* t = std::get_if<state::Thermal>(&s)) {
    const double w = 1.0 + t->nbar;
    return [w](cplx a) { return std::exp(-std::norm(a) / w) / (pi * w); };
  }
  if (const auto* f = std::get_if<state::Fock>(&s)) {
    const int n = f->n;
    const double lf = std::lgamma(n + 1.0);
    return [n, lf](cplx a) {
      const double x = std::norm(a);
      if (x == 0.0) return n == 0 ? 1.0 / pi : 0.0;
      return std::exp(n * std::log(x) - x - lf) / pi;
    };
  }
  const int dim = support_dim(s);
  if (const auto* num = std::get_if<state::Numeric>(&s); num || !is_pure(s)) {
    const FockMatrix rho = to_fock(s, dim);
    return [rho, dim](cplx a) {
      const FockVector c = coherent_vector<double>(a, dim);
      return (c.adjoint() * rho * c)(0, 0).real() / pi;
    };
  }
  const FockVector v = pure_vector(s, dim);
  return [v, dim](cplx a) {
    // <alpha|v> = e^{-|a|^2/2} sum_n v_n (a*)^n / sqrt(n!)
    const cplx ac = std::conj(a);
    cplx term(1.0, 0.0), acc(0.0, 0.0);
    for (int n = 0; n < dim; ++n) {
      acc += v(n) * term;
      term *= ac / std::sqrt(n + 1.0);
    }
    return std::exp(-std::norm(a)) * std::norm(acc) / pi;
  };
}

double tmsv_displaced_overlap(PhasePoint gamma, double chi) {
  require_finite(gamma, "tmsv_displaced_overlap");
  if (!(chi >= 0.0 && chi < 1.0)) throw DomainError("tmsv_displaced_overlap: need 0 <= chi < 1");
  const double g2 = gamma.norm2();
  return std::exp(-0.5 * g2 - chi * chi * g2 / (1.0 - chi * chi));
}

double tmsv_displaced_overlap_fock(PhasePoint gamma, double chi, int dim) {
  require_finite(gamma, "tmsv_displaced_overlap_fock");
  if (!(chi >= 0.0 && chi < 1.0)) throw DomainError("tmsv_displaced_overlap: need 0 <= chi < 1");
  const std::vector<double> lag = laguerre_sequence<double>(dim - 1, 0, gamma.norm2());
  double acc = 0.0, w = 1.0;
  for (int n = 0; n < dim; ++n) {
    acc += w * lag[n];
    w *= chi * chi;
  }
  return (1.0 - chi * chi) * std::exp(-0.5 * gamma.norm2()) * acc;
}

}  // namespace phasefilter
