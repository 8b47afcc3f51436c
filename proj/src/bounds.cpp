#include "phasefilter/bounds.hpp"

#include <cmath>
#include <sstream>

#include "phasefilter/parallel.hpp"
#include "phasefilter/quadrature.hpp"

namespace phasefilter {

namespace {

// int_0^R rho drho int dphi g(rho e^{i phi}) with Gauss-Legendre panels in rho
// and the trapezoid rule in phi
double polar_integral(const std::function<double(cplx)>& g, double R, int panels, int n_angles) {
  const QuadratureRule rule = composite_gauss_legendre(0.0, R, panels);
  std::vector<double> part(rule.size());
  parallel_for(static_cast<int>(rule.size()), [&](int i) {
    const double r = rule.x[i];
    double acc = 0.0;
    for (int a = 0; a < n_angles; ++a) acc += g(std::polar(r, 2.0 * pi * a / n_angles));
    part[i] = rule.w[i] * r * acc * (2.0 * pi / n_angles);
  });
  double total = 0.0;
  for (double p : part) total += p;
  return total;
}

struct Quad {
  double value;
  double error;
};

Quad fidelity_quadrature(const CharFn& phi, const Filter& filter, double tol) {
  auto g = [&](cplx a) { return filter.fourier(a) * std::norm(phi.at(a)); };
  auto ring = [&](double r) {
    double best = 0.0;
    for (int k = 0; k < 64; ++k) best = std::max(best, std::abs(g(std::polar(r, 2.0 * pi * (k + 0.5) / 64))));
    return r * best;
  };
  const double fr = filter.fourier_radius();
  const double step = std::min(0.25, fr / 64.0);
  const auto decay = decay_radius(ring, 1e-17, 80.0, step, 8.0 * step);
  double R = decay ? std::min(*decay, 80.0) : 80.0;
  R = std::max(R, 4.0 * step);
  int panels = std::max(8, static_cast<int>(std::ceil(R / std::min(0.25, fr / 32.0))));
  int n_angles = 4 * std::max(phi.angular_bandwidth, 1) + 32;
  if (!filter.is_radial()) n_angles *= 2;
  double prev = polar_integral(g, R, panels, n_angles);
  for (int level = 0; level < 6; ++level) {
    panels *= 2;
    n_angles *= 2;
    const double cur = polar_integral(g, R, panels, n_angles);
    const double err = std::abs(cur - prev);
    if (err <= tol) return {cur, err};
    prev = cur;
  }
  throw QuadratureError("entanglement_fidelity: quadrature did not converge");
}

}  // namespace

FidelityCertificate entanglement_fidelity(const StateSpec& state, const Filter& filter,
                                          const FidelityOptions& opt) {
  const CharFn phi = characteristic_function(state);
  FidelityCertificate cert;
  cert.method = opt.method;
  cert.width_used = filter.width();
  if (opt.method == FidelityMethod::quadrature) {
    const Quad q = fidelity_quadrature(phi, filter, opt.tol);
    cert.f_e = q.value;
    cert.error_estimate = q.error;
  } else {
    if (opt.n_samples < 2) throw DomainError("entanglement_fidelity: need at least 2 samples");
    const int chunks = 64;
    std::vector<double> s1(chunks, 0.0), s2(chunks, 0.0);
    parallel_for(chunks, [&](int c) {
      FilterSampler sampler = filter_sampler(filter, derive_seed(opt.seed, static_cast<std::uint64_t>(c)));
      const long count = opt.n_samples / chunks + (c < opt.n_samples % chunks ? 1 : 0);
      for (long i = 0; i < count; ++i) {
        const double v = std::norm(phi(sampler.next()));
        s1[c] += v;
        s2[c] += v * v;
      }
    });
    double a = 0.0, b = 0.0;
    for (int c = 0; c < chunks; ++c) {
      a += s1[c];
      b += s2[c];
    }
    const double n = static_cast<double>(opt.n_samples);
    const double mean = a / n;
    const double var = std::max(0.0, b / n - mean * mean) * n / (n - 1.0);
    cert.f_e = mean;
    cert.error_estimate = std::sqrt(var / n);
    cert.n_samples = opt.n_samples;
    cert.seed = opt.seed;
  }
  cert.trace_distance_bound = std::sqrt(std::max(0.0, 1.0 - cert.f_e));
  return cert;
}

PureFidelity pure_state_fidelity_exact(const StateSpec& state, const Filter& filter, int dim) {
  validate(state);
  if (!is_pure(state)) throw DomainError("pure_state_fidelity_exact: input state is mixed");
  PureFidelity out;
  out.integral = entanglement_fidelity(state, filter).f_e;
  const FockMatrix rho = apply_filter_fock(state, filter, dim).fock;
  const FockVector psi = pure_vector(state, dim);
  out.fock = (psi.adjoint() * rho * psi)(0, 0).real();
  return out;
}

namespace {

BoundReport bound_report(const StateSpec& state, const Filter& filter, int dim, double tol) {
  if (!filter.has_density_transform())
    throw UnphysicalFilterError("bound checks need a CPTP filter; " + filter.describe() +
                                " is not one");
  BoundReport rep;
  rep.tolerance = tol;
  rep.f_e = entanglement_fidelity(state, filter).f_e;
  const FockMatrix rho = to_fock(state, dim);
  const FilteredState out = apply_filter_fock(state, filter, dim);
  rep.leakage = std::max(truncation_leakage(state, dim), 1.0 - out.fock.trace().real());
  if (rep.leakage > 1e-6)
    throw TruncationError("bound check: " + std::to_string(rep.leakage) + " of the population lies beyond dim " +
                          std::to_string(dim) + "; raise dim");
  rep.fidelity = fidelity<double>(rho, out.fock);
  rep.trace_distance = trace_distance<double>(rho, out.fock);
  rep.bound = std::sqrt(std::max(0.0, 1.0 - rep.f_e));
  rep.fidelity_slack = rep.fidelity - rep.f_e;
  rep.distance_slack = rep.bound - rep.trace_distance;
  rep.holds = rep.fidelity_slack >= -tol && rep.distance_slack >= -tol;
  return rep;
}

}  // namespace

BoundReport fidelity_bound_check(const StateSpec& state, const Filter& filter, int dim, double tol) {
  BoundReport r = bound_report(state, filter, dim, tol);
  r.holds = r.fidelity_slack >= -tol;
  return r;
}

BoundReport trace_distance_bound_check(const StateSpec& state, const Filter& filter, int dim,
                                       double tol) {
  BoundReport r = bound_report(state, filter, dim, tol);
  r.holds = r.distance_slack >= -tol;
  return r;
}

FilterFamily nonclassicality_family(double q) {
  FilterFamily f;
  std::ostringstream os;
  os << "noncl:q=" << q;
  f.name = os.str();
  f.make = [q](double L) { return Filter::nonclassicality(L, q); };
  f.width = [](const Filter& x) { return *x.width(); };
  return f;
}

FilterFamily gaussian_family() {
  FilterFamily f;
  f.name = "gaussian";
  f.make = [](double w) { return Filter::gaussian(1.0 / w); };
  f.width = [](const Filter& x) { return *x.width(); };
  return f;
}

WidthSolution solve_width(const StateSpec& state, const FilterFamily& family, double epsilon,
                          const WidthSearchOptions& opt) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw DomainError("solve_width: epsilon must lie in (0, 1]");
  const double target = 1.0 - epsilon;
  const double lowest = 1.0 / opt.cap;
  WidthSolution sol;
  auto fe = [&](double w) {
    ++sol.evaluations;
    return entanglement_fidelity(state, family.make(w));
  };
  auto finish = [&](double w, FidelityCertificate c) {
    sol.width = w;
    c.epsilon_target = epsilon;
    c.width_used = w;
    sol.certificate = c;
    return sol;
  };
  if (target <= 0.0) return finish(lowest, fe(lowest));

  double w = opt.start;
  FidelityCertificate cw = fe(w);
  double lo, hi;
  FidelityCertificate chi;
  if (cw.f_e >= target) {
    hi = w;
    chi = cw;
    for (;;) {
      if (hi / 2.0 < lowest) return finish(hi, chi);
      const FidelityCertificate c = fe(hi / 2.0);
      if (c.f_e < target) {
        lo = hi / 2.0;
        break;
      }
      hi /= 2.0;
      chi = c;
    }
  } else {
    lo = w;
    for (;;) {
      if (2.0 * lo > opt.cap)
        throw SearchError(lo, "solve_width: target fidelity not reached below width cap " +
                                  std::to_string(opt.cap));
      const FidelityCertificate c = fe(2.0 * lo);
      if (c.f_e >= target) {
        hi = 2.0 * lo;
        chi = c;
        break;
      }
      lo *= 2.0;
    }
  }
  for (int i = 0; i < opt.bisections; ++i) {
    const double mid = 0.5 * (lo + hi);
    const FidelityCertificate c = fe(mid);
    if (c.f_e >= target) {
      hi = mid;
      chi = c;
    } else {
      lo = mid;
    }
  }
  return finish(hi, chi);
}

}  // namespace phasefilter
