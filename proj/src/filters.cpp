#include "phasefilter/filters.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "phasefilter/quadrature.hpp"

namespace phasefilter {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// f(x) = x^4 e^{-1/x^2} exceeds this well inside the cutoff used for g
constexpr double klauder_margin = 2.7;

double klauder_f(double x) { return x > 0.0 ? x * x * x * x * std::exp(-1.0 / (x * x)) : 0.0; }

// w_1 is negligible (< e^{-40}) beyond this radius
double mother_radius(double q) { return std::pow(40.0, 1.0 / q); }

double mother_norm(double q) {
  return std::pow(2.0, 1.0 / q) * std::sqrt(q / (2.0 * pi * std::tgamma(2.0 / q)));
}

// |x|^q from x^2, with the common integer exponents done by hand
double pow_q_sq(double x2, double q) {
  if (q == 2.0) return x2;
  if (q == 3.0) return x2 * std::sqrt(x2);
  if (q == 4.0) return x2 * x2;
  return std::pow(x2, 0.5 * q);
}

// Omega_1(t) = int w(xi') w(xi' + t) d^2 xi' in polar coordinates around the origin
double noncl_autocorrelation(double t, double q) {
  const double c = mother_norm(q);
  const double R = mother_radius(q);
  static const QuadratureRule phi_rule = composite_gauss_legendre(0.0, pi, 6);
  const QuadratureRule rho_rule = composite_gauss_legendre(0.0, R, 14);
  double acc = 0.0;
  for (std::size_t i = 0; i < rho_rule.size(); ++i) {
    const double r = rho_rule.x[i];
    const double wr = std::exp(-pow_q_sq(r * r, q));
    double ang = 0.0;
    for (std::size_t j = 0; j < phi_rule.size(); ++j) {
      const double d2 = r * r + t * t + 2.0 * r * t * std::cos(phi_rule.x[j]);
      ang += phi_rule.w[j] * std::exp(-pow_q_sq(std::max(d2, 0.0), q));
    }
    acc += rho_rule.w[i] * r * wr * 2.0 * ang;
  }
  return c * c * acc;
}

struct NonclTables {
  RadialProfile filter;
  RadialProfile mother_fourier;
  bool filter_ready = false;
  bool fourier_ready = false;
  // radial CDF of 2 pi rho Omega~_1(rho)
  std::shared_ptr<std::vector<double>> radii, cdf;
  double tail_mass = 0.0;
};

std::mutex noncl_mutex;
std::map<double, NonclTables>& noncl_cache() {
  static std::map<double, NonclTables> cache;
  return cache;
}

double mother_fourier_direct(double rho, double q) {
  const double c = mother_norm(q);
  // w~(rho) = (2/pi) int w(t) J0(2 rho t) t dt
  return (2.0 / pi) * hankel_j0([&](double t) { return c * std::exp(-std::pow(t, q)); },
                                2.0 * rho, mother_radius(q), 0.125);
}

constexpr int fourier_knots = 4096;

void build_fourier(NonclTables& tab, double q) {
  // extend the table until the transform mass outside it is below 1e-9
  double R = 8.0;
  for (int attempt = 0;; ++attempt) {
    tab.mother_fourier = RadialProfile::sample([&](double r) { return mother_fourier_direct(r, q); },
                                               R, fourier_knots, 0.0, 0.0);
    const std::vector<double>& v = tab.mother_fourier.values();
    const double h = tab.mother_fourier.spacing();
    auto density = [&](double r) {
      const double w = tab.mother_fourier(r);
      return 2.0 * pi * r * pi * pi * w * w;
    };
    auto radii = std::make_shared<std::vector<double>>(v.size());
    auto cdf = std::make_shared<std::vector<double>>(v.size(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) (*radii)[i] = i * h;
    for (std::size_t i = 1; i < v.size(); ++i) {
      const double a = (i - 1) * h, b = i * h;
      (*cdf)[i] = (*cdf)[i - 1] + h / 6.0 * (density(a) + 4.0 * density(0.5 * (a + b)) + density(b));
    }
    const double total = cdf->back();
    tab.tail_mass = std::max(0.0, 1.0 - total);
    if (tab.tail_mass < 1e-9 || attempt == 4) {
      for (double& x : *cdf) x /= total;
      tab.radii = radii;
      tab.cdf = cdf;
      tab.fourier_ready = true;
      return;
    }
    R *= 2.0;
  }
}

NonclTables& noncl_tables(double q, bool need_filter) {
  std::lock_guard<std::mutex> lock(noncl_mutex);
  NonclTables& tab = noncl_cache()[q];
  if (!tab.fourier_ready) build_fourier(tab, q);
  if (need_filter && !tab.filter_ready) {
    const double r_max = 2.0 * mother_radius(q) + 0.5;
    auto f = [q](double t) { return noncl_autocorrelation(t, q); };
    RadialProfile raw = RadialProfile::sample(f, r_max, 1025, 0.0, 0.0);
    const double norm = raw.values().front();
    std::vector<double> vals = raw.values();
    for (double& x : vals) x /= norm;
    tab.filter = RadialProfile(std::move(vals), r_max, 0.0, 0.0);
    tab.filter.estimate_interpolation_error([&](double t) { return f(t) / norm; });
    tab.filter_ready = true;
  }
  return tab;
}

double gaussian_wigner_density(const GaussianMoments& g, double x, double y) {
  const Eigen::Vector2d d = Eigen::Vector2d(x, y) - g.mean;
  return std::exp(-0.5 * d.dot(g.cov.inverse() * d)) / (2.0 * pi * std::sqrt(g.cov.determinant()));
}

bool parity_even(const StateSpec& s) {
  if (const auto* c = std::get_if<state::Coherent>(&s)) return std::abs(c->amplitude) == 0.0;
  if (const auto* n = std::get_if<state::Numeric>(&s)) {
    for (Eigen::Index i = 0; i < n->rho.rows(); ++i)
      for (Eigen::Index j = 0; j < n->rho.cols(); ++j)
        if ((i + j) % 2 == 1 && std::abs(n->rho(i, j)) > 1e-14) return false;
    return true;
  }
  return true;
}

}  // namespace

double noncl_mother(double t, double q) { return mother_norm(q) * std::exp(-std::pow(std::abs(t), q)); }

const RadialProfile& noncl_filter_profile(double q) { return noncl_tables(q, true).filter; }

const RadialProfile& noncl_mother_fourier_profile(double q) {
  return noncl_tables(q, false).mother_fourier;
}

double klauder_factor(double u, double L) { return std::exp(-klauder_f(u - L) - klauder_f(-u - L)); }

double klauder_cosine_transform(double k, double L) {
  const double U = L + klauder_margin;
  double width = 0.125;
  if (k > 0.0) width = std::min(width, 4.0 / k);
  const int panels = std::max(8, static_cast<int>(std::ceil(U / width)));
  const QuadratureRule rule = composite_gauss_legendre(0.0, U, panels);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i)
    acc += rule.w[i] * klauder_factor(rule.x[i], L) * std::cos(k * rule.x[i]);
  return 2.0 * acc;
}

struct Filter::Impl {
  // kernel filters
  CharFn kernel_phi;
  std::optional<GaussianMoments> kernel_moments;
  double kernel_support = 0.0;
  // Klauder: g on a fixed rule, reused for every transform with k below k_rule
  QuadratureRule klauder_rule;
  std::vector<double> klauder_g;
  double klauder_k_max = 0.0;
  // nonclassicality tables, shared per q; the autocorrelation is built on first use
  const RadialProfile* noncl_fourier = nullptr;
  mutable std::atomic<const RadialProfile*> noncl_filter{nullptr};
};

Filter::Filter(FilterSpec spec) : spec_(std::move(spec)) {
  auto impl = std::make_shared<Impl>();
  std::visit(overloaded{
                 [&](const filter::Gaussian& g) {
                   if (!(g.r > 0.0) || !std::isfinite(g.r))
                     throw ValidationError("Gaussian filter: r must be positive");
                 },
                 [&](const filter::Nonclassicality& n) {
                   if (!(n.L > 0.0) || !std::isfinite(n.L))
                     throw ValidationError("Nonclassicality filter: L must be positive");
                   if (!(n.q >= 2.0) || !std::isfinite(n.q))
                     throw ValidationError("Nonclassicality filter: q must be >= 2");
                   impl->noncl_fourier = &noncl_mother_fourier_profile(n.q);
                 },
                 [&](const filter::Klauder& k) {
                   if (!(k.L > 0.0) || !std::isfinite(k.L))
                     throw ValidationError("Klauder filter: L must be positive");
                   const double U = k.L + klauder_margin;
                   impl->klauder_rule = composite_gauss_legendre(0.0, U, std::max(8, int(std::ceil(U / 0.0625))));
                   impl->klauder_k_max = 4.0 / 0.0625;
                   for (double u : impl->klauder_rule.x) impl->klauder_g.push_back(klauder_factor(u, k.L));
                 },
                 [&](const filter::SmoothingKernel& k) {
                   impl->kernel_phi = characteristic_function(k.kernel);
                   impl->kernel_moments = gaussian_moments(k.kernel);
                   const auto r = decay_radius(
                       [&](double t) { return ring_max_abs(impl->kernel_phi.evaluator, t); }, 1e-15,
                       80.0);
                   impl->kernel_support = r ? *r : std::numeric_limits<double>::infinity();
                 },
                 [&](const filter::NarcowichCounterexample&) {},
             },
             spec_);
  impl_ = impl;
}

std::string Filter::describe() const {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const filter::Gaussian& g) { os << "gaussian:r=" << format_number(g.r); },
                 [&](const filter::Nonclassicality& n) { os << "noncl:L=" << format_number(n.L) << ",q=" << format_number(n.q); },
                 [&](const filter::Klauder& k) { os << "klauder:L=" << format_number(k.L); },
                 [&](const filter::SmoothingKernel& k) {
                   os << "kernel:state=" << phasefilter::describe(k.kernel);
                 },
                 [&](const filter::NarcowichCounterexample&) { os << "narcowich-ce"; },
             },
             spec_);
  return os.str();
}

cplx Filter::eval(cplx xi) const {
  return std::visit(
      overloaded{
          [&](const filter::Gaussian& g) -> cplx { return std::exp(-0.5 * g.r * std::norm(xi)); },
          [&](const filter::Nonclassicality& n) -> cplx {
            const RadialProfile* p = impl_->noncl_filter.load(std::memory_order_acquire);
            if (!p) {
              p = &noncl_filter_profile(n.q);
              impl_->noncl_filter.store(p, std::memory_order_release);
            }
            return (*p)(std::abs(xi) / n.L);
          },
          [&](const filter::Klauder& k) -> cplx {
            const CanonicalCoords c = to_canonical(xi);
            return klauder_factor(c.u, k.L) * klauder_factor(c.v, k.L);
          },
          [&](const filter::SmoothingKernel&) -> cplx { return impl_->kernel_phi.at(xi); },
          [&](const filter::NarcowichCounterexample&) -> cplx {
            const double x = std::norm(xi);
            return (1.0 - 1.5 * x) * std::exp(-x);
          },
      },
      spec_);
}

double Filter::fourier(cplx alpha) const {
  return std::visit(
      overloaded{
          [&](const filter::Gaussian& g) {
            return 2.0 * std::exp(-2.0 * std::norm(alpha) / g.r) / (pi * g.r);
          },
          [&](const filter::Nonclassicality& n) {
            const double w = (*impl_->noncl_fourier)(n.L * std::abs(alpha));
            return n.L * n.L * pi * pi * w * w;
          },
          [&](const filter::Klauder& k) {
            auto G = [&](double kk) {
              kk = std::abs(kk);
              if (kk > impl_->klauder_k_max) return klauder_cosine_transform(kk, k.L);
              double acc = 0.0;
              const QuadratureRule& r = impl_->klauder_rule;
              for (std::size_t i = 0; i < r.size(); ++i)
                acc += r.w[i] * impl_->klauder_g[i] * std::cos(kk * r.x[i]);
              return 2.0 * acc;
            };
            // u = sqrt(2) Re xi pairs with sqrt(2) Im alpha, v with sqrt(2) Re alpha
            return G(std::sqrt(2.0) * alpha.real()) * G(std::sqrt(2.0) * alpha.imag()) /
                   (2.0 * pi * pi);
          },
          [&](const filter::SmoothingKernel& k) {
            if (impl_->kernel_moments)
              return gaussian_wigner_density(*impl_->kernel_moments, alpha.real(), alpha.imag());
            return wigner(k.kernel, alpha);
          },
          [&](const filter::NarcowichCounterexample&) {
            const double x = std::norm(alpha);
            return std::exp(-x) * (3.0 * x - 1.0) / (2.0 * pi);
          },
      },
      spec_);
}

bool Filter::is_real() const {
  if (const auto* k = std::get_if<filter::SmoothingKernel>(&spec_)) return parity_even(k->kernel);
  return true;
}

bool Filter::is_even() const { return is_real(); }

bool Filter::is_radial() const {
  if (std::holds_alternative<filter::Klauder>(spec_)) return false;
  if (const auto* k = std::get_if<filter::SmoothingKernel>(&spec_))
    return is_radially_symmetric(k->kernel);
  return true;
}

bool Filter::has_density_transform() const {
  return std::visit(overloaded{
                        [](const filter::Gaussian&) { return true; },
                        [](const filter::Nonclassicality&) { return true; },
                        [](const filter::Klauder&) { return false; },
                        [&](const filter::SmoothingKernel&) {
                          return impl_->kernel_moments.has_value();
                        },
                        [](const filter::NarcowichCounterexample&) { return false; },
                    },
                    spec_);
}

DecayClass Filter::decay() const {
  if (std::holds_alternative<filter::Nonclassicality>(spec_) ||
      std::holds_alternative<filter::Klauder>(spec_))
    return DecayClass::subgaussian;
  return DecayClass::gaussian_dominated;
}

double Filter::eval_radial(double t) const {
  if (!is_radial()) throw UnsupportedRouteError("eval_radial: filter is not radially symmetric");
  return eval(cplx(std::abs(t), 0.0)).real();
}

double Filter::fourier_radial(double rho) const {
  if (!is_radial()) throw UnsupportedRouteError("fourier_radial: filter is not radially symmetric");
  return fourier(cplx(std::abs(rho), 0.0));
}

double Filter::support_radius() const {
  return std::visit(overloaded{
                        [](const filter::Gaussian& g) { return std::sqrt(2.0 * 34.6 / g.r); },
                        [](const filter::Nonclassicality& n) {
                          return (2.0 * mother_radius(n.q) + 0.5) * n.L;
                        },
                        [](const filter::Klauder& k) { return k.L + klauder_margin; },
                        [&](const filter::SmoothingKernel&) { return impl_->kernel_support; },
                        [](const filter::NarcowichCounterexample&) { return 6.3; },
                    },
                    spec_);
}

double Filter::fourier_radius() const {
  return std::visit(
      overloaded{
          [](const filter::Gaussian& g) { return std::sqrt(15.0 * g.r); },
          [](const filter::Nonclassicality& n) {
            return noncl_mother_fourier_profile(n.q).r_max() / n.L;
          },
          [](const filter::Klauder& k) { return 4.0 + k.L; },
          [&](const filter::SmoothingKernel& k) {
            if (impl_->kernel_moments) {
              const auto& m = *impl_->kernel_moments;
              const double sd = std::sqrt(m.cov.eigenvalues().real().maxCoeff());
              return m.mean.norm() + 8.0 * sd;
            }
            return 6.0 + 2.0 * std::sqrt(mean_photon_number(k.kernel));
          },
          [](const filter::NarcowichCounterexample&) { return 6.0; },
      },
      spec_);
}

std::optional<double> Filter::width() const {
  if (const auto* g = std::get_if<filter::Gaussian>(&spec_)) return 1.0 / g->r;
  if (const auto* n = std::get_if<filter::Nonclassicality>(&spec_)) return n->L;
  if (const auto* k = std::get_if<filter::Klauder>(&spec_)) return k->L;
  return std::nullopt;
}

cplx filter_eval(const Filter& f, PhasePoint xi) {
  require_finite(xi, "filter_eval");
  return f.eval(xi.z());
}

double filter_fourier(const Filter& f, PhasePoint alpha) {
  require_finite(alpha, "filter_fourier");
  return f.fourier(alpha.z());
}

RadialCdf radial_cdf(const Filter& f) {
  RadialCdf out;
  if (const auto* n = std::get_if<filter::Nonclassicality>(&f.spec())) {
    NonclTables& tab = noncl_tables(n->q, false);
    out.radii = *tab.radii;
    for (double& r : out.radii) r /= n->L;
    out.cdf = *tab.cdf;
    out.tail_mass = tab.tail_mass;
    return out;
  }
  if (!f.is_radial()) throw UnsupportedRouteError("radial_cdf: filter is not radially symmetric");
  const double R = f.fourier_radius();
  const int n = fourier_knots;
  const double h = R / (n - 1);
  out.radii.resize(n);
  out.cdf.assign(n, 0.0);
  auto density = [&](double r) { return 2.0 * pi * r * f.fourier_radial(r); };
  for (int i = 0; i < n; ++i) out.radii[i] = i * h;
  for (int i = 1; i < n; ++i) {
    const double a = (i - 1) * h, b = i * h;
    out.cdf[i] = out.cdf[i - 1] + h / 6.0 * (density(a) + 4.0 * density(0.5 * (a + b)) + density(b));
  }
  const double total = out.cdf.back();
  out.tail_mass = std::max(0.0, 1.0 - total);
  for (double& x : out.cdf) x /= total;
  return out;
}

FilterSampler::FilterSampler(const Filter& f, std::uint64_t seed) : filter_(f), rng_(seed) {
  if (!f.has_density_transform())
    throw UnphysicalFilterError("filter_sampler: " + f.describe() +
                                " is not certified CPTP (its transform is not a probability density)");
  if (const auto* g = std::get_if<filter::Gaussian>(&f.spec())) {
    gaussian_ = true;
    chol_ = Eigen::Matrix2d::Identity() * std::sqrt(g->r / 4.0);
  } else if (const auto* k = std::get_if<filter::SmoothingKernel>(&f.spec())) {
    const auto m = gaussian_moments(k->kernel);
    gaussian_ = true;
    mean_ = m->mean;
    chol_ = m->cov.llt().matrixL();
  } else if (const auto* n = std::get_if<filter::Nonclassicality>(&f.spec())) {
    NonclTables& tab = noncl_tables(n->q, false);
    radii_ = tab.radii;
    cdf_ = tab.cdf;
    scale_ = 1.0 / n->L;
  }
}

PhasePoint FilterSampler::next() {
  if (gaussian_) {
    const Eigen::Vector2d z(normal_(rng_), normal_(rng_));
    const Eigen::Vector2d a = mean_ + chol_ * z;
    return {a(0), a(1)};
  }
  const std::vector<double>& c = *cdf_;
  const std::vector<double>& r = *radii_;
  const double u = uniform_(rng_);
  const double phi = 2.0 * pi * uniform_(rng_);
  auto it = std::upper_bound(c.begin(), c.end(), u);
  std::size_t i = std::min<std::size_t>(std::max<std::ptrdiff_t>(it - c.begin(), 1), c.size() - 1);
  const double span = c[i] - c[i - 1];
  const double t = span > 0.0 ? (u - c[i - 1]) / span : 0.5;
  const double rho = scale_ * (r[i - 1] + t * (r[i] - r[i - 1]));
  return PhasePoint(std::polar(rho, phi));
}

FilterSampler filter_sampler(const Filter& f, std::uint64_t seed) { return FilterSampler(f, seed); }

}  // namespace phasefilter
