#include "phasefilter/quadrature.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>

namespace phasefilter {

namespace {

QuadratureRule build_gauss_legendre(int n) {
  QuadratureRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Newton on P_n starting from the Chebyshev-like guess
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.x[i] = -x;
    rule.x[n - 1 - i] = x;
    rule.w[i] = w;
    rule.w[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.x[n / 2] = 0.0;
  return rule;
}

}  // namespace

const QuadratureRule& gauss_legendre(int order) {
  if (order < 1) throw DomainError("gauss_legendre: order must be >= 1");
  static std::mutex mu;
  static std::map<int, QuadratureRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, build_gauss_legendre(order)).first;
  return it->second;
}

QuadratureRule composite_gauss_legendre(double a, double b, int panels, int order) {
  if (panels < 1) throw DomainError("composite_gauss_legendre: panels must be >= 1");
  const QuadratureRule& base = gauss_legendre(order);
  QuadratureRule rule;
  rule.x.reserve(static_cast<std::size_t>(panels) * base.size());
  rule.w.reserve(rule.x.capacity());
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (std::size_t i = 0; i < base.size(); ++i) {
      rule.x.push_back(mid + 0.5 * h * base.x[i]);
      rule.w.push_back(0.5 * h * base.w[i]);
    }
  }
  return rule;
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double tol,
                          int initial_panels, int max_levels) {
  int panels = initial_panels;
  double prev = integrate(f, composite_gauss_legendre(a, b, panels));
  for (int level = 0; level < max_levels; ++level) {
    panels *= 2;
    const double cur = integrate(f, composite_gauss_legendre(a, b, panels));
    if (std::abs(cur - prev) <= tol) return cur;
    prev = cur;
  }
  throw QuadratureError("integrate_adaptive: no convergence on [" + std::to_string(a) + ", " +
                        std::to_string(b) + "] after " + std::to_string(panels) + " panels");
}

double hankel_j0(const std::function<double(double)>& f, double k, double cutoff,
                 double max_panel_width) {
  double width = max_panel_width;
  if (k > 0.0) width = std::min(width, 2.0 * pi / k);
  const int panels = std::max(4, static_cast<int>(std::ceil(cutoff / width)));
  const QuadratureRule rule = composite_gauss_legendre(0.0, cutoff, panels);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double t = rule.x[i];
    acc += rule.w[i] * f(t) * ::j0(k * t) * t;
  }
  return acc;
}

std::optional<double> decay_radius(const std::function<double(double)>& ring_max, double tol,
                                   double r_max, double step, double margin) {
  const int n = static_cast<int>(std::ceil(r_max / step));
  const int span = static_cast<int>(std::ceil(margin / step));
  int streak = 0;
  for (int i = 1; i <= n; ++i) {
    if (ring_max(i * step) < tol) {
      if (++streak > span) return (i - span) * step;
    } else {
      streak = 0;
    }
  }
  return std::nullopt;
}

double ring_max_abs(const std::function<cplx(cplx)>& f, double r, int n_angles) {
  double best = 0.0;
  for (int k = 0; k < n_angles; ++k) {
    const double phi = 2.0 * pi * (k + 0.5) / n_angles;
    const double v = std::abs(f(std::polar(r, phi)));
    if (std::isnan(v)) return std::numeric_limits<double>::infinity();
    best = std::max(best, v);
  }
  return best;
}

}  // namespace phasefilter
