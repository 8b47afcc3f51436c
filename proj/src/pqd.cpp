#include "phasefilter/pqd.hpp"

#include <cmath>

#include "phasefilter/parallel.hpp"
#include "phasefilter/quadrature.hpp"

namespace phasefilter {

namespace {

void check_order(double s) {
  if (!std::isfinite(s) || s > 1.0) throw DomainError("spqd: ordering parameter must be <= 1");
}

// oscillation rate of Phi itself along a ray, from the angular bandwidth
double state_frequency(const CharFn& phi) {
  return 2.0 * std::sqrt(2.0 * std::max(phi.angular_bandwidth, 1) + 2.0);
}

struct Nodes {
  QuadratureRule rule;
  Eigen::MatrixXcd g;  // w_i w_j Phi(x_i + i y_j) e^{s r^2/2}
};

Nodes build_nodes(const CharFn& phi, double s, double cutoff, int panels) {
  Nodes n;
  n.rule = composite_gauss_legendre(-cutoff, cutoff, panels);
  const int m = static_cast<int>(n.rule.size());
  n.g.resize(m, m);
  parallel_for(m, [&](int i) {
    for (int j = 0; j < m; ++j) {
      const double x = n.rule.x[i], y = n.rule.x[j];
      const double weight = n.rule.w[i] * n.rule.w[j] * std::exp(0.5 * s * (x * x + y * y));
      n.g(i, j) = weight * phi.at({x, y});
    }
  });
  return n;
}

// W at the listed real / imaginary coordinates, W(ky, kx)
Eigen::MatrixXd transform(const Nodes& n, const std::vector<double>& ax,
                          const std::vector<double>& ay) {
  const int m = static_cast<int>(n.rule.size());
  Eigen::MatrixXcd a(ay.size(), m), b(m, ax.size());
  for (std::size_t k = 0; k < ay.size(); ++k)
    for (int i = 0; i < m; ++i) a(k, i) = std::polar(1.0, 2.0 * ay[k] * n.rule.x[i]);
  for (int j = 0; j < m; ++j)
    for (std::size_t k = 0; k < ax.size(); ++k) b(j, k) = std::polar(1.0, -2.0 * ax[k] * n.rule.x[j]);
  return (a * n.g * b).real() / (pi * pi);
}

int panels_for(double cutoff, double max_freq) {
  const double h = std::min(0.5, 8.0 / max_freq);
  return std::max(4, static_cast<int>(std::ceil(2.0 * cutoff / h)));
}

}  // namespace

double spqd_cutoff(const CharFn& phi, double s, const SpqdOptions& opt) {
  check_order(s);
  auto ring = [&](double r) {
    return ring_max_abs(phi.evaluator, r) * std::exp(0.5 * s * r * r);
  };
  const auto k = decay_radius(ring, opt.tail_tol, opt.r_search);
  if (!k) {
    const double tail = ring(opt.r_search);
    throw SingularPqdError(s, tail,
                           "singular PQD: integrand does not decay for s = " + std::to_string(s) +
                               " (tail magnitude " + std::to_string(tail) + " at |xi| = " +
                               std::to_string(opt.r_search) + ")");
  }
  return std::max(*k, 1.0);
}

PQDGrid spqd_grid(const CharFn& phi, double s, double half_extent, int n_points,
                  const SpqdOptions& opt) {
  if (!(half_extent > 0.0) || n_points < 2)
    throw DomainError("spqd_grid: need half_extent > 0 and n_points >= 2");
  const double cutoff = spqd_cutoff(phi, s, opt);
  PQDGrid grid;
  grid.s = s;
  grid.half_extent = half_extent;
  grid.n_points = n_points;
  grid.cutoff = cutoff;
  std::vector<double> axis(n_points);
  for (int i = 0; i < n_points; ++i) axis[i] = grid.coord(i);

  const double freq = 2.0 * half_extent + state_frequency(phi);
  int panels = panels_for(cutoff, freq);
  const std::vector<double> probe = {-half_extent, -0.37 * half_extent, 0.0, 0.61 * half_extent,
                                     half_extent};
  for (int attempt = 0;; ++attempt) {
    const Nodes nodes = build_nodes(phi, s, cutoff, panels);
    grid.values = transform(nodes, axis, axis);
    if (!opt.verify) return grid;
    const Nodes fine = build_nodes(phi, s, cutoff, 2 * panels);
    const Eigen::MatrixXd a = transform(nodes, probe, probe);
    const Eigen::MatrixXd b = transform(fine, probe, probe);
    grid.quadrature_error = (a - b).cwiseAbs().maxCoeff();
    if (grid.quadrature_error <= opt.tol) return grid;
    if (attempt == 3)
      throw QuadratureError("spqd_grid: no convergence, node disagreement " +
                            std::to_string(grid.quadrature_error));
    panels *= 2;
  }
}

PQDGrid spqd_grid(const StateSpec& state, double s, double half_extent, int n_points,
                  const SpqdOptions& opt) {
  return spqd_grid(characteristic_function(state), s, half_extent, n_points, opt);
}

double spqd_point(const CharFn& phi, double s, PhasePoint alpha, const SpqdOptions& opt) {
  require_finite(alpha, "spqd_point");
  const double cutoff = spqd_cutoff(phi, s, opt);
  const double freq = 2.0 * std::max(std::abs(alpha.re), std::abs(alpha.im)) + state_frequency(phi);
  const Nodes nodes = build_nodes(phi, s, cutoff, panels_for(cutoff, freq));
  return transform(nodes, {alpha.re}, {alpha.im})(0, 0);
}

}  // namespace phasefilter
