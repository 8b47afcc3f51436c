#include "phasefilter/applications.hpp"

#include <cmath>

#include "phasefilter/parallel.hpp"
#include "phasefilter/quadrature.hpp"

namespace phasefilter {

ChannelOutput channel_output_estimate(const ChannelSpec& ch, const StateSpec& state,
                                      const Filter& filter, const GridParams& gp, int dim) {
  if (!filter.has_density_transform())
    throw UnphysicalFilterError("channel_output_estimate: " + filter.describe() + " is not CPTP");
  const PQDGrid grid = regularized_p_grid(state, filter, gp.half_extent, gp.n_points);
  ChannelOutput out;
  if (const auto* loss = std::get_if<channel::Loss>(&ch)) {
    if (!(loss->eta > 0.0 && loss->eta <= 1.0))
      throw DomainError("Loss channel: eta must lie in (0, 1]");
    out.rho = reconstruct_from_p(grid, dim, {}, loss->eta);
  } else {
    const auto& user = std::get<channel::UserCoherentResponse>(ch);
    const int n = grid.n_points;
    std::vector<FockMatrix> rows(n, FockMatrix::Zero(dim, dim));
    parallel_for(n, [&](int iy) {
      for (int ix = 0; ix < n; ++ix) {
        const double w = grid.values(iy, ix) * grid.cell_area();
        if (w == 0.0) continue;
        rows[iy] += w * user.response(grid.point(ix, iy), dim);
      }
    });
    out.rho = FockMatrix::Zero(dim, dim);
    for (const FockMatrix& r : rows) out.rho += r;
    out.rho = hermitize(out.rho);
  }
  out.trace = out.rho.trace().real();
  out.min_eigenvalue = min_eigenvalue<double>(out.rho);
  return out;
}

FockMatrix apply_loss_fock(const FockMatrix& rho, double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("apply_loss_fock: eta must lie in (0, 1]");
  const int dim = static_cast<int>(rho.rows());
  if (eta == 1.0) return rho;
  FockMatrix out = FockMatrix::Zero(dim, dim);
  const double le = std::log(eta), ll = 0.5 * std::log1p(-eta * eta);
  for (int k = 0; k < dim; ++k) {
    FockMatrix a = FockMatrix::Zero(dim, dim);
    for (int n = k; n < dim; ++n) {
      const double lc = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
      a(n - k, n) = std::exp(0.5 * lc + (n - k) * le + k * ll);
    }
    out += a * rho * a.adjoint();
  }
  return out;
}

double channel_output_distance_bound(const StateSpec& state, const Filter& filter) {
  if (!filter.has_density_transform())
    throw UnphysicalFilterError("channel_output_distance_bound: " + filter.describe() + " is not CPTP");
  return entanglement_fidelity(state, filter).trace_distance_bound;
}

namespace {

// radius beyond which |Omega(t) L_n(t^2)| t is negligible for every n <= n_max
double povm_cutoff(const Filter& filter, int n_max) {
  auto ring = [&](double t) {
    const std::vector<double> lag = laguerre_sequence<double>(n_max, 0, t * t);
    double worst = 0.0;
    for (double v : lag) worst = std::max(worst, std::abs(v));
    return t * worst * std::abs(filter.eval_radial(t));
  };
  const auto r = decay_radius(ring, 1e-16, 200.0, 0.25, 2.0);
  if (!r) throw FilterTooWeakError(ring(200.0), "povm_regularized_p: filter does not decay fast enough");
  return std::max(*r, 1.0);
}

void require_radial(const Filter& filter) {
  if (!filter.is_radial())
    throw UnsupportedRouteError("povm_regularized_p: radial route needs a radially symmetric filter");
}

}  // namespace

double povm_regularized_p(int n, const Filter& filter, PhasePoint alpha) {
  if (n < 0) throw DomainError("povm_regularized_p: n must be nonnegative");
  require_finite(alpha, "povm_regularized_p");
  require_radial(filter);
  const double T = povm_cutoff(filter, n);
  auto f = [&](double t) { return laguerre<double>(n, 0, t * t) * filter.eval_radial(t); };
  return (2.0 / pi) * hankel_j0(f, 2.0 * alpha.abs(), T, 0.125);
}

PovmPTable::PovmPTable(const Filter& filter, int n_max, double r_max, int n_knots)
    : filter_(filter), r_max_(r_max) {
  if (n_max < 0) throw DomainError("PovmPTable: n_max must be nonnegative");
  require_radial(filter);
  const double T = povm_cutoff(filter, n_max);
  const double width = std::min(0.125, pi / (2.0 * r_max));
  const QuadratureRule rule =
      composite_gauss_legendre(0.0, T, std::max(8, static_cast<int>(std::ceil(T / width))));
  const int m = static_cast<int>(rule.size());
  // weight_i * t_i * Omega(t_i) * L_n(t_i^2)
  Eigen::MatrixXd g(n_max + 1, m);
  for (int i = 0; i < m; ++i) {
    const double t = rule.x[i];
    const std::vector<double> lag = laguerre_sequence<double>(n_max, 0, t * t);
    const double base = rule.w[i] * t * filter.eval_radial(t);
    for (int n = 0; n <= n_max; ++n) g(n, i) = base * lag[n];
  }
  const double h = r_max / (n_knots - 1);
  Eigen::MatrixXd vals(n_max + 1, n_knots);
  parallel_for(n_knots, [&](int k) {
    Eigen::VectorXd j(m);
    for (int i = 0; i < m; ++i) j(i) = ::j0(2.0 * k * h * rule.x[i]);
    vals.col(k) = (2.0 / pi) * (g * j);
  });
  for (int n = 0; n <= n_max; ++n) {
    std::vector<double> v(n_knots);
    for (int k = 0; k < n_knots; ++k) v[k] = vals(n, k);
    profiles_.emplace_back(std::move(v), r_max, 0.0, 0.0);
  }
}

double PovmPTable::operator()(int n, double rho) const {
  if (n < 0 || n > n_max()) throw DomainError("PovmPTable: n out of range");
  rho = std::abs(rho);
  if (rho > r_max_) return povm_regularized_p(n, filter_, PhasePoint(rho, 0.0));
  return profiles_[n](rho);
}

HusimiSampler::HusimiSampler(const StateSpec& state, std::uint64_t seed)
    : q_(husimi_evaluator(state)), rng_(seed) {
  width_ = 2.0 * (1.0 + mean_photon_number(state));
  // envelope constant from a grid scan, with headroom
  const double R = std::sqrt(mean_photon_number(state)) + 6.0 * std::sqrt(width_);
  const int n = 201;
  double best = 0.0;
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const cplx a(-R + 2.0 * R * ix / (n - 1), -R + 2.0 * R * iy / (n - 1));
      best = std::max(best, q_(a) / std::exp(-std::norm(a) / width_));
    }
  if (!(best > 0.0) || !std::isfinite(best))
    throw SamplerError("HusimiSampler: envelope scan found no support");
  c_ = 1.1 * best;
}

HusimiSampler HusimiSampler::with_seed(std::uint64_t seed) const {
  HusimiSampler s = *this;
  s.rng_.seed(seed);
  s.tried_ = s.accepted_ = 0;
  return s;
}

PhasePoint HusimiSampler::next() {
  const double sd = std::sqrt(0.5 * width_);
  for (int guard = 0; guard < 100000000; ++guard) {
    const cplx a(sd * normal_(rng_), sd * normal_(rng_));
    ++tried_;
    const double ratio = q_(a) / (c_ * std::exp(-std::norm(a) / width_));
    if (ratio > 1.0)
      throw SamplerError("HusimiSampler: envelope violated (Q / envelope = " + std::to_string(ratio) +
                         " at |alpha| = " + std::to_string(std::abs(a)) + ")");
    if (uniform_(rng_) < ratio) {
      ++accepted_;
      return PhasePoint(a);
    }
  }
  throw SamplerError("HusimiSampler: no sample accepted");
}

EstimationResult heterodyne_estimate(const StateSpec& state, const Filter& filter,
                                     const PovmSpec& povm, long n_samples, std::uint64_t seed) {
  if (!filter.has_density_transform())
    throw UnphysicalFilterError("heterodyne_estimate: " + filter.describe() + " is not CPTP");
  if (!filter.is_even())
    throw UnsupportedRouteError("heterodyne_estimate: filter transform is not symmetric under alpha -> -alpha");
  if (n_samples < 2) throw DomainError("heterodyne_estimate: need at least 2 samples");
  const int n_max = std::get<FockProjectors>(povm).n_max;
  if (n_max < 0) throw DomainError("heterodyne_estimate: n_max must be nonnegative");

  const HusimiSampler base(state, seed);
  const double r_table = std::sqrt(mean_photon_number(state)) + 5.0 * std::sqrt(base.envelope_width());
  const PovmPTable table(filter, n_max, r_table);

  const int chunks = 64;
  std::vector<Eigen::VectorXd> s1(chunks), s2(chunks);
  std::vector<double> acc_rate(chunks);
  parallel_for(chunks, [&](int c) {
    HusimiSampler sampler = base.with_seed(derive_seed(seed, static_cast<std::uint64_t>(c)));
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n_max + 1), b = a;
    const long count = n_samples / chunks + (c < n_samples % chunks ? 1 : 0);
    for (long i = 0; i < count; ++i) {
      const double r = sampler.next().abs();
      for (int n = 0; n <= n_max; ++n) {
        const double v = pi * table(n, r);
        a(n) += v;
        b(n) += v * v;
      }
    }
    s1[c] = a;
    s2[c] = b;
    acc_rate[c] = sampler.acceptance();
  });
  Eigen::VectorXd a = Eigen::VectorXd::Zero(n_max + 1), b = a;
  double acc = 0.0;
  for (int c = 0; c < chunks; ++c) {
    a += s1[c];
    b += s2[c];
    acc += acc_rate[c] / chunks;
  }
  const double n = static_cast<double>(n_samples);
  EstimationResult out;
  out.n_samples = n_samples;
  out.seed = seed;
  out.acceptance = acc;
  for (int k = 0; k <= n_max; ++k) {
    const double mean = a(k) / n;
    const double var = std::max(0.0, b(k) / n - mean * mean) * n / (n - 1.0);
    out.probabilities.push_back(mean);
    out.standard_errors.push_back(std::sqrt(var / n));
  }
  out.bound = entanglement_fidelity(state, filter).trace_distance_bound;
  const FockMatrix filtered = apply_filter_fock(state, filter, n_max + 1).fock;
  out.deficit = std::max(0.0, 1.0 - filtered.trace().real());
  return out;
}

ProbabilityBound probability_distance_bound(const StateSpec& state, const Filter& filter, int n_max,
                                            int dim) {
  ProbabilityBound out;
  out.bound = channel_output_distance_bound(state, filter);
  const int d = std::max(dim, n_max + 1);
  const std::vector<double> p = photon_distribution(state, n_max);
  const FockMatrix rho = apply_filter_fock(state, filter, d).fock;
  double acc = 0.0;
  for (int n = 0; n <= n_max; ++n) acc += std::abs(p[n] - rho(n, n).real());
  out.measured = 0.5 * acc;
  out.holds = out.measured <= out.bound + 1e-6;
  return out;
}

}  // namespace phasefilter
