#include "phasefilter/filtering_map.hpp"

#include <cmath>

#include "phasefilter/parallel.hpp"
#include "phasefilter/quadrature.hpp"

namespace phasefilter {

CharFn apply_filter_charfn(const StateSpec& state, const Filter& filter) {
  CharFn base = characteristic_function(state);
  CharFn out;
  out.kind = CharFnKind::filtered_product;
  out.decay = filter.decay() == DecayClass::subgaussian ? DecayClass::subgaussian : base.decay;
  out.angular_bandwidth = base.angular_bandwidth;
  out.evaluator = [phi = base.evaluator, filter](cplx xi) { return phi(xi) * filter.eval(xi); };
  return out;
}

std::string to_string(FilterRoute r) {
  return r == FilterRoute::charfn_quadrature ? "charfn-quadrature" : "mc-displacement";
}

namespace {

// rho[m,n] = 2 int t c_{m-n}(t) <m|D(-t)|n> dt with c_k the angular Fourier
// coefficients of Phi_Omega on the circle of radius t
FockMatrix polar_inversion(const std::function<cplx(cplx)>& phi, int dim, double cutoff, int panels,
                           int n_angles) {
  const QuadratureRule rule = composite_gauss_legendre(0.0, cutoff, panels);
  const int nodes = static_cast<int>(rule.size());
  std::vector<FockMatrix> part(nodes);
  std::vector<cplx> twiddle(n_angles);
  for (int a = 0; a < n_angles; ++a) twiddle[a] = std::polar(1.0, 2.0 * pi * a / n_angles);
  parallel_for(nodes, [&](int i) {
    const double t = rule.x[i];
    std::vector<cplx> ring(n_angles);
    for (int a = 0; a < n_angles; ++a) ring[a] = phi(t * twiddle[a]);
    // c_k for k = -(dim-1) .. dim-1
    std::vector<cplx> c(2 * dim - 1);
    for (int k = -(dim - 1); k <= dim - 1; ++k) {
      cplx acc(0.0, 0.0);
      for (int a = 0; a < n_angles; ++a) {
        const long idx = (static_cast<long>(k) * a) % n_angles;
        acc += ring[a] * twiddle[(idx + n_angles) % n_angles];
      }
      c[k + dim - 1] = acc / static_cast<double>(n_angles);
    }
    const FockMatrix d = displacement_block<double>(cplx(-t, 0.0), dim, dim);
    FockMatrix m(dim, dim);
    for (int r = 0; r < dim; ++r)
      for (int s = 0; s < dim; ++s) m(r, s) = c[r - s + dim - 1] * d(r, s);
    part[i] = 2.0 * rule.w[i] * t * m;
  });
  FockMatrix rho = FockMatrix::Zero(dim, dim);
  for (const FockMatrix& p : part) rho += p;
  return rho;
}

FilteredState quadrature_route(const StateSpec& state, const Filter& filter, int dim,
                               const FilterParams& params) {
  const CharFn phi = apply_filter_charfn(state, filter);
  const auto cutoff = decay_radius(
      [&](double r) { return r * ring_max_abs(phi.evaluator, r, 128); }, 1e-16, 80.0, 0.25, 2.0);
  if (!cutoff)
    throw QuadratureError("apply_filter_fock: filtered characteristic function does not decay");
  const double T = std::max(*cutoff, 1.0);
  const int support = std::min(phi.angular_bandwidth, 4096);
  int n_angles = 2 * (dim + support) + 64;
  if (!filter.is_radial()) n_angles *= 4;
  int panels = std::max(8, static_cast<int>(std::ceil(T / 0.25)));

  FockMatrix rho = polar_inversion(phi.evaluator, dim, T, panels, n_angles);
  double change = 0.0;
  for (int level = 0; level < 4; ++level) {
    const FockMatrix finer = polar_inversion(phi.evaluator, dim, T, 2 * panels, 2 * n_angles);
    change = (finer - rho).cwiseAbs().maxCoeff();
    rho = finer;
    panels *= 2;
    n_angles *= 2;
    if (change <= params.tol) break;
    if (level == 3)
      throw QuadratureError("apply_filter_fock: quadrature did not converge (change " +
                            std::to_string(change) + ")");
  }
  FilteredState out;
  out.input = state;
  out.filter = filter.describe();
  out.fock = hermitize(rho);
  out.route = FilterRoute::charfn_quadrature;
  out.route_error = change;
  out.input_leakage = truncation_leakage(state, dim);
  return out;
}

FilteredState mc_route(const StateSpec& state, const Filter& filter, int dim,
                       const FilterParams& params) {
  if (!filter.has_density_transform())
    throw UnphysicalFilterError("apply_filter_fock: mc-displacement route needs a CPTP filter; " +
                                filter.describe() + " has no probability-density transform");
  if (params.n_samples < 2 || params.chunks < 2)
    throw DomainError("apply_filter_fock: need at least 2 samples and 2 chunks");
  // input as sqrt(lambda_k) v_k columns on its Fock support
  const int support = std::min(support_dim(state), 4096);
  Eigen::MatrixXcd cols;
  if (is_pure(state) && !std::holds_alternative<state::Numeric>(state)) {
    cols = pure_vector(state, support);
  } else {
    const FockMatrix rho = to_fock(state, support);
    Eigen::SelfAdjointEigenSolver<FockMatrix> es(hermitize(rho));
    const double top = es.eigenvalues().maxCoeff();
    std::vector<int> keep;
    for (int k = 0; k < support; ++k)
      if (es.eigenvalues()(k) > params.rank_tol * top) keep.push_back(k);
    cols.resize(support, static_cast<int>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j)
      cols.col(j) = std::sqrt(es.eigenvalues()(keep[j])) * es.eigenvectors().col(keep[j]);
  }

  const int chunks = params.chunks;
  std::vector<FockMatrix> sums(chunks);
  std::vector<Eigen::MatrixXd> squares(chunks);
  std::vector<long> counts(chunks);
  for (int c = 0; c < chunks; ++c)
    counts[c] = params.n_samples / chunks + (c < params.n_samples % chunks ? 1 : 0);
  parallel_for(chunks, [&](int c) {
    FilterSampler sampler(filter, derive_seed(params.seed, static_cast<std::uint64_t>(c)));
    FockMatrix acc = FockMatrix::Zero(dim, dim);
    Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(dim, dim);
    for (long i = 0; i < counts[c]; ++i) {
      const PhasePoint a = sampler.next();
      const Eigen::MatrixXcd w = displacement_block<double>(a.z(), dim, support) * cols;
      const FockMatrix x = w * w.adjoint();
      acc += x;
      sq += x.cwiseAbs2();
    }
    sums[c] = std::move(acc);
    squares[c] = std::move(sq);
  });

  FockMatrix total = FockMatrix::Zero(dim, dim);
  Eigen::MatrixXd total_sq = Eigen::MatrixXd::Zero(dim, dim);
  for (int c = 0; c < chunks; ++c) {
    total += sums[c];
    total_sq += squares[c];
  }
  const double n = static_cast<double>(params.n_samples);
  const FockMatrix mean = total / n;
  Eigen::MatrixXd var = (total_sq / n - mean.cwiseAbs2()).cwiseMax(0.0) * (n / (n - 1.0));
  double batch = 0.0;
  for (int c = 0; c < chunks; ++c) {
    const double dist = half_trace_norm<double>(hermitize<double>(sums[c] / double(counts[c]) - mean));
    batch += dist * dist;
  }
  FilteredState out;
  out.input = state;
  out.filter = filter.describe();
  out.fock = hermitize(mean);
  out.route = FilterRoute::mc_displacement;
  out.n_samples = params.n_samples;
  out.seed = params.seed;
  out.entry_stderr = (var / n).cwiseSqrt();
  out.route_error = std::sqrt(batch / chunks) / std::sqrt(static_cast<double>(chunks));
  out.input_leakage = truncation_leakage(state, dim);
  return out;
}

}  // namespace

FilteredState apply_filter_fock(const StateSpec& state, const Filter& filter, int dim,
                                FilterRoute route, const FilterParams& params) {
  if (dim < 1) throw DomainError("apply_filter_fock: dim must be >= 1");
  validate(state);
  if (route == FilterRoute::mc_displacement) return mc_route(state, filter, dim, params);
  return quadrature_route(state, filter, dim, params);
}

PQDGrid regularized_p_grid(const StateSpec& state, const Filter& filter, double half_extent,
                           int n_points) {
  const CharFn phi = apply_filter_charfn(state, filter);
  try {
    return spqd_grid(phi, 1.0, half_extent, n_points);
  } catch (const SingularPqdError& e) {
    throw FilterTooWeakError(e.tail, "filter too weak for this state: " + filter.describe() +
                                         " leaves Phi(xi) Omega(xi) e^{|xi|^2/2} at " +
                                         std::to_string(e.tail) + " far out");
  }
}

FockMatrix reconstruct_from_p(const PQDGrid& grid, int dim, const ReconstructOptions& opt,
                              double amplitude_scale) {
  if (dim < 1) throw DomainError("reconstruct_from_p: dim must be >= 1");
  if (grid.s != 1.0) throw DomainError("reconstruct_from_p: grid must hold a P function (s = 1)");
  const double residual = grid.normalization_residual();
  if (std::abs(residual) > opt.norm_tol)
    throw TruncationError("reconstruct_from_p: grid normalization off by " + std::to_string(residual) +
                          "; the P function is not resolved on this grid");
  const int n = grid.n_points;
  const double dA = grid.cell_area();
  std::vector<FockMatrix> rows(n);
  std::vector<double> leak(n, 0.0);
  parallel_for(n, [&](int iy) {
    Eigen::MatrixXcd v(dim, n);
    Eigen::MatrixXcd vw(dim, n);
    for (int ix = 0; ix < n; ++ix) {
      const cplx a = amplitude_scale * grid.point(ix, iy).z();
      v.col(ix) = coherent_vector<double>(a, dim);
      const double w = grid.values(iy, ix) * dA;
      vw.col(ix) = w * v.col(ix);
      leak[iy] += std::abs(w) * std::max(0.0, 1.0 - v.col(ix).squaredNorm());
    }
    rows[iy] = vw * v.adjoint();
  });
  FockMatrix rho = FockMatrix::Zero(dim, dim);
  double leakage = 0.0;
  for (int iy = 0; iy < n; ++iy) {
    rho += rows[iy];
    leakage += leak[iy];
  }
  if (leakage > opt.leakage_tol)
    throw TruncationError("reconstruct_from_p: coherent projectors leak " + std::to_string(leakage) +
                          " beyond dim " + std::to_string(dim));
  return hermitize(rho);
}

}  // namespace phasefilter
