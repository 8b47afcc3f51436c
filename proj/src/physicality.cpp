#include "phasefilter/physicality.hpp"

#include <cmath>
#include <random>

#include "phasefilter/parallel.hpp"

namespace phasefilter {

PointSet klauder_point_set(double L) {
  PointSet s;
  for (double u : {-L, 0.0, L}) s.points.push_back(from_canonical({u, 0.0}));
  s.origin = PointSetOrigin::klauder_set;
  s.parameter = L;
  return s;
}

PointSet make_point_set(std::vector<PhasePoint> points) {
  if (points.empty()) throw ValidationError("PointSet: need at least one point");
  for (const PhasePoint& p : points) require_finite(p, "PointSet");
  PointSet s;
  s.points = std::move(points);
  return s;
}

PointSet sweep_point_set(std::uint64_t seed, int index, int size_max) {
  if (size_max < 2) throw DomainError("sweep_point_set: size_max must be >= 2");
  std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(index)));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<int> size_dist(2, size_max);
  PointSet s;
  const int n = size_dist(rng);
  if (index % 2 == 0) {
    static constexpr double scales[] = {0.5, 1.0, 2.0, 4.0};
    const double scale = scales[(index / 2) % 4];
    std::normal_distribution<double> normal(0.0, scale);
    s.origin = PointSetOrigin::random_gaussian;
    s.parameter = scale;
    for (int i = 0; i < n; ++i) s.points.emplace_back(normal(rng), normal(rng));
    return s;
  }
  // lattice patch: a line or a rectangle, axis-aligned or rotated, small offset
  const double spacing = 0.25 * std::pow(8.0, unif(rng));
  int nx = n, ny = 1;
  if (unif(rng) < 0.5 && n >= 4) {
    nx = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
    ny = std::max(1, n / nx);
  }
  const double angle = unif(rng) < 0.5 ? 0.0 : 2.0 * pi * unif(rng);
  const cplx rot = std::polar(1.0, angle);
  const cplx offset(spacing * (unif(rng) - 0.5), spacing * (unif(rng) - 0.5));
  s.origin = PointSetOrigin::lattice;
  s.parameter = spacing;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const cplx local(spacing * (i - 0.5 * (nx - 1)), spacing * (j - 0.5 * (ny - 1)));
      s.points.emplace_back(offset + rot * local);
    }
  return s;
}

Eigen::MatrixXcd bochner_matrix(const std::function<cplx(cplx)>& f, const PointSet& set,
                                double eta_nw) {
  const int n = static_cast<int>(set.points.size());
  if (n < 1) throw ValidationError("bochner_matrix: empty point set");
  Eigen::MatrixXcd m(n, n);
  for (int j = 0; j < n; ++j) {
    const cplx xj = set.points[j].z();
    for (int k = 0; k < n; ++k) {
      const cplx xk = set.points[k].z();
      // (eta/4)(xj xk* - xj* xk) = i (eta/2) Im(xj xk*)
      const double phase = 0.5 * eta_nw * std::imag(xj * std::conj(xk));
      m(j, k) = f(xj - xk) * std::polar(1.0, phase);
    }
  }
  return m;
}

Eigen::MatrixXcd bochner_matrix(const Filter& f, const PointSet& set, double eta_nw) {
  return bochner_matrix([&](cplx z) { return f.eval(z); }, set, eta_nw);
}

double psd_tolerance(int dim) { return 1e-9 * dim; }

namespace {

double min_eig(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

std::optional<FourierWitness> fourier_scan(const Filter& f) {
  const double R = f.fourier_radius();
  const int n = 161;
  const double h = 2.0 * R / (n - 1);
  double best = 0.0, top = 0.0;
  PhasePoint where;
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const PhasePoint a(-R + ix * h, -R + iy * h);
      const double v = f.fourier(a.z());
      top = std::max(top, v);
      if (v < best) {
        best = v;
        where = a;
      }
    }
  // refine around the coarse minimum
  const int m = 41;
  const double hf = 2.0 * h / (m - 1);
  const PhasePoint centre = where;
  for (int iy = 0; iy < m; ++iy)
    for (int ix = 0; ix < m; ++ix) {
      const PhasePoint a(centre.re - h + ix * hf, centre.im - h + iy * hf);
      const double v = f.fourier(a.z());
      if (v < best) {
        best = v;
        where = a;
      }
    }
  if (best < -1e-10 * std::max(1.0, top)) return FourierWitness{where, best};
  return std::nullopt;
}

}  // namespace

SweepResult nw_sweep(const std::function<cplx(cplx)>& f, double eta_nw, int n_sets, int set_size_max,
                     std::uint64_t seed, const std::vector<PointSet>& extra) {
  if (n_sets < 1) throw DomainError("nw_sweep: n_sets must be >= 1");
  SweepResult res;
  res.eta_nw = eta_nw;
  const int total = n_sets + static_cast<int>(extra.size());
  std::vector<double> eig(total);
  std::vector<PointSet> sets(total);
  // extra sets first, so a structured witness is the one reported
  for (std::size_t i = 0; i < extra.size(); ++i) sets[i] = extra[i];
  for (int i = 0; i < n_sets; ++i) sets[extra.size() + i] = sweep_point_set(seed, i, set_size_max);
  parallel_for(total, [&](int i) { eig[i] = min_eig(bochner_matrix(f, sets[i], eta_nw)); });
  res.worst_eigenvalue = eig[0];
  for (int i = 0; i < total; ++i) {
    res.sets_tested = i + 1;
    res.worst_eigenvalue = std::min(res.worst_eigenvalue, eig[i]);
    const int dim = static_cast<int>(sets[i].points.size());
    if (eig[i] < -psd_tolerance(dim)) {
      res.passed = false;
      res.witness = Witness{sets[i], eta_nw, eig[i]};
      return res;
    }
  }
  return res;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::cptp_evidence: return "cptp-evidence";
    case Verdict::not_cp: return "not-cp";
    case Verdict::positive_not_cp_candidate: return "positive-not-cp-candidate";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

PhysicalityReport certify_cptp(const Filter& f, int n_sets, int set_size_max, std::uint64_t seed) {
  PhysicalityReport rep;
  rep.seed = seed;
  rep.tolerance = 1e-9;
  std::vector<PointSet> extra;
  if (const auto* k = std::get_if<filter::Klauder>(&f.spec())) extra.push_back(klauder_point_set(k->L));
  auto eval = [&](cplx z) { return f.eval(z); };
  SweepResult sweep;
  try {
    sweep = nw_sweep(eval, 0.0, n_sets, set_size_max, seed, extra);
    rep.fourier_witness = fourier_scan(f);
  } catch (const Error& e) {
    rep.verdict = Verdict::inconclusive;
    rep.note = std::string("numeric failure: ") + e.what();
    return rep;
  }
  rep.sets_tested = sweep.sets_tested;
  rep.witness = sweep.witness;
  if (!rep.witness && rep.fourier_witness) {
    // the transform is negative somewhere; look harder for a finite witness
    const SweepResult more = nw_sweep(eval, 0.0, 4 * n_sets, set_size_max, seed + 1);
    rep.sets_tested += more.sets_tested;
    rep.witness = more.witness;
  }
  if (rep.witness || rep.fourier_witness) {
    rep.verdict = Verdict::not_cp;
    rep.note = rep.witness ? "Bochner matrix with a negative eigenvalue found"
                           : "transform is negative; no finite point-set witness found";
  } else {
    rep.verdict = Verdict::cptp_evidence;
    rep.note =
        "no violation on the sampled point sets or the transform scan; this is a necessary-condition "
        "sweep, not a proof";
  }
  return rep;
}

NwResult nw_spectrum_test(const Filter& f, double eta_nw, int n_sets, std::uint64_t seed,
                          int set_size_max) {
  std::vector<PointSet> extra;
  if (const auto* k = std::get_if<filter::Klauder>(&f.spec())) extra.push_back(klauder_point_set(k->L));
  const SweepResult s = nw_sweep([&](cplx z) { return f.eval(z); }, eta_nw, n_sets, set_size_max,
                                 seed, extra);
  return NwResult{s.passed, s.witness, s.sets_tested};
}

PhysicalityReport classify_filter(const Filter& f, std::uint64_t seed, int n_sets) {
  PhysicalityReport rep = certify_cptp(f, n_sets, 12, seed);
  if (rep.verdict == Verdict::inconclusive) return rep;
  auto eval = [&](cplx z) { return f.eval(z); };
  rep.eta4 = nw_sweep(eval, 4.0, n_sets, 12, seed);
  rep.eta2 = nw_sweep(eval, 2.0, n_sets, 12, seed);
  if (rep.verdict == Verdict::not_cp && rep.eta4->passed) {
    rep.verdict = Verdict::positive_not_cp_candidate;
    rep.note += "; eta = 4 sweep passed, eta = 0 failed";
  }
  return rep;
}

SymmetryReport symmetry_property_check(const Filter& f, double eta_nw, int n_sets, std::uint64_t seed,
                                       double tol) {
  if (!f.is_real()) throw DomainError("symmetry_property_check: filter must be real-valued");
  SymmetryReport rep;
  std::vector<double> diff(n_sets);
  parallel_for(n_sets, [&](int i) {
    const PointSet s = sweep_point_set(seed, i, 12);
    diff[i] = std::abs(min_eig(bochner_matrix(f, s, eta_nw)) - min_eig(bochner_matrix(f, s, -eta_nw)));
  });
  for (double d : diff) rep.max_disagreement = std::max(rep.max_disagreement, d);
  rep.sets_tested = n_sets;
  rep.agree = rep.max_disagreement <= tol;
  return rep;
}

}  // namespace phasefilter
