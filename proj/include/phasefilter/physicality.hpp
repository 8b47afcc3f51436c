#pragma once

// Bochner / Narcowich-Wigner positivity sweeps.
//   F_jk = f(xi_j - xi_k) exp[(eta/4)(xi_j xi_k* - xi_j* xi_k)]
// eta = 0 is Bochner's test (Omega~ is a density), eta = 2 is the test a
// characteristic function of a state passes. Passing sweeps are evidence only:
// positivity needs every finite point set.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "phasefilter/filters.hpp"

namespace phasefilter {

enum class PointSetOrigin { random_gaussian, lattice, klauder_set, explicit_points };

struct PointSet {
  std::vector<PhasePoint> points;
  PointSetOrigin origin = PointSetOrigin::explicit_points;
  // scale for random sets, spacing for lattices, L for the Klauder set
  double parameter = 0.0;
};

// {u = -L, 0, L} on the real canonical axis
PointSet klauder_point_set(double L);
PointSet make_point_set(std::vector<PhasePoint> points);

// set number `index` of a seeded sweep: even indices random Gaussian
// (scales 0.5, 1, 2, 4), odd indices lattice patches (spacings 0.25 .. 2)
PointSet sweep_point_set(std::uint64_t seed, int index, int size_max);

Eigen::MatrixXcd bochner_matrix(const std::function<cplx(cplx)>& f, const PointSet& points,
                                double eta_nw);
Eigen::MatrixXcd bochner_matrix(const Filter& f, const PointSet& points, double eta_nw);

double psd_tolerance(int dim);

struct Witness {
  PointSet points;
  double eta_nw = 0.0;
  double min_eigenvalue = 0.0;
};

// negative transform value found by the direct scan
struct FourierWitness {
  PhasePoint alpha;
  double value = 0.0;
};

struct SweepResult {
  bool passed = true;
  int sets_tested = 0;
  double eta_nw = 0.0;
  double worst_eigenvalue = 0.0;  // smallest min eigenvalue seen (relative to tolerance)
  std::optional<Witness> witness;
};

// min eigenvalue sweep of bochner_matrix over seeded point sets; stops at the
// first failure
SweepResult nw_sweep(const std::function<cplx(cplx)>& f, double eta_nw, int n_sets, int set_size_max,
                     std::uint64_t seed, const std::vector<PointSet>& extra = {});

enum class Verdict { cptp_evidence, not_cp, positive_not_cp_candidate, inconclusive };
std::string to_string(Verdict v);

struct PhysicalityReport {
  Verdict verdict = Verdict::inconclusive;
  std::optional<Witness> witness;
  std::optional<FourierWitness> fourier_witness;
  int sets_tested = 0;
  double tolerance = 1e-9;
  std::uint64_t seed = 0;
  // filled by classify_filter
  std::optional<SweepResult> eta4;
  std::optional<SweepResult> eta2;
  std::string note;
};

PhysicalityReport certify_cptp(const Filter& f, int n_sets = 200, int set_size_max = 12,
                               std::uint64_t seed = 1);

struct NwResult {
  bool pass = true;
  std::optional<Witness> witness;
  int sets_tested = 0;
};
NwResult nw_spectrum_test(const Filter& f, double eta_nw, int n_sets = 200, std::uint64_t seed = 1,
                          int set_size_max = 12);

PhysicalityReport classify_filter(const Filter& f, std::uint64_t seed = 1, int n_sets = 200);

struct SymmetryReport {
  double max_disagreement = 0.0;
  int sets_tested = 0;
  bool agree = true;
};
// min eigenvalue at +eta and -eta on the same point sets
SymmetryReport symmetry_property_check(const Filter& f, double eta_nw, int n_sets = 50,
                                       std::uint64_t seed = 1, double tol = 1e-9);

}  // namespace phasefilter
