#pragma once

// Entanglement fidelity F_e = int Omega~(alpha) |Phi(alpha)|^2 d^2 alpha and the
// bounds it controls: F_e <= F(rho, rho_Omega) and D(rho, rho_Omega) <= sqrt(1 - F_e).

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "phasefilter/filtering_map.hpp"

namespace phasefilter {

enum class FidelityMethod { quadrature, mc };

struct FidelityOptions {
  FidelityMethod method = FidelityMethod::quadrature;
  long n_samples = 1000000;
  std::uint64_t seed = 1;
  double tol = 1e-11;
};

struct FidelityCertificate {
  double f_e = 0.0;
  FidelityMethod method = FidelityMethod::quadrature;
  long n_samples = 0;
  std::uint64_t seed = 0;
  double error_estimate = 0.0;
  double trace_distance_bound = 0.0;  // sqrt(1 - f_e)
  std::optional<double> epsilon_target;
  std::optional<double> width_used;
};

FidelityCertificate entanglement_fidelity(const StateSpec& state, const Filter& filter,
                                          const FidelityOptions& opt = {});

struct PureFidelity {
  double integral = 0.0;  // int Omega~ |Phi|^2
  double fock = 0.0;      // <psi|rho_Omega|psi>
  double difference() const { return std::abs(integral - fock); }
};
PureFidelity pure_state_fidelity_exact(const StateSpec& state, const Filter& filter, int dim = 40);

struct BoundReport {
  double f_e = 0.0;
  double fidelity = 0.0;        // Uhlmann F(rho, rho_Omega)
  double trace_distance = 0.0;  // D(rho, rho_Omega)
  double bound = 0.0;           // sqrt(1 - F_e)
  double fidelity_slack = 0.0;  // F - F_e
  double distance_slack = 0.0;  // bound - D
  double tolerance = 1e-6;
  double leakage = 0.0;
  bool holds = false;
};

BoundReport fidelity_bound_check(const StateSpec& state, const Filter& filter, int dim = 40,
                                 double tol = 1e-6);
BoundReport trace_distance_bound_check(const StateSpec& state, const Filter& filter, int dim = 40,
                                       double tol = 1e-6);

// one-parameter filter family indexed by its width (larger = closer to identity)
struct FilterFamily {
  std::string name;
  std::function<Filter(double)> make;
  std::function<double(const Filter&)> width;
};
FilterFamily nonclassicality_family(double q);
// width 1/r
FilterFamily gaussian_family();

struct WidthSolution {
  double width = 0.0;
  FidelityCertificate certificate;
  int evaluations = 0;
};

struct WidthSearchOptions {
  double start = 1.0;
  double cap = 65536.0;
  int bisections = 40;
};

// smallest width on the doubling-then-bisection search with F_e >= 1 - epsilon
WidthSolution solve_width(const StateSpec& state, const FilterFamily& family, double epsilon,
                          const WidthSearchOptions& opt = {});

}  // namespace phasefilter
