#pragma once

// Channel-output estimation from coherent-state responses, and heterodyne
// estimation of POVM outcome probabilities through regularized P functions.

#include <cstdint>
#include <functional>
#include <random>
#include <variant>
#include <vector>

#include "phasefilter/bounds.hpp"
#include "phasefilter/radial_profile.hpp"

namespace phasefilter {

namespace channel {
// |alpha> -> |eta alpha>: amplitude factor eta, intensity transmissivity eta^2
struct Loss {
  double eta;
};
// arbitrary response E(|alpha><alpha|), truncated to the requested dimension
struct UserCoherentResponse {
  std::function<FockMatrix(PhasePoint, int)> response;
};
}  // namespace channel

using ChannelSpec = std::variant<channel::Loss, channel::UserCoherentResponse>;

struct GridParams {
  double half_extent = 6.0;
  int n_points = 257;
};

struct ChannelOutput {
  FockMatrix rho;
  double trace = 0.0;
  double min_eigenvalue = 0.0;
};

// E(rho_Omega) = int P_Omega(alpha) E(|alpha><alpha|) d^2 alpha on the grid
ChannelOutput channel_output_estimate(const ChannelSpec& ch, const StateSpec& state,
                                      const Filter& filter, const GridParams& grid = {},
                                      int dim = 40);

// Kraus form of the loss channel on a truncated density matrix:
// A_k = sum_n sqrt(C(n, k)) eta^{n-k} (1 - eta^2)^{k/2} |n-k><n|
FockMatrix apply_loss_fock(const FockMatrix& rho, double eta);

// sqrt(1 - F_e): bounds D(E(rho), E(rho_Omega)) for every channel E
double channel_output_distance_bound(const StateSpec& state, const Filter& filter);

struct FockProjectors {
  int n_max;
};
using PovmSpec = std::variant<FockProjectors>;

// P_Omega(n|alpha) = (2/pi) int L_n(t^2) Omega(t) J0(2|alpha| t) t dt
double povm_regularized_p(int n, const Filter& filter, PhasePoint alpha);

// the same for n = 0 .. n_max, tabulated in |alpha| and splined
class PovmPTable {
 public:
  PovmPTable(const Filter& filter, int n_max, double r_max, int n_knots = 2048);
  double operator()(int n, double rho) const;
  int n_max() const { return static_cast<int>(profiles_.size()) - 1; }
  double r_max() const { return r_max_; }

 private:
  Filter filter_;
  std::vector<RadialProfile> profiles_;
  double r_max_;
};

struct EstimationResult {
  std::vector<double> probabilities;
  std::vector<double> standard_errors;
  long n_samples = 0;
  std::uint64_t seed = 0;
  double bound = 0.0;    // sqrt(1 - F_e)
  double deficit = 0.0;  // 1 - sum_{n <= n_max} Tr[rho_Omega Pi_n]
  double acceptance = 0.0;
};

EstimationResult heterodyne_estimate(const StateSpec& state, const Filter& filter,
                                     const PovmSpec& povm, long n_samples, std::uint64_t seed);

// seeded draws from Q by rejection under c exp(-|alpha|^2 / (1 + nbar))
class HusimiSampler {
 public:
  HusimiSampler(const StateSpec& state, std::uint64_t seed);
  // same envelope, fresh stream
  HusimiSampler with_seed(std::uint64_t seed) const;
  PhasePoint next();
  double envelope_width() const { return width_; }
  double envelope_constant() const { return c_; }
  double acceptance() const { return tried_ ? double(accepted_) / double(tried_) : 0.0; }

 private:
  std::function<double(cplx)> q_;
  double width_ = 1.0;  // envelope exp(-|alpha|^2 / width)
  double c_ = 1.0;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  long tried_ = 0, accepted_ = 0;
};

struct ProbabilityBound {
  double bound = 0.0;  // sqrt(1 - F_e)
  // measured (1/2) sum_n |p(n|rho) - p(n|rho_Omega)| when computed in Fock space
  double measured = 0.0;
  bool holds = true;
};
ProbabilityBound probability_distance_bound(const StateSpec& state, const Filter& filter,
                                            int n_max = 10, int dim = 40);

}  // namespace phasefilter
