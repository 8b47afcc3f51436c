#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "phasefilter/applications.hpp"

using namespace phasefilter;

TEST_CASE("loss channel in the Fock basis") {
  const cplx al(0.9, -0.3);
  const double eta = 0.7;
  const FockMatrix out = apply_loss_fock(to_fock(state::Coherent{al}, 40), eta);
  CHECK((out - to_fock(state::Coherent{eta * al}, 40)).cwiseAbs().maxCoeff() < 1e-12);
  const FockMatrix th = apply_loss_fock(to_fock(state::Thermal{0.8}, 60), eta);
  CHECK((th - to_fock(state::Thermal{eta * eta * 0.8}, 60)).topLeftCorner(30, 30).cwiseAbs().maxCoeff() < 1e-12);
  const FockMatrix f1 = apply_loss_fock(to_fock(state::Fock{1}, 5), eta);
  CHECK(f1(1, 1).real() == doctest::Approx(eta * eta));
  CHECK(f1(0, 0).real() == doctest::Approx(1 - eta * eta));
  CHECK_THROWS_AS(apply_loss_fock(f1, 1.2), DomainError);
}

TEST_CASE("channel output from coherent-state responses") {
  const StateSpec s = state::Fock{1};
  const Filter f = Filter::nonclassicality(2.0, 4);
  const double eta = std::sqrt(0.6);
  const ChannelOutput grid = channel_output_estimate(channel::Loss{eta}, s, f, {6.0, 129}, 30);
  const FockMatrix ref = apply_loss_fock(apply_filter_fock(s, f, 30).fock, eta);
  CHECK(trace_distance<double>(grid.rho, ref) < 1e-6);
  CHECK(grid.trace == doctest::Approx(1.0).epsilon(1e-6));

  // the same channel through the generic response interface
  channel::UserCoherentResponse user{[eta](PhasePoint a, int dim) {
    const FockVector v = coherent_vector<double>(eta * a.z(), dim);
    return FockMatrix(v * v.adjoint());
  }};
  const ChannelOutput generic = channel_output_estimate(user, s, f, {6.0, 129}, 30);
  CHECK((generic.rho - grid.rho).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(channel_output_distance_bound(s, f) == doctest::Approx(entanglement_fidelity(s, f).trace_distance_bound));
  CHECK_THROWS_AS(channel_output_estimate(channel::Loss{eta}, s, Filter::klauder(1.0)), UnphysicalFilterError);
}

TEST_CASE("regularized P of the Fock projectors") {
  const double r = 0.6, a = r / 2;
  const Filter g = Filter::gaussian(r);
  for (double rho : {0.0, 0.5, 1.3}) {
    const double e = std::exp(-rho * rho / a);
    const double p0 = (2 / pi) * e / (2 * a);
    const double p1 = (2 / pi) * (e / (2 * a) - (1 - rho * rho / a) * e / (2 * a * a));
    CHECK(povm_regularized_p(0, g, {rho, 0.0}) == doctest::Approx(p0).epsilon(1e-10));
    CHECK(povm_regularized_p(1, g, {0.0, rho}) == doctest::Approx(p1).epsilon(1e-10));
  }
  const PovmPTable t(g, 4, 6.0);
  for (int n = 0; n <= 4; ++n)
    for (double rho : {0.1, 0.77, 2.4, 7.0}) CHECK(std::abs(t(n, rho) - povm_regularized_p(n, g, {rho, 0.0})) < 1e-7);
  CHECK_THROWS_AS(povm_regularized_p(0, Filter::klauder(1.0), {0.1, 0.0}), UnsupportedRouteError);
}

TEST_CASE("Husimi sampler") {
  const StateSpec s = state::Thermal{0.6};
  HusimiSampler a(s, 5);
  HusimiSampler b = a.with_seed(5);
  double m = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const PhasePoint p = a.next();
    if (i < 5) CHECK(p.re == b.next().re);
    m += std::norm(p.z());
  }
  // E_Q |alpha|^2 = nbar + 1
  CHECK(m / n == doctest::Approx(1.6).epsilon(0.01));
  CHECK(a.acceptance() > 0.05);
  HusimiSampler sq(state::Squeezed{0.8, 0.0}, 1);
  for (int i = 0; i < 2000; ++i) sq.next();
}

TEST_CASE("heterodyne estimate of photon-number probabilities") {
  const StateSpec s = state::Thermal{0.5};
  const Filter g = Filter::gaussian(0.5);
  const EstimationResult e = heterodyne_estimate(s, g, FockProjectors{4}, 200000, 11);
  const FockMatrix ref = apply_filter_fock(s, g, 20).fock;
  for (int n = 0; n <= 4; ++n) {
    INFO("n = " << n);
    CHECK(std::abs(e.probabilities[n] - ref(n, n).real()) < 4 * e.standard_errors[n]);
  }
  CHECK(e.seed == 11);
  CHECK(e.bound == doctest::Approx(std::sqrt(1 - 2.0 / (2 + 0.5 * 2))).epsilon(1e-9));
  const EstimationResult again = heterodyne_estimate(s, g, FockProjectors{4}, 200000, 11);
  CHECK(again.probabilities == e.probabilities);
  CHECK_THROWS_AS(heterodyne_estimate(s, Filter::klauder(1.0), FockProjectors{2}, 100, 1), UnphysicalFilterError);
  CHECK_THROWS_AS(heterodyne_estimate(s, Filter::kernel(state::Coherent{cplx(0.5, 0.0)}), FockProjectors{2}, 100, 1),
                  UnsupportedRouteError);
}

TEST_CASE("probability distance bound") {
  for (const StateSpec& s : {StateSpec{state::Coherent{cplx(1.0, 0.0)}}, StateSpec{state::Fock{2}}}) {
    const ProbabilityBound b = probability_distance_bound(s, Filter::nonclassicality(2.0, 4));
    CHECK(b.holds);
    CHECK(b.measured <= b.bound);
  }
}

TEST_CASE("heterodyne anchors") {
  const EstimationResult v = heterodyne_estimate(state::Vacuum{}, Filter::gaussian(1.0), FockProjectors{0}, 200000, 3);
  CHECK(std::abs(v.probabilities[0] - 2.0 / 3.0) < 4 * v.standard_errors[0]);

  const EstimationResult t = heterodyne_estimate(state::Thermal{1.0}, Filter::nonclassicality(2.0, 4), FockProjectors{8}, 200000, 5);
  double sum = 0.0, err2 = 0.0;
  for (int n = 0; n <= 8; ++n) {
    sum += t.probabilities[n];
    err2 += t.standard_errors[n] * t.standard_errors[n];
  }
  CHECK(sum <= 1 + t.deficit + 3 * std::sqrt(err2));
  CHECK(t.deficit > 0.0);

  // standard errors fall as n^{-1/2}
  const StateSpec s = state::Coherent{cplx(1.0, 0.0)};
  const double e1 = heterodyne_estimate(s, Filter::gaussian(0.5), FockProjectors{2}, 4000, 9).standard_errors[1];
  const double e2 = heterodyne_estimate(s, Filter::gaussian(0.5), FockProjectors{2}, 400000, 9).standard_errors[1];
  CHECK(std::log(e2 / e1) / std::log(100.0) == doctest::Approx(-0.5).epsilon(0.2));
}

TEST_CASE("loss-channel grid route on classical states") {
  const Filter f = Filter::nonclassicality(2.0, 4);
  const double eta = 0.8;
  for (const StateSpec& s : {StateSpec{state::Vacuum{}}, StateSpec{state::Coherent{cplx(0.8, -0.4)}}, StateSpec{state::Thermal{0.7}}}) {
    INFO(describe(s));
    const ChannelOutput grid = channel_output_estimate(channel::Loss{eta}, s, f, {6.0, 129}, 30);
    const FockMatrix ref = apply_loss_fock(apply_filter_fock(s, f, 30).fock, eta);
    CHECK(trace_distance<double>(grid.rho, ref) < 1e-3);
  }
}

TEST_CASE("probability distance anchors") {
  const ProbabilityBound v = probability_distance_bound(state::Vacuum{}, Filter::gaussian(1.0));
  CHECK(v.bound == doctest::Approx(1 / std::sqrt(3.0)).epsilon(1e-9));
  CHECK(v.measured < v.bound);
  const ProbabilityBound f1 = probability_distance_bound(state::Fock{1}, Filter::gaussian(1.0), 10, 40);
  CHECK(f1.measured <= f1.bound + 1e-6);
  // pure state at the width solved for epsilon
  const double eps = 0.02;
  const WidthSolution w = solve_width(state::Fock{1}, nonclassicality_family(4), eps);
  CHECK(probability_distance_bound(state::Fock{1}, Filter::nonclassicality(w.width, 4)).bound <= std::sqrt(eps) + 1e-12);
}
