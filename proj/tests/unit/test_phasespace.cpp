#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "phasefilter/pqd.hpp"
#include "phasefilter/quadrature.hpp"
#include "phasefilter/radial_profile.hpp"
#include "phasefilter/states.hpp"

using namespace phasefilter;

namespace {

std::vector<StateSpec> catalog() {
  return {state::Vacuum{},          state::Coherent{cplx(0.8, -0.4)}, state::Fock{3},
          state::Thermal{0.7},      state::Squeezed{0.4, 0.9},        state::Cat{cplx(1.1, 0.3), 1},
          state::Cat{cplx(0.9, 0.0), -1}};
}

double factorial(int n) { return std::tgamma(n + 1.0); }

}  // namespace

TEST_CASE("displacement block matches the truncated matrix exponential away from the edge") {
  const cplx g(0.7, 0.3);
  const int big = 90;
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(big, big);
  for (int n = 1; n < big; ++n) a(n - 1, n) = std::sqrt(double(n));
  const Eigen::MatrixXcd gen = g * a.adjoint() - std::conj(g) * a;
  const Eigen::MatrixXcd d = gen.exp();
  const FockMatrix ours = displacement_matrix(PhasePoint(g), 20);
  CHECK((ours - d.topLeftCorner(20, 20)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("coherent vector is D(alpha)|0>") {
  const cplx al(-0.5, 1.2);
  const FockVector v = coherent_vector<double>(al, 40);
  const FockMatrix d = displacement_block<double>(al, 40, 1);
  CHECK((v - d.col(0)).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("closed-form characteristic functions") {
  const cplx xi(0.6, -0.35);
  const double x = std::norm(xi);
  CHECK(std::abs(charfn_eval(state::Vacuum{}, PhasePoint(xi)) - std::exp(-x / 2)) < 1e-14);
  const cplx al(0.8, 0.2);
  const cplx coh = std::exp(-x / 2 + xi * std::conj(al) - std::conj(xi) * al);
  CHECK(std::abs(charfn_eval(state::Coherent{al}, PhasePoint(xi)) - coh) < 1e-14);
  // L_2(x) = 1 - 2x + x^2/2
  CHECK(std::abs(charfn_eval(state::Fock{2}, PhasePoint(xi)) - std::exp(-x / 2) * (1 - 2 * x + x * x / 2)) < 1e-14);
  CHECK(std::abs(charfn_eval(state::Thermal{0.5}, PhasePoint(xi)) - std::exp(-x)) < 1e-14);
}

TEST_CASE("characteristic function equals Tr[rho D(xi)] from the Fock matrix") {
  const cplx xi(0.45, 0.3);
  for (const StateSpec& s : catalog()) {
    const FockMatrix rho = to_fock(s, 60);
    const FockMatrix d = displacement_matrix(PhasePoint(xi), 60);
    const cplx tr = (rho * d).trace();
    INFO(describe(s));
    CHECK(std::abs(tr - charfn_eval(s, PhasePoint(xi))) < 1e-10);
  }
}

TEST_CASE("characteristic function: Phi(0) = 1 and Phi(-xi) = conj Phi(xi)") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  for (const StateSpec& s : catalog()) {
    INFO(describe(s));
    CHECK(std::abs(charfn_eval(s, {0.0, 0.0}) - 1.0) < 1e-12);
    for (int k = 0; k < 20; ++k) {
      const PhasePoint p(n(rng), n(rng));
      CHECK(std::abs(charfn_eval(s, PhasePoint(-p.z())) - std::conj(charfn_eval(s, p))) < 1e-12);
    }
  }
}

TEST_CASE("state Fock matrices are normalized densities") {
  for (const StateSpec& s : catalog()) {
    INFO(describe(s));
    const FockMatrix rho = to_fock(s, 60);
    CHECK(std::abs(rho.trace().real() - 1.0) < 1e-10);
    CHECK(hermiticity_defect<double>(rho) < 1e-14);
    CHECK(min_eigenvalue<double>(rho) > -1e-12);
  }
}

TEST_CASE("photon statistics against closed forms") {
  const double r = 0.6;
  const std::vector<double> p = photon_distribution(state::Squeezed{r, 0.0}, 10);
  for (int m = 0; m <= 5; ++m) {
    const double ref = factorial(2 * m) / (std::pow(4.0, m) * factorial(m) * factorial(m)) *
                       std::pow(std::tanh(r), 2 * m) / std::cosh(r);
    CHECK(p[2 * m] == doctest::Approx(ref).epsilon(1e-12));
    if (2 * m + 1 <= 10) CHECK(std::abs(p[2 * m + 1]) < 1e-15);
  }
  const std::vector<double> th = photon_distribution(state::Thermal{0.5}, 6);
  for (int n = 0; n <= 6; ++n) CHECK(th[n] == doctest::Approx(std::pow(0.5, n) / std::pow(1.5, n + 1)));
  CHECK(mean_photon_number(state::Squeezed{r, 1.0}) == doctest::Approx(std::sinh(r) * std::sinh(r)));
  const double a2 = 1.21;
  CHECK(mean_photon_number(state::Cat{cplx(1.1, 0.0), 1}) == doctest::Approx(a2 * std::tanh(a2)));
  CHECK(mean_photon_number(state::Cat{cplx(1.1, 0.0), -1}) == doctest::Approx(a2 / std::tanh(a2)));
}

TEST_CASE("Husimi function against <alpha|rho|alpha>/pi") {
  const cplx al(0.4, -0.7);
  const FockVector c = coherent_vector<double>(al, 60);
  for (const StateSpec& s : catalog()) {
    INFO(describe(s));
    const double ref = (c.adjoint() * to_fock(s, 60) * c)(0, 0).real() / pi;
    CHECK(husimi_q(s, PhasePoint(al)) == doctest::Approx(ref).epsilon(1e-10));
  }
}

TEST_CASE("Wigner function values") {
  CHECK(wigner(state::Vacuum{}, {0, 0}) == doctest::Approx(2 / pi));
  CHECK(wigner(state::Fock{1}, {0, 0}) == doctest::Approx(-2 / pi));
  const PhasePoint a(0.3, 0.5);
  const double x = std::norm(a.z());
  CHECK(wigner(state::Fock{1}, a) == doctest::Approx(2 / pi * (4 * x - 1) * std::exp(-2 * x)).epsilon(1e-12));
  // cat Wigner from the parity sum against a Fock-space parity computation
  const StateSpec cat = state::Cat{cplx(1.0, 0.0), 1};
  const FockMatrix rho = to_fock(cat, 60);
  const FockMatrix d = displacement_matrix(PhasePoint(-a.z()), 60);
  const FockMatrix m = d * rho * d.adjoint();
  double par = 0.0;
  for (int k = 0; k < 40; ++k) par += (k % 2 ? -1.0 : 1.0) * m(k, k).real();
  CHECK(wigner(cat, a) == doctest::Approx(2 / pi * par).epsilon(1e-10));
}

TEST_CASE("s-ordered grids against closed forms") {
  SUBCASE("Wigner of Fock 1") {
    const PQDGrid g = spqd_grid(StateSpec{state::Fock{1}}, 0.0, 4.0, 65);
    double worst = 0.0;
    for (int iy = 0; iy < 65; ++iy)
      for (int ix = 0; ix < 65; ++ix) {
        const double x = std::norm(g.point(ix, iy).z());
        worst = std::max(worst, std::abs(g.values(iy, ix) - 2 / pi * (4 * x - 1) * std::exp(-2 * x)));
      }
    CHECK(worst < 1e-9);
    CHECK(std::abs(g.normalization_residual()) < 1e-6);
  }
  SUBCASE("Q of vacuum") {
    const PQDGrid g = spqd_grid(StateSpec{state::Vacuum{}}, -1.0, 5.0, 41);
    CHECK(g.values(20, 20) == doctest::Approx(1 / pi).epsilon(1e-10));
    CHECK(g.min_value() > -1e-12);
  }
  SUBCASE("P of a thermal state") {
    const double nbar = 0.8;
    const PQDGrid g = spqd_grid(StateSpec{state::Thermal{nbar}}, 1.0, 5.0, 41);
    double worst = 0.0;
    for (int iy = 0; iy < 41; ++iy)
      for (int ix = 0; ix < 41; ++ix) {
        const double x = std::norm(g.point(ix, iy).z());
        worst = std::max(worst, std::abs(g.values(iy, ix) - std::exp(-x / nbar) / (pi * nbar)));
      }
    CHECK(worst < 1e-9);
  }
  SUBCASE("s-ordered point against grid") {
    const CharFn phi = characteristic_function(state::Squeezed{0.3, 0.4});
    const PQDGrid g = spqd_grid(phi, 0.2, 3.0, 13);
    CHECK(spqd_point(phi, 0.2, g.point(4, 9)) == doctest::Approx(g.values(9, 4)).epsilon(1e-9));
  }
}

TEST_CASE("singular P functions are refused") {
  CHECK_THROWS_AS(spqd_grid(StateSpec{state::Fock{1}}, 1.0, 4.0, 33), SingularPqdError);
  CHECK_THROWS_AS(spqd_grid(StateSpec{state::Coherent{cplx(1.0, 0.0)}}, 1.0, 4.0, 33), SingularPqdError);
  CHECK_THROWS_AS(spqd_grid(StateSpec{state::Squeezed{0.3, 0.0}}, 1.0, 4.0, 33), SingularPqdError);
  CHECK_THROWS_AS(spqd_grid(StateSpec{state::Vacuum{}}, 1.5, 4.0, 33), DomainError);
}

TEST_CASE("state validation") {
  CHECK_THROWS_AS(validate(state::Fock{-1}), ValidationError);
  CHECK_THROWS_AS(validate(state::Thermal{-0.1}), ValidationError);
  CHECK_THROWS_AS(validate(state::Cat{cplx(0.0, 0.0), -1}), ValidationError);
  CHECK_THROWS_AS(validate(state::Cat{cplx(1.0, 0.0), 2}), ValidationError);
  FockMatrix bad = FockMatrix::Zero(2, 2);
  bad(0, 0) = 1.5;
  bad(1, 1) = -0.5;
  CHECK_THROWS_AS(validate(state::Numeric{bad}), PhysicalityError);
  CHECK_THROWS_AS(charfn_eval(state::Vacuum{}, {std::nan(""), 0.0}), DomainError);
}

TEST_CASE("numeric states reproduce their catalog parents") {
  const StateSpec cat = state::Cat{cplx(0.7, 0.4), 1};
  const StateSpec num = state::Numeric{to_fock(cat, 40)};
  const cplx xi(0.5, 0.6);
  CHECK(std::abs(charfn_eval(num, PhasePoint(xi)) - charfn_eval(cat, PhasePoint(xi))) < 1e-12);
  CHECK(wigner(num, {0.2, -0.1}) == doctest::Approx(wigner(cat, {0.2, -0.1})).epsilon(1e-10));
}

TEST_CASE("two-mode squeezed vacuum overlap") {
  const PhasePoint g(0.5, -0.3);
  for (double chi : {0.0, 0.3, 0.8}) {
    CHECK(tmsv_displaced_overlap(g, chi) == doctest::Approx(tmsv_displaced_overlap_fock(g, chi, 200)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(tmsv_displaced_overlap(g, 1.0), DomainError);
}

TEST_CASE("fidelity and trace distance") {
  const cplx a(0.3, 0.1), b(-0.2, 0.6);
  const FockMatrix ra = to_fock(state::Coherent{a}, 40), rb = to_fock(state::Coherent{b}, 40);
  const double overlap = std::exp(-std::norm(a - b));
  CHECK(fidelity<double>(ra, rb) == doctest::Approx(overlap).epsilon(1e-10));
  CHECK(trace_distance<double>(ra, rb) == doctest::Approx(std::sqrt(1 - overlap)).epsilon(1e-10));
  const FockMatrix t1 = to_fock(state::Thermal{0.3}, 40), t2 = to_fock(state::Thermal{0.9}, 40);
  CHECK(fidelity<double>(t1, t1) == doctest::Approx(1.0).epsilon(1e-10));
  // commuting states: classical fidelity (sum sqrt(p q))^2
  double bc = 0.0, td = 0.0;
  for (int n = 0; n < 40; ++n) {
    bc += std::sqrt(t1(n, n).real() * t2(n, n).real());
    td += 0.5 * std::abs(t1(n, n).real() - t2(n, n).real());
  }
  CHECK(fidelity<double>(t1, t2) == doctest::Approx(bc * bc).epsilon(1e-10));
  CHECK(trace_distance<double>(t1, t2) == doctest::Approx(td).epsilon(1e-10));
}

TEST_CASE("quadrature helpers") {
  for (double k : {0.0, 1.0, 3.5}) {
    const double v = hankel_j0([](double t) { return std::exp(-t * t); }, k, 10.0);
    CHECK(v == doctest::Approx(std::exp(-k * k / 4) / 2).epsilon(1e-13));
  }
  const double adapt = integrate_adaptive([](double x) { return std::sin(x); }, 0.0, pi, 1e-13, 4, 10);
  CHECK(adapt == doctest::Approx(2.0).epsilon(1e-13));
  const auto r = decay_radius([](double t) { return std::exp(-t * t); }, 1e-12, 50.0);
  REQUIRE(r.has_value());
  CHECK(std::exp(-*r * *r) < 1e-12);
}

TEST_CASE("radial profile spline") {
  auto f = [](double r) { return std::exp(-r * r) * std::cos(r); };
  RadialProfile p = RadialProfile::sample(f, 6.0, 257);
  CHECK(p.estimate_interpolation_error(f) < 1e-7);
  CHECK(p(1.2345) == doctest::Approx(f(1.2345)).epsilon(1e-7));
  CHECK(p(10.0) == 0.0);
}

TEST_CASE("anchor values") {
  CHECK(std::abs(charfn_eval(state::Fock{1}, {1.0, 0.0})) < 1e-15);
  CHECK(charfn_eval(state::Thermal{1.0}, {1.0, 0.0}).real() == doctest::Approx(std::exp(-1.5)).epsilon(1e-14));
  const StateSpec num = state::Numeric{to_fock(state::Coherent{cplx(0.5, 0.0)}, 30)};
  CHECK(std::abs(charfn_eval(num, {0.0, 0.3}) - charfn_eval(state::Coherent{cplx(0.5, 0.0)}, {0.0, 0.3})) < 1e-10);

  CHECK((displacement_matrix(PhasePoint{0.0, 0.0}, 5) - FockMatrix::Identity(5, 5)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(displacement_matrix(PhasePoint{1.0, 0.0}, 1)(0, 0).real() == doctest::Approx(std::exp(-0.5)));
  const FockMatrix d = displacement_matrix(PhasePoint{0.7, 0.2}, 40);
  CHECK((FockMatrix(d * d.adjoint()).topLeftCorner(20, 20) - FockMatrix::Identity(20, 20)).cwiseAbs().maxCoeff() < 1e-8);
  const FockMatrix dm = displacement_matrix(PhasePoint{-0.7, -0.2}, 40);
  CHECK((FockMatrix(d * dm).topLeftCorner(20, 20) - FockMatrix::Identity(20, 20)).cwiseAbs().maxCoeff() < 1e-8);

  CHECK(tmsv_displaced_overlap({0.0, 0.0}, 0.5) == doctest::Approx(1.0));
  CHECK(tmsv_displaced_overlap({1.0, 0.0}, 0.0) == doctest::Approx(std::exp(-0.5)));
  CHECK(tmsv_displaced_overlap({1.0, 0.0}, 0.8) == doctest::Approx(std::exp(-0.5 - 0.64 / 0.36)).epsilon(1e-12));
  CHECK(tmsv_displaced_overlap_fock({1.0, 0.0}, 0.8, 60) ==
        doctest::Approx(tmsv_displaced_overlap({1.0, 0.0}, 0.8)).epsilon(1e-8));

  const FockMatrix vac = to_fock(state::Vacuum{}, 30), coh = to_fock(state::Coherent{cplx(1.0, 0.0)}, 30);
  CHECK(fidelity<double>(vac, vac) == doctest::Approx(1.0));
  CHECK(fidelity<double>(vac, coh) == doctest::Approx(std::exp(-1.0)).epsilon(1e-10));
  CHECK(fidelity<double>(to_fock(state::Vacuum{}, 40), to_fock(state::Thermal{0.5}, 40)) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-10));
  CHECK(trace_distance<double>(vac, vac) == doctest::Approx(0.0));
  CHECK(trace_distance<double>(vac, to_fock(state::Fock{1}, 30)) == doctest::Approx(1.0));
  CHECK(trace_distance<double>(vac, coh) == doctest::Approx(std::sqrt(1 - std::exp(-1.0))).epsilon(1e-10));
  FockMatrix neg = FockMatrix::Zero(2, 2);
  neg(0, 0) = 1.1;
  neg(1, 1) = -0.1;
  CHECK_THROWS_AS(fidelity<double>(neg, vac.topLeftCorner(2, 2)), PhysicalityError);
}

TEST_CASE("every catalog state passes the eta = 2 positivity test on small sets") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_int_distribution<int> size(2, 6);
  for (const StateSpec& s : catalog()) {
    INFO(describe(s));
    double worst = 1.0;
    for (int set = 0; set < 50; ++set) {
      const int k = size(rng);
      std::vector<cplx> x(k);
      for (auto& z : x) z = cplx(n(rng), n(rng));
      Eigen::MatrixXcd m(k, k);
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
          m(a, b) = charfn_eval(s, PhasePoint(x[a] - x[b])) *
                    std::exp(0.5 * (x[a] * std::conj(x[b]) - std::conj(x[a]) * x[b]));
      worst = std::min(worst, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(m).eigenvalues().minCoeff());
    }
    CHECK(worst >= -1e-9);
  }
}

TEST_CASE("Q grid agrees with Fock-space projections") {
  for (const StateSpec& s : {StateSpec{state::Cat{cplx(1.0, 0.5), -1}}, StateSpec{state::Squeezed{0.4, 0.3}}}) {
    const PQDGrid g = spqd_grid(s, -1.0, 5.0, 21);
    const FockMatrix rho = to_fock(s, 40);
    double worst = 0.0;
    for (int iy = 0; iy < 21; ++iy)
      for (int ix = 0; ix < 21; ++ix) {
        const FockVector c = coherent_vector<double>(g.point(ix, iy).z(), 40);
        worst = std::max(worst, std::abs(g.values(iy, ix) - (c.adjoint() * rho * c)(0, 0).real() / pi));
      }
    INFO(describe(s));
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("Wigner marginal is the quadrature distribution") {
  // x = Re alpha has vacuum variance 1/4; Hermite functions in u = sqrt(2) x
  const StateSpec s = state::Cat{cplx(1.2, 0.4), 1};
  const int dim = 40;
  const FockMatrix rho = to_fock(s, dim);
  const PQDGrid g = spqd_grid(s, 0.0, 5.0, 101);
  double worst = 0.0;
  for (int ix = 10; ix < 91; ix += 5) {
    const double x = g.coord(ix);
    double marg = 0.0;
    for (int iy = 0; iy < g.n_points; ++iy) marg += g.values(iy, ix) * g.spacing();
    const double u = std::sqrt(2.0) * x;
    Eigen::VectorXd psi(dim);
    psi(0) = std::pow(2.0 / pi, 0.25) * std::exp(-x * x);
    psi(1) = std::sqrt(2.0) * u * psi(0);
    for (int n = 1; n + 1 < dim; ++n)
      psi(n + 1) = std::sqrt(2.0 / (n + 1)) * u * psi(n) - std::sqrt(double(n) / (n + 1)) * psi(n - 1);
    const double ref = (psi.transpose().cast<cplx>() * rho * psi.cast<cplx>())(0, 0).real();
    worst = std::max(worst, std::abs(marg - ref));
  }
  CHECK(worst < 1e-5);
}
