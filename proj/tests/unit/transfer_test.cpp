#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "rlab/dynamics/induced.hpp"
#include "rlab/dynamics/measure.hpp"
#include "rlab/specfun/constants.hpp"
#include "rlab/transfer/asymptotics.hpp"
#include "rlab/transfer/resolvent.hpp"
#include "rlab/transfer/spectral.hpp"
#include "rlab/transfer/ulam.hpp"

using namespace rlab;
using std::numbers::pi;

namespace {

struct Doubling {
  double c = 1.0;  // constant roof
  std::pair<double, double> operator()(double x) const {
    const double y = 2 * x;
    return {y < 1 ? y : y - 1, c};
  }
};

UlamOperator make_op(const InducedSystem& sys, int grid) {
  UlamOptions o;
  o.grid_size = grid;
  return build_ulam(sys, sys.lo(), sys.hi(), o);
}

const InducedSystem& flagship() {
  static const InducedSystem sys;
  return sys;
}

const UlamOperator& flagship_op() {
  static const UlamOperator op = make_op(flagship(), 4096);
  return op;
}

double row_sum_error(const CsrMatrix& P) {
  double worst = 0;
  for (int j = 0; j < P.n; ++j) {
    cplx s = 0;
    for (auto e = P.row_ptr[j]; e < P.row_ptr[j + 1]; ++e) s += P.val[e];
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

}  // namespace

TEST(Ulam, DoublingMapTwoCells) {
  UlamOptions o;
  o.grid_size = 2;
  const auto op = build_ulam(Doubling{}, 0.0, 1.0, o);
  const auto& P = op.untwisted();
  for (int j = 0; j < 2; ++j) {
    ASSERT_EQ(P.row_ptr[j + 1] - P.row_ptr[j], 2u);
    for (auto e = P.row_ptr[j]; e < P.row_ptr[j + 1]; ++e) EXPECT_NEAR(P.val[e].real(), 0.5, 1e-15);
  }
  const auto m = stationary_masses(op);
  EXPECT_NEAR(m[0], 0.5, 1e-12);
  EXPECT_NEAR(m[1], 0.5, 1e-12);
}

TEST(Ulam, ConstructionErrors) {
  UlamOptions o;
  o.grid_size = 1;
  EXPECT_THROW(build_ulam(Doubling{}, 0.0, 1.0, o), domain_error);
  o.grid_size = 8;
  o.samples_per_cell = 5;
  EXPECT_THROW(build_ulam(Doubling{}, 0.0, 1.0, o), domain_error);
}

TEST(Ulam, StochasticAndModulusPreserving) {
  const auto& op = flagship_op();
  EXPECT_LT(row_sum_error(op.untwisted()), 1e-10);
  const auto& P = op.untwisted();
  for (double b : {0.01, 1.0, 7.0}) {
    const auto Q = op.twisted(cplx(0, b), TwistMode::cell_mean);
    const auto G = op.twisted(cplx(0, b), TwistMode::galerkin);
    const auto Qm = op.twisted(cplx(0, -b), TwistMode::galerkin);
    ASSERT_EQ(Q.val.size(), P.val.size());
    for (std::size_t e = 0; e < P.val.size(); e += 97) {
      EXPECT_NEAR(std::abs(Q.val[e]), P.val[e].real(), 1e-15);  // mean-roof twist: exact modulus
      EXPECT_LE(std::abs(G.val[e]), P.val[e].real() + 1e-15);   // pointwise twist: averaging contracts
      EXPECT_EQ(Qm.val[e], std::conj(G.val[e]));                 // b <-> -b conjugation
    }
  }
}

TEST(Ulam, StationaryVectorIsTheInvariantMeasure) {
  const auto& op = flagship_op();
  const auto pr = leading_eigenvalue(op, 0.0);
  EXPECT_NEAR(std::abs(pr.lambda - 1.0), 0.0, 1e-10);
  EXPECT_LT(pr.residual, 1e-10);
  const auto m = stationary_masses(op);
  for (double x : m) EXPECT_GT(x, 0.0);
  const auto mu = invariant_measure_from(op);
  EXPECT_EQ(mu.masses, m);  // same object
  // spectral gap at b = 0
  EXPECT_LT(pr.gap, 1 - 1e-2);
  EXPECT_GT(pr.gap, 0.0);
}

TEST(Spectral, ConstantRoofEigenvalueIsPureRotation) {
  const double c = 1.5;
  UlamOptions o;
  o.grid_size = 64;
  const auto dbl = build_ulam(Doubling{c}, 0.0, 1.0, o);
  for (double b : {0.3, 1.0, 2 * pi / c}) {
    // P(ib) = e^{-ibc} P; the sign of the twist fixes the orientation
    const auto pr = leading_eigenvalue(dbl, b);
    EXPECT_NEAR(std::abs(pr.lambda), 1.0, 1e-9) << b;
    EXPECT_NEAR(std::abs(pr.lambda - std::exp(cplx(0, -b * c))), 0.0, 1e-8) << b;
  }
  // intermittent map with tau0 = c: induced tau = c sigma, lattice of span c
  const InducedSystem lattice(IntermittentMapSpec::make(), RoofSpec::constant(c));
  const auto op = make_op(lattice, 512);
  const auto scan = aperiodicity_scan(op, {2 * pi / c});
  EXPECT_NEAR(scan.sup, 1.0, 1e-8);
  EXPECT_FALSE(scan.pass);
}

TEST(Spectral, SmallFrequencyEigenvalue) {
  // At b = 0.01 the leading term c0 Gamma(1/4) b^{3/4} sets the scale of |1 - lambda|
  // (the drift term i D b is still ~40% of it); the argument sits below 3 pi / 8 and
  // approaches it as b shrinks.
  const auto& op = flagship_op();
  const double c0 = tail_constant(flagship(), invariant_measure_from(op), 1e10);
  const double lead = c0 * std::tgamma(0.25) * std::pow(0.01, 0.75);
  const auto z = 1.0 - leading_eigenvalue(op, 0.01).lambda;
  EXPECT_GT(std::abs(z), 0.0);
  EXPECT_GT(std::abs(z) / lead, 0.5);
  EXPECT_LT(std::abs(z) / lead, 1.5);
  double prev = 0;
  for (double b : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const double a = std::arg(1.0 - leading_eigenvalue(op, b).lambda);
    EXPECT_GT(a, prev);
    EXPECT_LT(a, 3 * pi / 8 + 0.05);
    prev = a;
  }
  EXPECT_NEAR(prev, 3 * pi / 8, 0.1);
}

TEST(Spectral, AsymptoticsMatchRenewalConstant) {
  // deep small-frequency window, drift-corrected fit; c_beta from specfun
  for (double g : {4.0 / 3.0, 1.6}) {
    const InducedSystem sys(IntermittentMapSpec::make(g, 1.0));
    const auto op = make_op(sys, 4096);
    const double beta = 1 / g;
    const double c0 = tail_constant(sys, invariant_measure_from(op), 1e10);
    const auto fit = eigen_asymptotics_fit(op, log_grid(1e-5, 1e-3, 13), TailModel{beta, EllKind::constant, c0, 1.0});
    const cplx cb = *renewal_constants(beta).c_beta;
    EXPECT_NEAR(fit.two_term.beta, beta, 0.03) << g;
    EXPECT_NEAR(std::abs(fit.c_beta_two_term) / std::abs(cb), 1.0, 0.1) << g;
    EXPECT_NEAR(std::arg(fit.c_beta_two_term), std::arg(cb), 0.1 * std::arg(cb)) << g;
    EXPECT_FALSE(fit.poor_fit);
  }
}

TEST(Spectral, ConstantRoofFitRejected) {
  const InducedSystem lattice(IntermittentMapSpec::make(), RoofSpec::constant(1.5));
  const auto op = make_op(lattice, 256);
  // the grid runs through b = 2 pi / c where |1 - lambda| vanishes
  const auto fit = eigen_asymptotics_fit(op, log_grid(1e-2, 8.0, 25), TailModel{0.75, EllKind::constant, 1.0, 1.0});
  EXPECT_TRUE(fit.poor_fit);
}

TEST(Spectral, AperiodicityAndConjugateSymmetry) {
  const InducedSystem sys;
  const auto op = make_op(sys, 1024);
  const auto scan = aperiodicity_scan(op, log_grid(0.05, 20, 20));
  EXPECT_TRUE(scan.pass) << scan.sup << " at " << scan.argsup;
  for (double b : {0.3, 4.0}) {
    const double r1 = spectral_radius(op.twisted(cplx(0, b)));
    const double r2 = spectral_radius(op.twisted(cplx(0, -b)));
    EXPECT_NEAR(r1, r2, 1e-9);
  }
  EXPECT_THROW(aperiodicity_scan(op, {0.0}), domain_error);
}

TEST(Resolvent, SolveReproducesProbe) {
  const auto& op = flagship_op();
  const auto m = stationary_masses(op);
  for (cplx s : {cplx(0, 0.01), cplx(0, 1.0), cplx(0.1, 0), cplx(2.0, 0)}) {
    const auto r = resolvent_probe(op, s, m);
    EXPECT_LT(r.residual, 1e-8) << s;
    // independent check: (I - P(s)) x = nu by a plain matrix-vector product
    const auto P = op.twisted(s);
    std::vector<cplx> xp;
    P.left_multiply(r.x, xp);
    double err = 0, nn = 0;
    for (std::size_t i = 0; i < m.size(); ++i) err += std::abs(r.x[i] - xp[i] - m[i]), nn += m[i];
    EXPECT_LT(err / nn, 1e-8);
  }
}

TEST(Resolvent, LargeSigmaIsTheFirstTwoTerms) {
  // int_B T(s) 1_A = sum_n E[1_A e^{-s tau_n} 1_B(F^n)]; at sigma = 8 terms n >= 2 are below e^{-8 * 2.5}
  const auto& op = flagship_op();
  const auto m = stationary_masses(op);
  const double s = 8.0;
  const cplx L = laplace_resolvent(op, m, s, op.lo(), op.hi(), op.lo(), op.hi());
  const auto P = op.twisted(cplx(s, 0));
  std::vector<cplx> v(m.begin(), m.end()), vp;
  P.left_multiply(v, vp);
  cplx two = 1.0;
  for (auto x : vp) two += x;
  EXPECT_NEAR(std::abs(L - two) / std::abs(L), 0.0, 1e-8);
}

TEST(Resolvent, NearSingularSolveIsReported) {
  const auto& op = flagship_op();
  const auto m = stationary_masses(op);
  ResolventOptions o;
  o.max_condition = 10;
  EXPECT_THROW(resolvent_probe(op, cplx(0, 1e-4), m, o), resolvent_error);
}
