#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>

#include "anderson/cauchyN.hpp"
#include "anderson/oracle.hpp"
#include "reference.hpp"

using namespace anderson;

namespace {
const AnalyticDensity kGauss = AnalyticDensity::gaussian(1.0, 1.0);
}

TEST(Oracle, BoxIndexing) {
  const FiniteBox box(2, 3);
  EXPECT_EQ(box.size(), 49u);
  for (std::size_t i = 0; i < box.size(); ++i) EXPECT_EQ(*box.index(box.site(i)), i);
  EXPECT_FALSE(box.index(Site{4, 0}).has_value());
  const FiniteBox per(1, 2, Boundary::periodic);
  EXPECT_EQ(*per.index(Site{3}), *per.index(Site{-2}));
}

TEST(Oracle, Hamiltonian) {
  const FiniteBox box(1, 1, Boundary::periodic);
  DisorderSample s{0, 0, {0.5, -1.0, 2.0}};
  const Eigen::MatrixXd H(build_hamiltonian(box, 0.3, s));
  Eigen::MatrixXd expected(3, 3);
  expected << 0.5, 0.3, 0.3, 0.3, -1.0, 0.3, 0.3, 0.3, 2.0;
  EXPECT_EQ(H, expected);
  const Eigen::MatrixXd D(build_hamiltonian(box, 0.0, s));
  EXPECT_EQ(D, Eigen::MatrixXd(Eigen::Vector3d(0.5, -1.0, 2.0).asDiagonal()));

  const FiniteBox big(2, 4);
  const auto t = DisorderSample::draw(big, kGauss, 7);
  const Eigen::MatrixXd B(build_hamiltonian(big, 0.4, t));
  EXPECT_EQ(B, B.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
  double vmax = 0.0;
  for (double v : t.potentials) vmax = std::max(vmax, std::abs(v));
  EXPECT_LE(es.eigenvalues().cwiseAbs().maxCoeff(), 2 * 2 * 0.4 + vmax + 1e-12);
}

TEST(Oracle, SamplesAreReproducible) {
  const FiniteBox box(1, 5);
  const auto a = DisorderSample::draw(box, kGauss, 11, 3);
  const auto b = DisorderSample::draw(box, kGauss, 11, 3);
  const auto c = DisorderSample::draw(box, kGauss, 11, 4);
  EXPECT_EQ(a.potentials, b.potentials);
  EXPECT_NE(a.potentials, c.potentials);
  McOptions o{300, 5, 1, 0};
  const auto r1 = mc_green(box, 0.1, kGauss, cplx(0.2, 0.5), o);
  o.threads = 3;
  const auto r3 = mc_green(box, 0.1, kGauss, cplx(0.2, 0.5), o);
  EXPECT_EQ(r1.mean, r3.mean);
  EXPECT_EQ(r1.stderr_, r3.stderr_);
}

TEST(Oracle, GreenAtZeroHopping) {
  const FiniteBox box(1, 2);
  const cplx z(0.3, 0.4);
  McOptions o{4000, 21, 1, 0};
  const auto r = mc_green(box, 0.0, kGauss, z, o);
  const cplx exact = i_n(kGauss, 0, z);
  EXPECT_LE(std::abs(r.mean - exact), 4.0 * r.stderr_);
  // single sample: diagonal resolvent
  const auto s = DisorderSample::draw(box, kGauss, 21, 0);
  McOptions one{1, 21, 1, 0};
  EXPECT_NEAR(std::abs(mc_green(box, 0.0, kGauss, z, one).mean - 1.0 / (s.potentials[box.origin()] - z)), 0.0,
              1e-14);
}

TEST(Oracle, StandardErrorScaling) {
  const FiniteBox box(1, 3);
  const auto a = mc_green(box, 0.05, kGauss, cplx(0.0, 0.4), McOptions{400, 3, 1, 0});
  const auto b = mc_green(box, 0.05, kGauss, cplx(0.0, 0.4), McOptions{4000, 4, 1, 0});
  EXPECT_NEAR(a.stderr_ / b.stderr_, std::sqrt(10.0), 0.2 * std::sqrt(10.0));
}

TEST(Oracle, TwoPointAtZeroHopping) {
  const FiniteBox box(1, 2);
  const std::vector<cplx> z = {cplx(0.3, 0.4), cplx(-0.2, -0.5)};
  const std::vector<CovariantPolynomial> id = {identity_observable(), identity_observable()};
  const auto r = mc_npoint(box, 0.0, kGauss, id, z, McOptions{4000, 9, 1, 0});
  EXPECT_LE(std::abs(r.mean - j_n(kGauss, MultiIndex{0, 0}, z)), 4.0 * r.stderr_);
  // real H: conjugating every z conjugates the sample mean exactly
  const std::vector<cplx> zc = {std::conj(z[0]), std::conj(z[1])};
  const auto v = std::vector<CovariantPolynomial>{velocity(0, 0.1), velocity(0, 0.1)};
  const auto p = mc_npoint(box, 0.2, kGauss, v, z, McOptions{50, 9, 1, 0});
  const auto q = mc_npoint(box, 0.2, kGauss, v, zc, McOptions{50, 9, 1, 0});
  EXPECT_NEAR(std::abs(std::conj(p.mean) - q.mean), 0.0, 1e-14);
}

TEST(Oracle, SmoothedDos) {
  // lambda = 0 with a Cauchy density: Poisson smoothing adds the widths
  const auto c = AnalyticDensity::cauchy(1.0, 0.5);
  const FiniteBox box(1, 3);
  const std::vector<double> grid = {-1.0, 0.0, 0.5, 2.0};
  const auto pts = smoothed_dos(box, 0.0, c, 0.2, grid, McOptions{20000, 2, 1, 0});
  for (const auto& p : pts) {
    EXPECT_LE(std::abs(p.mean - ref::cauchy(p.E, 1.2)), 4.0 * p.stderr_) << p.E;
    EXPECT_GE(p.mean, 0.0);
  }
  // normalization of the gaussian case with hopping
  std::vector<double> wide;
  for (int k = 0; k <= 800; ++k) wide.push_back(-40.0 + 0.1 * k);
  const auto w = smoothed_dos(FiniteBox(1, 4), 0.1, kGauss, 0.2, wide, McOptions{50, 3, 1, 0});
  double integral = 0.0;
  for (std::size_t k = 0; k + 1 < w.size(); ++k) integral += 0.05 * (w[k].mean + w[k + 1].mean);
  EXPECT_NEAR(integral, 1.0, 1e-2);
}

TEST(Oracle, IntegratedDensityOfStates) {
  const FiniteBox box(1, 6);
  const auto s = DisorderSample::draw(box, kGauss, 17);
  EXPECT_EQ(ids_count(box, 0.2, s, 1e6), 1.0);
  EXPECT_EQ(ids_count(box, 0.2, s, -1e6), 0.0);
  for (double E : {-0.5, 0.0, 0.8}) {
    double frac = 0.0;
    for (double v : s.potentials) frac += v <= E;
    EXPECT_DOUBLE_EQ(ids_count(box, 0.0, s, E), frac / box.size());
  }
  double prev = 0.0;
  for (double E = -3.0; E <= 3.0; E += 0.25) {
    const double n = ids_count(box, 0.2, s, E);
    EXPECT_GE(n, prev);
    prev = n;
  }
}

TEST(Oracle, FiniteSizeAtStrongDisorder) {
  const cplx z(0.3, 0.4);
  const auto a = mc_green(FiniteBox(1, 10), 0.05, kGauss, z, McOptions{1000, 8, 1, 10});
  const auto b = mc_green(FiniteBox(1, 20), 0.05, kGauss, z, McOptions{1000, 8, 1, 10});
  EXPECT_LE(std::abs(a.mean - b.mean), 3.0 * std::hypot(a.stderr_, b.stderr_));
  EXPECT_THROW(mc_green(FiniteBox(1, 3), 0.05, kGauss, z, McOptions{10, 8, 1, 10}), InvalidArgument);
  EXPECT_THROW(mc_green(FiniteBox(1, 3), 0.05, kGauss, cplx(0.3, 0.0), McOptions{}), RealAxisInput);
}

TEST(Oracle, QuadratureReference) {
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_NEAR(quad_reference([](double v) { return cplx(ref::gaussian(v)); }, -inf, inf).real(), 1.0, 1e-12);
  const cplx z(0.3, 0.7);
  const cplx i1 = quad_reference([&](double v) { return ref::gaussian(v) / ((v - z) * (v - z)); }, -inf, inf, 1e-11);
  EXPECT_NEAR(std::abs(i1 - i_n(kGauss, 1, z)), 0.0, 1e-10);
  EXPECT_THROW(quad_reference([](double v) { return cplx(std::sin(400.0 * v)); }, 0.0, 10.0, 1e-14, 2),
               ToleranceNotMet);
}

TEST(Oracle, Json) {
  const auto r = mc_green(FiniteBox(1, 2), 0.0, kGauss, cplx(0, 1), McOptions{10, 4, 1, 0});
  const auto j = to_json(r, {{"lambda", 0.0}});
  for (const char* k : {"config", "mean_re", "mean_im", "stderr", "samples", "seed"}) EXPECT_TRUE(j.contains(k));
}
