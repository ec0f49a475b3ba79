#include <gtest/gtest.h>

#include <cmath>

#include "anderson/cauchy1.hpp"
#include "reference.hpp"

using namespace anderson;

namespace {
const AnalyticDensity kGauss = AnalyticDensity::gaussian(1.0, 1.0);
const AnalyticDensity kCauchy = AnalyticDensity::cauchy(1.0, 0.5);
}  // namespace

TEST(CauchyOne, ClosedFormCauchyTransform) {
  const cplx z(0.0, 0.5);
  EXPECT_NEAR(std::abs(i_n(kCauchy, 0, z) - cplx(0.0, 2.0 / 3.0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(i_n(kCauchy, 1, z) - cplx(-4.0 / 9.0, 0.0)), 0.0, 1e-12);
  for (int n = 0; n <= 5; ++n)
    for (cplx w : {cplx(0.3, 0.4), cplx(-1.2, 0.05), cplx(2.0, -0.3)}) {
      const cplx exact = w.imag() > 0 ? ref::cauchy_i_n_upper(n, w) : ref::cauchy_i_n_lower(n, w);
      EXPECT_LE(std::abs(i_n(kCauchy, n, w) - exact), 1e-10 * (1.0 + std::abs(exact))) << n << w;
    }
}

TEST(CauchyOne, AgainstBoostQuadrature) {
  for (int n = 0; n <= 3; ++n)
    for (cplx z : {cplx(0.3, 0.4), cplx(-0.8, -0.6), cplx(1.5, 0.9)}) {
      const cplx expected = ref::pole_integral([](double v) { return ref::gaussian(v); }, {z}, {n + 1});
      EXPECT_LE(std::abs(i_n(kGauss, n, z) - expected), 1e-11 * (1.0 + std::abs(expected)));
    }
}

TEST(CauchyOne, RealAxisRejected) {
  EXPECT_THROW(i_n(kGauss, 0, cplx(0.5, 0.0)), RealAxisInput);
  EXPECT_THROW(i_n(kGauss, -1, cplx(0.5, 1.0)), InvalidArgument);
}

TEST(CauchyOne, SchwarzReflection) {
  for (cplx z : {cplx(0.3, 0.4), cplx(-1.0, 0.7)}) {
    EXPECT_NEAR(std::abs(std::conj(i_n(kGauss, 0, std::conj(z))) - i_n(kGauss, 0, z)), 0.0, 1e-14);
  }
  for (double E : {-1.5, 0.0, 0.4, 2.2})
    EXPECT_NEAR(std::abs(i0_boundary(kGauss, HalfPlane::lower, E) -
                         std::conj(i0_boundary(kGauss, HalfPlane::upper, E))),
                0.0, 1e-15);
}

TEST(CauchyOne, DerivativeChain) {
  // I_n(g; z) = (1/n!) I_0(g^{(n)}; z)
  for (int n = 0; n <= 6; ++n) {
    const AnalyticFunction gn = kGauss.function().derivative_function(n);
    for (int k = 0; k < 20; ++k) {
      const double im = (0.1 + 0.8 * (k % 5) / 4.0) * (k % 2 ? -1.0 : 1.0);
      const cplx z(-2.0 + 0.2 * k, im);
      const cplx a = i_n(kGauss, n, z);
      const cplx b = i_n(gn, 0, z) / factorial(n);
      EXPECT_LE(std::abs(a - b), 1e-9 * (1.0 + std::abs(a))) << n << z;
    }
  }
}

TEST(CauchyOne, BoundaryValues) {
  const cplx v = i0_boundary(kGauss, HalfPlane::upper, 0.0);
  EXPECT_NEAR(v.real(), 0.0, 1e-14);
  EXPECT_NEAR(v.imag(), M_PI / std::sqrt(2 * M_PI), 1e-14);
  EXPECT_NEAR(std::abs(i0_boundary(kCauchy, HalfPlane::upper, 1.0) - cplx(-0.5, 0.5)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(in_boundary(kCauchy, 1, HalfPlane::upper, 0.0) - cplx(-1.0, 0.0)), 0.0, 1e-11);
  EXPECT_EQ(in_boundary(kGauss, 0, HalfPlane::upper, 0.7), i0_boundary(kGauss, HalfPlane::upper, 0.7));
  for (int n = 0; n <= 4; ++n)
    for (double E = -3.0; E <= 3.0; E += 0.25) {
      const cplx b = in_boundary(kGauss, n, HalfPlane::upper, E);
      EXPECT_NEAR(b.imag(), M_PI * kGauss.deriv(n, E, 0.5).real() / factorial(n), 1e-12);
      // the contour route is independent of the principal value
      const cplx c = in_boundary_contour(kGauss, n, HalfPlane::upper, E);
      EXPECT_LE(std::abs(b - c), 1e-10 * (1.0 + std::abs(b))) << n << " " << E;
      const cplx m = in_boundary_contour(kGauss, n, HalfPlane::lower, E);
      EXPECT_LE(std::abs(in_boundary(kGauss, n, HalfPlane::lower, E) - m), 1e-10 * (1.0 + std::abs(m)));
    }
  for (double E : {-2.0, 0.5, 3.0})
    for (int n = 0; n <= 3; ++n)
      EXPECT_LE(std::abs(in_boundary(kCauchy, n, HalfPlane::upper, E) - ref::cauchy_i_n_upper(n, E)), 1e-10);
}

TEST(CauchyOne, EpsilonLimit) {
  const std::vector<double> eps = {0.2, 0.1, 0.05, 0.025, 0.0125};
  for (int n = 0; n <= 3; ++n)
    for (double E : {-1.0, 0.3}) {
      for (HalfPlane s : {HalfPlane::upper, HalfPlane::lower}) {
        std::vector<cplx> y;
        for (double e : eps) y.push_back(i_n(kGauss, n, cplx(E, sign(s) * e)));
        const cplx lim = ref::richardson(eps, y);
        EXPECT_LE(std::abs(lim - in_boundary(kGauss, n, s, E)), 1e-6) << n << " " << E;
      }
    }
}

TEST(CauchyOne, UniformBound) {
  EXPECT_NEAR(i0_bound(AnalyticDensity::gaussian(1e6, 1.0)), 8.0 / M_PI + 4.0, 1e-5);
  const double bound = i0_bound(kGauss);
  for (int k = 0; k <= 1000; ++k) {
    const double E = -10.0 + 0.02 * k;
    EXPECT_LE(std::abs(i0_boundary(kGauss, HalfPlane::upper, E)), bound);
  }
  // large r: the constant term dominates
  const auto wide = AnalyticDensity::gaussian(1e4, 50.0);
  EXPECT_NEAR(i0_bound(wide) / wide.norm_r(), 1.0, 0.05);
}
