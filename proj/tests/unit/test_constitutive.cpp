#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fracporo/constitutive.hpp"

namespace fracporo {
namespace {

Mat2 random_mat(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat2 m;
  m << u(rng), u(rng), u(rng), u(rng);
  return m;
}

TEST(EffectiveStress, Examples) {
  MaterialParams p;
  p.G = 1.0;
  p.lambda = 2.0;
  p.gamma = 5.0;
  EXPECT_TRUE(effective_stress(Mat2::Zero(), Mat2::Zero(), p).isZero());
  EXPECT_TRUE(effective_stress(Mat2::Identity(), Mat2::Zero(), p).isApprox(6.0 * Mat2::Identity()));
}

TEST(EffectiveStress, MatchesComponentExpansion) {
  std::mt19937_64 rng(1);
  MaterialParams p;
  p.G = 2.5;
  p.lambda = 1.25;
  p.gamma = 0.75;
  for (int k = 0; k < 50; ++k) {
    const Mat2 gu = random_mat(rng);
    const Mat2 gv = random_mat(rng);
    const Mat2 s = effective_stress(gu, gv, p);
    const double tr_u = gu(0, 0) + gu(1, 1);
    const double tr_v = gv(0, 0) + gv(1, 1);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        const double expected = p.G * (gu(i, j) + gu(j, i)) + (i == j ? p.lambda * tr_u : 0.0) +
                                0.5 * p.gamma * (gv(i, j) + gv(j, i)) +
                                (i == j ? p.gamma * tr_v : 0.0);
        EXPECT_NEAR(s(i, j), expected, 1e-14);
      }
    }
    EXPECT_EQ(s(0, 1), s(1, 0));
    // Linearity.
    const Mat2 s2 = effective_stress(2.0 * gu, -gv, p);
    EXPECT_TRUE(s2.isApprox(effective_stress(gu, Mat2::Zero(), p) * 2.0 -
                                effective_stress(Mat2::Zero(), gv, p),
                            1e-14));
  }
}

TEST(PoroelasticStress, Examples) {
  MaterialParams p;
  p.alpha = 1.0;
  EXPECT_TRUE(poroelastic_stress(Mat2::Zero(), 1.0, p).isApprox(-Mat2::Identity()));
  const Mat2 s = 3.0 * Mat2::Identity();
  EXPECT_EQ(poroelastic_stress(s, 0.0, p), s);
  p.alpha = 0.8;
  EXPECT_TRUE(poroelastic_stress(s, 2.0, p).isApprox(1.4 * Mat2::Identity(), 1e-15));
}

TEST(DarcyFlux, Examples) {
  MaterialParams p;
  p.K = Mat2::Identity();
  p.mu_f = 1.0;
  p.g = 0.0;
  EXPECT_TRUE(darcy_flux(Vec2(1.0, 0.0), p).isApprox(Vec2(-1.0, 0.0)));
  p.K << 2.0, 0.0, 0.0, 1.0;
  p.mu_f = 2.0;
  EXPECT_TRUE(darcy_flux(Vec2(1.0, 1.0), p).isApprox(Vec2(-1.0, -0.5)));
  p.g = 9.81;
  p.rho_fr = 1000.0;
  const Vec2 hydrostatic = p.rho_fr * p.g * p.grad_eta;
  EXPECT_LT(darcy_flux(hydrostatic, p).norm(), 1e-12);
}

TEST(FractureFlux, CubicLaw) {
  MaterialParams p;
  p.mu_f = 1.0;
  p.g = 0.0;
  const WidthProfile unit = WidthProfile::uniform(1.0);
  EXPECT_DOUBLE_EQ(fracture_flux(12.0, 0.3, 0.0, unit, p), -1.0);
  const WidthProfile doubled = WidthProfile::uniform(2.0);
  EXPECT_DOUBLE_EQ(fracture_flux(1.5, 0.3, 0.0, doubled, p), 8.0 * fracture_flux(1.5, 0.3, 0.0, unit, p));
  const WidthProfile tip = WidthProfile::tip_power(1e-3, 0.05, 0.5);
  EXPECT_EQ(fracture_flux(7.0, 0.0, 0.0, tip, p), 0.0);
  EXPECT_EQ(fracture_flux(7.0, 0.5, 0.0, tip, p), 0.0);
}

TEST(WidthProfile, TipAsymptotics) {
  const double L = 0.5, w0 = 1e-3, e = 0.05;
  const WidthProfile w = WidthProfile::tip_power(w0, e, L);
  EXPECT_EQ(w(0.0, 0.0), 0.0);
  EXPECT_EQ(w(L, 0.0), 0.0);
  for (double s : {1e-6, 1e-5, 1e-4}) {
    // w(s) / (w0 (s/L)^(1/2+e)) -> 1 as s -> 0 since d2 -> L.
    EXPECT_NEAR(w(s, 0.0) / (w0 * std::pow(s / L, 0.5 + e)), 1.0, 2.0 * s / L);
    EXPECT_NEAR(w(L - s, 0.0), w(s, 0.0), 1e-15);
  }
  for (double s = 0.01; s < L; s += 0.01) {
    const double d = 1e-7;
    EXPECT_NEAR(w.derivative(s, 0.0), (w(s + d, 0.0) - w(s - d, 0.0)) / (2 * d), 1e-8);
    EXPECT_GT(w(s, 0.0), 0.0);
  }
}

TEST(WidthFromJump, Examples) {
  EXPECT_DOUBLE_EQ(width_from_jump({0.0, 0.0005}, {0.0, -0.0005}, {0.0, -1.0}), 0.001);
  EXPECT_DOUBLE_EQ(width_from_jump({0.0, -0.0005}, {0.0, 0.0005}, {0.0, -1.0}), -0.001);
  EXPECT_EQ(width_from_jump({0.3, 0.2}, {0.3, 0.2}, {0.0, -1.0}), 0.0);
  EXPECT_EQ(width_from_jump({0.7, 0.2}, {0.3, 0.2}, {0.0, -1.0}), 0.0);
}

TEST(WidthFromJump, SignAndTangentialInvariance) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const Vec2 n = Vec2(u(rng), u(rng)).normalized();
    const Vec2 t(-n.y(), n.x());
    const Vec2 a(u(rng), u(rng)), b(u(rng), u(rng));
    const double w = width_from_jump(a, b, n);
    EXPECT_NEAR(width_from_jump(a, b, -n), -w, 1e-15);
    const double shift = u(rng);
    EXPECT_NEAR(width_from_jump(a + shift * t, b + 0.5 * shift * t, n), w, 1e-14);
  }
}

TEST(CoulombEquivalent, Examples) {
  MaterialParams p;
  p.m_T = p.m_n = 2.0;
  p.c_T = 0.6;
  p.c_n = 1.0;
  CoulombEquivalent c = coulomb_equivalent(p);
  EXPECT_EQ(c.alpha_c, 0.0);
  EXPECT_DOUBLE_EQ(c.C, 0.6);
  p.m_T = 3.0;
  p.m_n = 1.0;
  p.c_T = 1.0;
  p.c_n = 2.0;
  c = coulomb_equivalent(p);
  EXPECT_DOUBLE_EQ(c.alpha_c, 2.0);
  EXPECT_DOUBLE_EQ(c.C, 0.125);
  p.c_n = 0.0;
  EXPECT_THROW(coulomb_equivalent(p), ValidationError);
}

TEST(PenetrationDepth, ExamplesAndMonotonicity) {
  EXPECT_EQ(penetration_depth(0.002, 0.005), 0.0);
  EXPECT_NEAR(penetration_depth(0.007, 0.005), 0.002, 1e-15);
  EXPECT_EQ(penetration_depth(-1.0, 0.0), 0.0);
  double prev = penetration_depth(-1.0, 0.1);
  for (double x = -1.0; x <= 1.0; x += 0.01) {
    const double d = penetration_depth(x, 0.1);
    EXPECT_GE(d, prev);
    EXPECT_LE(d - prev, 0.01 + 1e-15);
    prev = d;
  }
}

TEST(PositivePower, CutBeforeExponent) {
  EXPECT_EQ(positive_power(0.0, 1.5), 0.0);
  EXPECT_EQ(positive_power(-2.0, 2.5), 0.0);
  EXPECT_NEAR(positive_power(4.0, 1.5), 8.0, 1e-14);
}

TEST(MaterialParams, ValidationNamesTheInvariant) {
  MaterialParams p;
  EXPECT_NO_THROW(p.validate(false));
  const auto expect_rejected = [](MaterialParams q, const std::string& word, bool friction) {
    try {
      q.validate(friction);
      FAIL() << "accepted invalid parameters (" << word << ")";
    } catch (const ValidationError& e) {
      EXPECT_NE(std::string(e.what()).find(word), std::string::npos) << e.what();
    }
  };
  MaterialParams q = p;
  q.c_fc = 0.0;
  expect_rejected(q, "c_fc", false);
  q = p;
  q.G = 0.0;
  expect_rejected(q, "G", false);
  q = p;
  q.phi0 = 1.0;
  expect_rejected(q, "phi0", false);
  q = p;
  q.K << 1.0, 2.0, 2.0, 1.0;
  expect_rejected(q, "K", false);
  q = p;
  q.gamma = 0.0;
  expect_rejected(q, "gamma", true);
}

TEST(MaterialParams, StorageCoefficient) {
  MaterialParams p;
  p.inv_M = 0.3;
  p.c_f = 0.5;
  p.phi0 = 0.2;
  EXPECT_DOUBLE_EQ(p.storage(), 0.4);
}

}  // namespace
}  // namespace fracporo
