#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "spl/barriers/bundle.hpp"

using namespace spl;

namespace {

const RadialProfilePair& sub_pair() {
  static const RadialProfilePair pair = make_profile_pair(PairSpec::defaults(BarrierKind::sub));
  return pair;
}

const RadialProfilePair& super_pair() {
  static const RadialProfilePair pair = make_profile_pair(PairSpec::defaults(BarrierKind::super));
  return pair;
}

double log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST(ForcingProfile, IndicatorOffAndOn) {
  EXPECT_NEAR(forcing_profile(1.0, 1000.0, 2.0, 0.5), 0.1, 1e-15);
  for (double m : {10.0, 100.0, 1e4}) EXPECT_NEAR(forcing_profile(0.0, m, 2.0, 0.5), 4.0 + std::cbrt(1.0 / m), 1e-14);
  EXPECT_THROW(forcing_profile(0.0, 1.0, 1.0, 0.5), InvalidParameter);
  EXPECT_THROW(forcing_profile(0.0, 10.0, -1.0, 0.5), InvalidParameter);
}

TEST(ForcingProfile, IndicatorWidthScalesLikeCubeRoot) {
  PairSpec spec = PairSpec::defaults(BarrierKind::sub);
  spec.dx = 0.001;
  spec.samples = 2;
  const auto pair = make_profile_pair(spec);
  const std::vector<double> ms = {1e3, 1e4, 1e5};
  std::vector<double> widths;
  for (double m : ms) widths.push_back(indicator_width(pair, 0, m));
  const double slope = log_slope(ms, widths);
  EXPECT_NEAR(slope, -1.0 / 3.0, 0.2 / 3.0);
  // Leading-order prediction m^(-1/3) / |Dp0(a)| at the largest m.
  const double predicted = std::cbrt(1.0 / ms.back()) / pair.pressure_slope(0);
  EXPECT_NEAR(widths.back() / predicted, 1.0, 0.2);
}

TEST(ProfilePair, DefaultsHaveConsistentOrdering) {
  EXPECT_EQ(sub_pair().kind(), BarrierKind::sub);
  EXPECT_EQ(super_pair().kind(), BarrierKind::super);
  for (const auto* pair : {&sub_pair(), &super_pair()}) {
    for (const auto& p : pair->p0)
      for (double v : p.values) EXPECT_GT(v, 0.0);
    for (const auto& r : pair->rho0)
      for (double v : r.values) {
        EXPECT_LT(v, 1.0);
        EXPECT_GE(v, 0.0);
      }
  }
}

TEST(ProfilePair, MixedOrderingIsRejected) {
  PairSpec spec = PairSpec::defaults(BarrierKind::sub);
  spec.t_end = 0.3;
  spec.decay = 4.0;
  spec.curvature = 0.0;
  spec.a_slope = -1.0;
  const auto pair = make_profile_pair(spec);
  EXPECT_THROW(pair.kind(), ConstructionFailure);
}

TEST(ProfilePair, InvalidSpecsThrow) {
  PairSpec spec;
  spec.a_slope = -30.0;
  EXPECT_THROW(make_profile_pair(spec), InvalidParameter);
  spec = PairSpec{};
  spec.rho_far = 1.0;
  EXPECT_THROW(make_profile_pair(spec), InvalidParameter);
  spec = PairSpec{};
  spec.dimension = 0;
  EXPECT_THROW(make_profile_pair(spec), InvalidParameter);
}

TEST(InnerProfile, ZeroForcingInfiniteExponentIsCosh) {
  auto error = [](std::size_t n) {
    const auto g = Grid::radial(1, 0.0, 1.0, n);
    const auto u = solve_inner_profile(g, GrowthLaw::affine(1.0, 1.0), {}, INFINITY, 0.5);
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      e = std::max(e, std::abs(u[i] - (1.0 - std::cosh(g.center(i)) / std::cosh(1.0))));
    return e;
  };
  const double coarse = error(50), fine = error(100);
  EXPECT_LT(fine, 1e-4);
  EXPECT_GT(std::log2(coarse / fine), 1.9);
}

TEST(InnerProfile, ApproachesPressureProfileAsMGrows) {
  const auto& pair = sub_pair();
  const std::size_t ref = reference_slice(pair, BarrierKind::sub);
  double previous = INFINITY;
  for (double m : {1e2, 1e3, 1e4}) {
    const auto u = build_inner_profile(pair, m, 0.25, BarrierKind::sub);
    const double d = sup_distance(u.values, pair.p0[ref].values);
    EXPECT_LT(d, previous) << "m=" << m;
    previous = d;
  }
}

TEST(InnerProfile, VanishesAtInterface) {
  const auto& pair = sub_pair();
  const auto u = build_inner_profile(pair, 100.0, 0.25, BarrierKind::sub);
  const std::size_t n = u.size();
  const double face = (15.0 * u[n - 1] - 10.0 * u[n - 2] + 3.0 * u[n - 3]) / 8.0;
  EXPECT_NEAR(face, 0.0, 1e-5);  // third-order extrapolation error at dx = 0.005
  EXPECT_THROW(build_inner_profile(pair, 100.0, -1.0, BarrierKind::sub), InvalidParameter);
}

TEST(OuterProfile, UnperturbedRecoversPairDensity) {
  const auto& pair = sub_pair();
  const auto outer = build_outer_profile(pair, 100.0, BarrierKind::sub, false);
  ASSERT_EQ(outer.rho_hat.size(), pair.rho0.size());
  for (std::size_t k = 0; k < pair.rho0.size(); ++k)
    EXPECT_LT(sup_distance(outer.rho_hat[k].values, pair.rho0[k].values), 1e-12);
}

TEST(OuterProfile, InterfaceDensityTendsToOne) {
  double prev_rho = 0.0, prev_c = INFINITY;
  for (double m : {10.0, 20.0, 50.0, 100.0, 1e3, 1e4, 1e5}) {
    const double c = barrier_shift(m, 0.5);
    const double rho = phi_inverse(c, m, 0.5);
    EXPECT_GT(c, 0.0);
    EXPECT_LT(c, prev_c);
    EXPECT_GT(rho, prev_rho);
    EXPECT_LT(rho, 1.0);
    prev_c = c;
    prev_rho = rho;
  }
  EXPECT_GT(prev_rho, 0.99);
  EXPECT_LT(prev_c, 1e-2);
}

TEST(OuterProfile, PowerLaplacianDecaysLikeInverseM) {
  const auto& pair = sub_pair();
  const std::vector<double> ms = {1e2, 1e3, 1e4};
  std::vector<double> mags;
  for (double m : ms) {
    const auto b = build_barrier(pair, m, 0.25, BarrierKind::sub);
    double worst = 0.0;
    for (std::size_t k = 0; k < b.times.size(); ++k)
      worst = std::max(worst, exterior_power_laplacian(b, k, pair.spec.dimension));
    mags.push_back(worst);
  }
  EXPECT_LT(log_slope(ms, mags), -0.9);
  for (std::size_t i = 0; i < ms.size(); ++i) EXPECT_LT(mags[i] * ms[i], 10.0);
}

TEST(VerifyBarrier, SubBundlePassesAtM100WithSearchedConstant) {
  const auto& pair = sub_pair();
  const auto search = search_barrier_constant(pair, 100.0, BarrierKind::sub);
  ASSERT_TRUE(search.found);
  EXPECT_GT(search.bundle.A0, 0.0);
  EXPECT_TRUE(search.report.passed);
  EXPECT_GT(search.report.min_gap, 0.0);
  EXPECT_GE(search.report.inner.fraction(), 0.99);
  EXPECT_GE(search.report.outer.fraction(), 0.99);
  ASSERT_TRUE(search.bundle.residual_report.has_value());
  // The search returns the smallest passing power of two.
  auto smaller = build_barrier(pair, 100.0, search.bundle.A0 / 2.0, BarrierKind::sub);
  EXPECT_FALSE(verify_barrier(smaller, pair).passed);
}

TEST(VerifyBarrier, ZeroConstantFailsNearInterface) {
  const auto& pair = sub_pair();
  auto b = build_barrier(pair, 100.0, 0.0, BarrierKind::sub);
  const auto rep = verify_barrier(b, pair);
  EXPECT_FALSE(rep.passed);
  EXPECT_LT(rep.inner.worst_margin, 0.0);
  EXPECT_LT(rep.inner.fraction(), 0.99);
}

TEST(VerifyBarrier, SuperBundlePassesForLargeM) {
  const auto& pair = super_pair();
  const auto search = search_barrier_constant(pair, 1e3, BarrierKind::super);
  ASSERT_TRUE(search.found);
  EXPECT_GT(search.report.min_gap, 0.0);
}

TEST(VerifyBarrier, GapConvergesToLimitOrdering) {
  const auto& pair = sub_pair();
  double previous = INFINITY;
  for (double m : {1e2, 1e3, 1e4}) {
    auto b = build_barrier(pair, m, std::ldexp(1.0, -8), BarrierKind::sub);
    const auto rep = verify_barrier(b, pair);
    double err = 0.0;
    for (std::size_t k = 0; k < pair.times.size(); ++k) {
      const double limit = pair.spec.nu * pair.density_slope(k) - pair.pressure_slope(k);
      ASSERT_GT(limit, 0.0);
      err = std::max(err, std::abs(rep.gradient_gap[k] - limit));
    }
    EXPECT_LT(err, previous) << "m=" << m;
    previous = err;
  }
}

TEST(BarrierInvariants, CompositeContinuity) {
  const auto& pair = sub_pair();
  for (double m : {1e2, 1e3}) {
    auto b = build_barrier(pair, m, 0.25, BarrierKind::sub);
    const auto rep = verify_barrier(b, pair);
    for (double jump : rep.continuity_jump) EXPECT_LE(jump, b.c_m + 1e-3);
  }
}

TEST(BarrierInvariants, InnerProfileIsSelfSimilar) {
  const auto& pair = sub_pair();
  const auto b = build_barrier(pair, 100.0, 0.25, BarrierKind::sub);
  const double a_ref = b.radii[b.reference];
  for (std::size_t k = 0; k < b.times.size(); k += 7) {
    const double a = b.radii[k];
    for (double r : {0.1, 0.4, 0.7, 0.9}) {
      const double here = b.value(r * a, k);
      const double there = b.value(r * a_ref, b.reference);
      EXPECT_NEAR(here, there, 1e-12);
    }
  }
}

TEST(BarrierInvariants, ConvergesToClassicalProfileInM) {
  const auto& pair = sub_pair();
  double previous = INFINITY;
  for (double m : {1e2, 1e3, 1e4}) {
    const auto b = build_barrier(pair, m, 0.25, BarrierKind::sub);
    double d = 0.0;
    for (std::size_t k = 0; k < b.times.size(); k += 5) {
      const double a = b.radii[k];
      for (int i = 1; i < 400; ++i) {
        const double r = 3.0 * a * i / 400.0;
        if (std::abs(r - a) < 0.02) continue;
        d = std::max(d, std::abs(b.value(r, k) - pair.phi(r, k)));
      }
    }
    EXPECT_LT(d, previous) << "m=" << m;
    previous = d;
  }
}

TEST(BarrierSearch, ParallelMatchesSequential) {
  const auto& pair = sub_pair();
  const auto par = search_barrier_constants(pair, {100.0, 1000.0}, BarrierKind::sub);
  ASSERT_EQ(par.size(), 2u);
  const auto seq = search_barrier_constant(pair, 1000.0, BarrierKind::sub);
  EXPECT_EQ(par[1].found, seq.found);
  EXPECT_EQ(par[1].bundle.A0, seq.bundle.A0);
  EXPECT_EQ(par[1].report.min_gap, seq.report.min_gap);
}
