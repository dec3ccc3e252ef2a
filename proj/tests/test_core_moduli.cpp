// Elements, scalings, RNG, parallel helpers, moduli, ideals and geometry.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "property_cases.hpp"
#include "rvlab/rvlab.hpp"

using namespace rvlab;
using namespace rvlab::props;

// ---------------------------------------------------------------------------
// RNG

TEST(Philox, KnownAnswers) {
  using B = Philox4x32::Block;
  EXPECT_EQ(Philox4x32::generate({0, 0, 0, 0}, {0, 0}), (B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(Philox4x32::generate({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(Philox4x32::generate({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Stream, ReproducibleAndSplit) {
  Stream a(7, 3), b(7, 3), c(7, 4), d(8, 3);
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    EXPECT_NE(x, c());
    EXPECT_NE(x, d());
  }
}

TEST(Stream, UniformMomentsAndRange) {
  Stream s(1, 0);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sum2 += u * u;
  }
  EXPECT_NEAR(sum / n, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / n));
  EXPECT_NEAR(sum2 / n, 1.0 / 3.0, 0.005);
}

TEST(Stream, ParetoIsAtLeastOne) {
  Stream s(2, 0);
  for (int i = 0; i < 10000; ++i) ASSERT_GE(s.pareto(1.7), 1.0);
}

TEST(Seeds, DerivedSeedsDiffer) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s : {0ull, 1ull, 42ull})
    for (auto tag : {"pilot", "simulation", "measure"}) seen.insert(derive_seed(s, tag));
  for (std::uint64_t t = 0; t < 10; ++t) seen.insert(derive_seed(5, t));
  EXPECT_EQ(seen.size(), 19u);
  EXPECT_EQ(derive_seed(5, "pilot"), derive_seed(5, "pilot"));
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ull);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cull);
}

TEST(Parallel, ReduceIsIdenticalForAnyThreadCount) {
  const std::size_t n = 300000;
  auto run = [&] {
    return parallel_reduce(
        n, 0.0,
        [](std::size_t b, std::size_t e) {
          double s = 0.0;
          for (std::size_t i = b; i < e; ++i) s += 1.0 / (1.0 + static_cast<double>(i) * 0.37);
          return s;
        },
        std::plus<>());
  };
  set_threads(1);
  const double one = run();
  for (unsigned t : {2u, 8u}) {
    set_threads(t);
    EXPECT_EQ(run(), one);
  }
  set_threads(1);
}

TEST(Parallel, ExceptionsPropagate) {
  set_threads(4);
  EXPECT_THROW(parallel_for(100000,
                            [](std::size_t i) {
                              if (i == 77777) fail(ErrorCode::BadParameters, "boom");
                            }),
               Error);
  set_threads(1);
}

// ---------------------------------------------------------------------------
// Elements

TEST(Elements, RejectNonFinite) {
  EXPECT_THROW(vec({1.0, std::nan("")}), Error);
  EXPECT_THROW(PointConfig({{{1.0, 2.0}, 0}}), Error);
  EXPECT_THROW(PointConfig({{{1.0, 2.0}, 1}, {{1.0}, 1}}), Error);
}

TEST(Elements, PolytopeIsHulled) {
  Polytope k({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}});
  EXPECT_EQ(k.vertices().size(), 4u);
  Polytope seg({{3, 0}, {1, 0}, {2, 0}});
  EXPECT_EQ(seg.vertices().size(), 2u);
}

TEST(Elements, GridInterpolates) {
  GridFunction g(0.0, 1.0, {0.0, 2.0, 4.0});
  EXPECT_DOUBLE_EQ(g.at(0.25), 1.0);
  EXPECT_DOUBLE_EQ(g.at(1.0), 4.0);
}

TEST(Errors, CodeNamePrefixesMessage) {
  try {
    fail(ErrorCode::InsufficientData, "too few");
  } catch (const Error& e) {
    EXPECT_EQ(std::string(e.what()), "InsufficientData: too few");
    EXPECT_TRUE(e.is_statistical());
    return;
  }
  FAIL();
}

// ---------------------------------------------------------------------------
// Scalings

TEST(Scaling, Examples) {
  EXPECT_EQ(coords(apply_scaling(ScalingSpec::linear(), 1.0, vec({3, -2}))), (std::vector<double>{3, -2}));
  EXPECT_EQ(coords(apply_scaling(ScalingSpec::power_weights({1, -1, 0}), 2.0, vec({1, 1, 1}))),
            (std::vector<double>{2, 0.5, 1}));
  const PointConfig pc({{{1, 0}, 1}, {{0, 2}, 2}});
  const auto up = apply_scaling(ScalingSpec::uplifted(ScalingSpec::linear()), 3.0, pc);
  EXPECT_EQ(std::get<PointConfig>(up), PointConfig({{{3, 0}, 1}, {{0, 6}, 2}}));

  EXPECT_EQ(coords(invert_scaling(ScalingSpec::linear(), 2.0, vec({4}))), (std::vector<double>{2}));
  EXPECT_NEAR(coords(invert_scaling(ScalingSpec::log_shift(), std::numbers::e, vec({5})))[0], 4.0, 1e-15);
  EXPECT_EQ(coords(invert_scaling(ScalingSpec::inverse_linear(), 2.0, vec({1}))), (std::vector<double>{2}));
}

TEST(Scaling, OtherVariants) {
  EXPECT_EQ(coords(apply_scaling(ScalingSpec::component_subset({1}), 3.0, vec({1, 2, 3}))),
            (std::vector<double>{1, 6, 3}));
  EXPECT_EQ(coords(apply_scaling(ScalingSpec::affine_inverse(1.0), 2.0, vec({5}))), (std::vector<double>{3}));
  EXPECT_EQ(coords(apply_scaling(ScalingSpec::min_shift(), 3.0, vec({1, 4}))), (std::vector<double>{3, 6}));
}

TEST(Scaling, RejectsBadInput) {
  EXPECT_THROW(apply_scaling(ScalingSpec::linear(), 0.0, vec({1})), Error);
  EXPECT_THROW(apply_scaling(ScalingSpec::linear(), -1.0, vec({1})), Error);
  EXPECT_THROW(apply_scaling(ScalingSpec::log_shift(), 2.0, GridFunction(0, 1, {1, 2})), Error);
  try {
    apply_scaling(ScalingSpec::power_weights({1, 2}), 2.0, vec({1, 2, 3}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(ScalingProperty, GroupLawIdentityAndInverse) {
  Randoms r;
  for (const auto& c : scaling_cases()) {
    SCOPED_TRACE(c.name);
    for (int i = 0; i < 200; ++i) {
      const double t = r.scale();
      const double s = r.scale();
      const Element x = c.draw(r);
      const double tol = 1e-10 * (1.0 + norm_of(x));
      const auto two_step = apply_scaling(c.s, t, apply_scaling(c.s, s, x));
      const auto one_step = apply_scaling(c.s, t * s, x);
      // Relative to the size of the result, which can exceed |x| by t s.
      ASSERT_LE(element_distance(two_step, one_step), tol * (1.0 + norm_of(one_step))) << i;
      ASSERT_EQ(apply_scaling(c.s, 1.0, x), x);
      ASSERT_LE(element_distance(invert_scaling(c.s, t, apply_scaling(c.s, t, x)), x), tol) << i;
    }
  }
}

// ---------------------------------------------------------------------------
// Moduli

TEST(Modulus, Examples) {
  EXPECT_EQ(Modulus::beta_star(0.0).eval(vec({3, 5})), 5.0);
  EXPECT_NEAR(Modulus::beta_min(0.25).eval(vec({16, 1})), 2.0, 1e-15);
  EXPECT_NEAR(Modulus::set_inf().eval(Polytope({{3, 0}, {0, 4}})), 2.4, 1e-15);
  EXPECT_DOUBLE_EQ(Modulus::norm(2).eval(vec({3, 4})), 5.0);
  EXPECT_DOUBLE_EQ(Modulus::norm(1).eval(vec({3, -4})), 7.0);
  EXPECT_DOUBLE_EQ(Modulus::kth_largest_abs(2).eval(vec({1, -7, 3})), 3.0);
  EXPECT_DOUBLE_EQ(Modulus::coord_if_axis(0).eval(vec({2, 0})), 2.0);
  EXPECT_DOUBLE_EQ(Modulus::coord_if_axis(0).eval(vec({2, 1e-300})), 0.0);
}

TEST(Modulus, ExtendedRealConventions) {
  EXPECT_TRUE(std::isinf(Modulus::set_inf().eval(PointConfig())));
  const PointConfig two({{{1, 0}, 1}, {{0, 3}, 1}});
  EXPECT_EQ(Modulus::kth_largest_point(3, Modulus::norm(2)).eval(two), 0.0);
}

TEST(Modulus, ParseAndDescribeRoundTrip) {
  for (const char* text : {"max_abs", "beta_star(0.25)", "beta_min(0.5)", "coord_abs(1)", "norm(2)",
                           "kth_largest_point(2, norm(2))", "max_of(coord_abs(0), scaled(2, coord_abs(1)))",
                           "linear_form(1, 0.5)", "oscillation(0.1)"}) {
    EXPECT_EQ(parse_modulus(text).describe(), text);
  }
  EXPECT_THROW(parse_modulus("beta_star(2)"), Error);
  EXPECT_THROW(parse_modulus("no_such_modulus"), Error);
}

TEST(Modulus, IncompatibleVariant) {
  try {
    (void)Modulus::sup_abs().eval(vec({1, 2}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IncompatibleVariant);
  }
}

TEST(Modulus, OscillationOfBrokenLineIsExact) {
  // V1 u + V2 (1 - u) on 65 nodes: osc_eps = eps |V1 - V2| for grid multiples.
  std::vector<double> v(65);
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double u = static_cast<double>(j) / 64.0;
    v[j] = 7.0 * u + 2.0 * (1.0 - u);
  }
  const GridFunction g(0.0, 1.0, v);
  EXPECT_NEAR(Modulus::oscillation(0.25).eval(g), 0.25 * 5.0, 1e-12);
  EXPECT_NEAR(Modulus::oscillation(0.26).eval(g), 0.25 * 5.0, 1e-12);  // rounded down to the grid
  EXPECT_LE(Modulus::oscillation(0.25).eval(g), 0.25 * (7.0 + 2.0));
  EXPECT_EQ(Modulus::oscillation(0.25).eval(GridFunction(0.0, 1.0, std::vector<double>(65, 3.0))), 0.0);
}

TEST(Modulus, SequenceModuliAreTruncationStable) {
  Randoms r;
  for (int i = 0; i < 100; ++i) {
    auto v = r.values(4);
    const Sequence s(v);
    v.insert(v.end(), 5, 0.0);
    const Sequence padded(v);
    for (const auto& m : {Modulus::max_abs(), Modulus::norm(2), Modulus::kth_largest_abs(2), Modulus::coord_abs(2),
                          Modulus::min_abs()})
      ASSERT_EQ(m.eval(s), m.eval(padded)) << m.describe();
  }
}

TEST(ModulusProperty, Homogeneity) {
  Randoms r;
  for (const auto& c : modulus_cases()) {
    SCOPED_TRACE(c.m.describe());
    for (int i = 0; i < 500; ++i) {
      const double t = r.scale();
      const Element x = c.draw(r);
      const auto s = paired_scaling(c.m, kind_of(x));
      const double lhs = c.m.eval(apply_scaling(s, t, x));
      const double rhs = t * c.m.eval(x);
      ASSERT_LE(std::abs(lhs - rhs), 1e-9 * (1.0 + rhs)) << "t = " << t;
    }
  }
}

TEST(ModulusProperty, BetaZeroAndOrderingChain) {
  Randoms r;
  for (int i = 0; i < 500; ++i) {
    const auto x = r.positive(2);
    ASSERT_EQ(Modulus::beta_star(0.0).eval(x), Modulus::max_abs().eval(x));
    ASSERT_EQ(Modulus::beta_min(0.0).eval(x), Modulus::min_abs().eval(x));
    const double b = r.unif(0.01, 0.49);
    const double mn = Modulus::min_abs().eval(x);
    const double bm = Modulus::beta_min(b).eval(x);
    const double bs = Modulus::beta_star(b).eval(x);
    const double mx = Modulus::max_abs().eval(x);
    const double eps = 1e-12 * mx;
    ASSERT_LE(mn, bm + eps);
    ASSERT_LE(bm, bs + eps);
    ASSERT_LE(bs, mx + eps);
  }
}

TEST(ModulusProperty, KthLargestPointMatchesSort) {
  Randoms r;
  for (int i = 0; i < 300; ++i) {
    const auto pc = r.points();
    std::vector<double> all;
    for (const auto& p : pc.points())
      for (std::size_t m = 0; m < p.multiplicity; ++m) all.push_back(Modulus::norm(2).eval_coords(p.location));
    std::sort(all.begin(), all.end(), std::greater<>());
    for (std::size_t k = 1; k <= all.size() + 1; ++k) {
      const double want = k <= all.size() ? all[k - 1] : 0.0;
      ASSERT_EQ(Modulus::kth_largest_point(k, Modulus::norm(2)).eval(pc), want);
    }
  }
}

// ---------------------------------------------------------------------------
// Ideals, semicones, domination

TEST(Ideal, Examples) {
  const IdealSpec plain({Modulus::coord_abs(0), Modulus::coord_abs(1)});
  EXPECT_EQ(ideal_threshold(plain, vec({0, 7})), 7.0);
  const auto product = IdealSpec::product({Modulus::coord_abs(0), Modulus::coord_abs(1), Modulus::coord_abs(2)}, 2);
  EXPECT_EQ(ideal_threshold(product, vec({5, 0.1, 4})), 4.0);
  const auto graph = IdealSpec::graph(
      {Modulus::coord_abs(0), Modulus::coord_abs(1), Modulus::coord_abs(2), Modulus::coord_abs(3)}, {{1}, {0}, {3}, {2}});
  EXPECT_EQ(ideal_threshold(graph, vec({1, 2, 0, 0})), 1.0);
}

TEST(Ideal, ProductShortcutMatchesSubsetEnumeration) {
  Randoms r;
  std::vector<Modulus> cs;
  for (std::size_t i = 0; i < 5; ++i) cs.push_back(Modulus::coord_abs(i));
  for (std::size_t k = 1; k <= 5; ++k) {
    const auto spec = IdealSpec::product(cs, k);
    const auto gens = spec.derived_generators();
    for (int i = 0; i < 50; ++i) {
      const auto x = r.vector(5);
      double brute = 0.0;
      for (const auto& g : gens) brute = std::max(brute, g.eval(x));
      ASSERT_EQ(spec.threshold(x), brute);
    }
  }
  EXPECT_THROW(IdealSpec::product(cs, 6), Error);
}

TEST(Semicone, Examples) {
  const auto lin = ScalingSpec::linear();
  auto norm_gt1 = [](const Element& x) { return Modulus::norm(2).eval(x) > 1.0; };
  auto first_gt1 = [](const Element& x) { return coords(x)[0] > 1.0; };
  auto min_gt1 = [](const Element& x) { return std::min(coords(x)[0], coords(x)[1]) > 1.0; };
  EXPECT_NEAR(modulus_from_semicone(norm_gt1, vec({4, 3}), lin), 5.0, 1e-9);
  EXPECT_NEAR(modulus_from_semicone(first_gt1, vec({0.5, 99}), lin), 0.5, 1e-9);
  EXPECT_NEAR(modulus_from_semicone(min_gt1, vec({2, 3}), lin), 2.0, 1e-9);
  EXPECT_EQ(modulus_from_semicone(first_gt1, vec({-1, 5}), lin), 0.0);
}

TEST(SemiconeProperty, ReproducesModulus) {
  Randoms r;
  for (const auto& m : {Modulus::norm(2), Modulus::max_abs(), Modulus::min_abs()}) {
    auto member = [&](const Element& x) { return m.eval(x) > 1.0; };
    for (int i = 0; i < 200; ++i) {
      const auto x = r.vector(2);
      const double want = m.eval(x);
      ASSERT_NEAR(modulus_from_semicone(member, x, ScalingSpec::linear()), want, 1e-8 * std::max(1.0, want))
          << m.describe();
    }
  }
}

TEST(Domination, Examples) {
  Randoms r;
  std::vector<Element> pts;
  for (int i = 0; i < 2000; ++i) pts.push_back(r.positive(2));
  // Near-axis points, including exact zeros.
  for (int e = 0; e < 30; ++e) pts.push_back(vec({1.0, std::pow(10.0, -e)}));
  pts.push_back(vec({1.0, 0.0}));
  auto sampler = [&](std::size_t i) { return pts[i]; };
  const auto tau1 = Modulus::max_abs();
  const auto tau2 = Modulus::max_of({Modulus::coord_abs(0), Modulus::scaled(2.0, Modulus::coord_abs(1))});

  const auto a = check_domination(tau2, tau1, sampler, pts.size());
  EXPECT_TRUE(a.dominates);
  EXPECT_LE(a.witness_ratio, 2.0 + 1e-12);
  const auto b = check_domination(tau1, tau2, sampler, pts.size());
  EXPECT_TRUE(b.dominates);
  EXPECT_LE(b.witness_ratio, 1.0);

  const auto c = check_domination(Modulus::min_abs(), Modulus::max_abs(), sampler, pts.size());
  EXPECT_TRUE(c.dominates);
  EXPECT_LE(c.witness_ratio, 1.0);
  const auto d = check_domination(Modulus::max_abs(), Modulus::min_abs(), sampler, pts.size());
  EXPECT_FALSE(d.dominates);
  EXPECT_GT(d.witness_ratio, 1e6);
}

// ---------------------------------------------------------------------------
// Planar geometry

TEST(Geometry, UnitDiskMeanWidthAndSteinerPoint) {
  const auto disk = detail::polygon(4096, [](double th) { return std::array<double, 2>{std::cos(th), std::sin(th)}; });
  const auto p = disk.planar();
  // Mean width is (1 / 2 pi) times the integral of h, which is 1 for the unit
  // disk; the classical average width h(u) + h(-u) is twice that.
  EXPECT_NEAR(geom::mean_width_exact(p), 1.0, 1e-6);
  EXPECT_NEAR(2.0 * geom::mean_width_quadrature(p), 2.0, 1e-6);
  const auto s = geom::steiner_point_exact(p);
  EXPECT_NEAR(s[0], 0.0, 1e-12);
  EXPECT_NEAR(s[1], 0.0, 1e-12);
  const auto q = geom::steiner_point_quadrature(p);
  EXPECT_NEAR(geom::norm(q), 0.0, 1e-6);
}

TEST(Geometry, SegmentSteinerPointIsMidpoint) {
  const Polytope seg({{0, 0}, {3, -2}});
  const auto s = geom::steiner_point_exact(seg.planar());
  EXPECT_DOUBLE_EQ(s[0], 1.5);
  EXPECT_DOUBLE_EQ(s[1], -1.0);
  const auto q = geom::steiner_point_quadrature(seg.planar(), 7200);
  EXPECT_NEAR(q[0], 1.5, 1e-5);
  EXPECT_NEAR(q[1], -1.0, 1e-5);
}

TEST(Geometry, SquareFunctionals) {
  const Polytope sq({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}});
  const auto p = sq.planar();
  EXPECT_DOUBLE_EQ(geom::area(p), 4.0);
  EXPECT_DOUBLE_EQ(geom::perimeter(p), 8.0);
  EXPECT_DOUBLE_EQ(geom::inscribed_radius(p), 1.0);
  EXPECT_DOUBLE_EQ(geom::support(p, {1.0, 0.0}), 1.0);
  EXPECT_TRUE(geom::contains(p, {0.999, -0.999}, 0.0));
  EXPECT_FALSE(geom::contains(p, {1.001, 0.0}, 0.0));
  EXPECT_NEAR(geom::mean_width_quadrature(p), geom::mean_width_exact(p), 1e-4);
}

TEST(GeometryProperty, SteinerInsideAndSupportHomogeneity) {
  Randoms r;
  for (int i = 0; i < 2000; ++i) {
    const auto k = r.polygon();
    const auto p = k.planar();
    const auto s = geom::steiner_point_exact(p);
    ASSERT_TRUE(geom::contains(p, s, 1e-12 * (1.0 + geom::perimeter(p)))) << i;
    const auto q = geom::steiner_point_quadrature(p);
    ASSERT_LT(std::hypot(q[0] - s[0], q[1] - s[1]), 1e-3 * geom::perimeter(p)) << i;
    const auto doubled = k.scaled(2.0).planar();
    for (int j = 0; j < 16; ++j) {
      const double th = r.unif(0.0, 2.0 * std::numbers::pi);
      const geom::Point2 u{std::cos(th), std::sin(th)};
      ASSERT_EQ(geom::support(doubled, u), 2.0 * geom::support(p, u));
    }
  }
}
