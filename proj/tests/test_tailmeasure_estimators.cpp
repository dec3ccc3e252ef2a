// Tail measures (sectors, pushforward, change of modulus, assembly) and the
// estimators built on samples.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "rvlab/rvlab.hpp"

using namespace rvlab;

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

Vector vec(std::initializer_list<double> v) { return Vector(std::vector<double>(v)); }

TailMeasure measure(double alpha, std::vector<Atom> atoms, Modulus ref = Modulus::max_abs()) {
  return TailMeasure(alpha, SpectralMeasure(std::move(atoms), std::move(ref)), ScalingSpec::linear());
}

// Random measure on the max-abs sphere of the positive orthant.
TailMeasure random_measure(std::mt19937_64& eng, std::size_t atoms, std::size_t dim, double alpha) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<Atom> out;
  for (std::size_t i = 0; i < atoms; ++i) {
    std::vector<double> v(dim);
    for (auto& x : v) x = u(eng);
    const double m = *std::max_element(v.begin(), v.end());
    for (auto& x : v) x /= m;
    out.push_back({Vector(std::move(v)), 0.2 + u(eng)});
  }
  return measure(alpha, std::move(out));
}

std::vector<double> coords(const Element& x) { return flatten(x); }

bool none(const Element&) { return false; }

// Atoms may come back merged and reordered; look one up by location.
const Atom& atom_at(const TailMeasure& mu, const std::vector<double>& where) {
  for (const auto& a : mu.spectral().atoms()) {
    const auto v = coords(a.location);
    if (v.size() == where.size() && std::equal(v.begin(), v.end(), where.begin(),
                                               [](double x, double y) { return std::abs(x - y) < 1e-12; }))
      return a;
  }
  throw std::runtime_error("no atom at the requested location");
}

}  // namespace

// ---------------------------------------------------------------------------
// Tail measures

TEST(Theta, Examples) {
  EXPECT_EQ(theta_tail(2.0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(theta_tail(1.0, 10.0), 0.1);
  EXPECT_DOUBLE_EQ(theta_tail(0.5, 4.0), 0.5);
  EXPECT_EQ(theta_tail(1.0, kInfinity), 0.0);
  EXPECT_THROW(theta_tail(1.0, 0.0), Error);
  EXPECT_THROW(theta_interval(1.0, 2.0, 2.0), Error);
}

TEST(Sector, Examples) {
  EXPECT_DOUBLE_EQ(sector_mass(measure(1.0, {{vec({1}), 1.0}}), all_directions, 1.0, kInfinity), 1.0);
  const auto mu = measure(2.0, {{vec({1, 0.5}), 0.3}, {vec({0.2, 1}), 0.7}});
  EXPECT_DOUBLE_EQ(sector_mass(mu, all_directions, 2.0, 4.0), 0.1875);
  EXPECT_EQ(sector_mass(mu, none, 2.0, 4.0), 0.0);
  EXPECT_THROW(sector_mass(mu, all_directions, 0.0, 4.0), Error);
}

TEST(Sector, AtomsMustLieOnTheSphere) {
  EXPECT_THROW(measure(1.0, {{vec({2, 0.5}), 1.0}}), Error);
  EXPECT_THROW(measure(1.0, {{vec({1, 0.5}), -1.0}}), Error);
}

TEST(SectorProperty, Homogeneity) {
  std::mt19937_64 eng(3);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (int i = 0; i < 500; ++i) {
    const auto mu = random_measure(eng, 4, 2, u(eng));
    const double s = u(eng), c = u(eng);
    const double t = s * (1.0 + u(eng));
    auto first_big = [](const Element& x) { return coords(x)[0] > 0.5; };
    const double base = sector_mass(mu, first_big, s, t);
    const double scaled = sector_mass(mu, first_big, c * s, c * t);
    const double want = std::pow(c, -mu.alpha()) * base;
    ASSERT_NEAR(scaled, want, 1e-12 * (1.0 + std::max(scaled, want)));
  }
}

TEST(Pushforward, Examples) {
  const auto half = measure(1.0, {{vec({1}), 0.5}});
  const auto onto_axis = pushforward(half, [](const Element& x) -> Element { return vec({coords(x)[0], 0.0}); },
                                     Modulus::max_abs());
  ASSERT_EQ(onto_axis.spectral().atoms().size(), 1u);
  EXPECT_EQ(coords(onto_axis.spectral().atoms()[0].location), (std::vector<double>{1, 0}));
  EXPECT_DOUBLE_EQ(onto_axis.spectral().atoms()[0].weight, 0.5);

  const auto mu = measure(1.5, {{vec({1, 0.4}), 0.3}, {vec({0.25, 1}), 0.7}});
  const auto same = pushforward(mu, [](const Element& x) { return x; }, Modulus::max_abs());
  ASSERT_EQ(same.spectral().atoms().size(), 2u);
  EXPECT_EQ(atom_at(same, {1, 0.4}).weight, 0.3);
  EXPECT_EQ(atom_at(same, {0.25, 1}).weight, 0.7);

  const auto segment = pushforward(
      measure(1.0, {{vec({1}), 1.0}}),
      [](const Element& x) -> Element { return Polytope({{0.0}, {coords(x)[0]}}); }, Modulus::set_sup());
  ASSERT_EQ(segment.spectral().atoms().size(), 1u);
  EXPECT_EQ(segment.spectral().atoms()[0].location, Element(Polytope({{0.0}, {1.0}})));
  EXPECT_DOUBLE_EQ(segment.spectral().atoms()[0].weight, 1.0);
}

TEST(Pushforward, Errors) {
  const auto mu = measure(1.0, {{vec({1}), 1.0}});
  try {
    (void)pushforward(mu, [](const Element& x) -> Element { return vec({coords(x)[0] + 1.0}); }, Modulus::max_abs());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonMorphism);
  }
  try {
    (void)pushforward(mu, [](const Element& x) -> Element { return vec({coords(x)[0], 0.0}); }, Modulus::coord_abs(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TrivialPushforward);
    EXPECT_TRUE(e.is_statistical());
  }
}

TEST(PushforwardProperty, InvertibleLinearRoundTrip) {
  // nu = mu o f^{-1}: nu({tau' > s, direction in D}) = mu({x : tau'(f x) > s, f x direction in D}).
  std::mt19937_64 eng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const auto mu = random_measure(eng, 3, 2, 1.0 + std::abs(u(eng)));
    const double a = 1.0 + std::abs(u(eng)), b = u(eng), c = u(eng), d = 1.0 + std::abs(u(eng));
    auto f = [=](const Element& x) -> Element {
      const auto v = coords(x);
      return vec({a * v[0] + b * v[1], c * v[0] + d * v[1]});
    };
    const auto target = Modulus::norm(2);
    const auto nu = pushforward(mu, f, target);
    auto right = [](const Element& x) { return coords(x)[0] > 0.0; };
    const double s = 0.5 + std::abs(u(eng));
    double direct = 0.0;
    for (const auto& at : mu.spectral().atoms()) {
      const auto y = f(at.location);
      if (right(y)) direct += at.weight * std::pow(target.eval(y) / s, mu.alpha());
    }
    ASSERT_NEAR(sector_mass(nu, right, s, kInfinity), direct, 1e-12 * (1.0 + direct));
  }
}

TEST(ChangeModulus, Examples) {
  const auto mu = measure(1.5, {{vec({1, 0.4}), 0.3}, {vec({0.25, 1}), 0.7}});
  const auto same = change_modulus(mu, Modulus::max_abs());
  ASSERT_EQ(same.spectral().atoms().size(), 2u);
  EXPECT_DOUBLE_EQ(atom_at(same, {1, 0.4}).weight, 0.3);
  EXPECT_DOUBLE_EQ(atom_at(same, {0.25, 1}).weight, 0.7);

  const auto axes = measure(1.0, {{vec({1, 0}), 1.0}, {vec({0, 1}), 1.0}});
  const auto first = change_modulus(axes, Modulus::coord_abs(0));
  ASSERT_EQ(first.spectral().atoms().size(), 1u);
  EXPECT_EQ(coords(first.spectral().atoms()[0].location), (std::vector<double>{1, 0}));
  EXPECT_DOUBLE_EQ(first.spectral().atoms()[0].weight, 1.0);

  const auto doubled = change_modulus(mu, Modulus::scaled(2.0, Modulus::max_abs()));
  ASSERT_EQ(doubled.spectral().atoms().size(), 2u);
  EXPECT_DOUBLE_EQ(atom_at(doubled, {0.5, 0.2}).weight, 0.3 * std::pow(2.0, 1.5));
  EXPECT_DOUBLE_EQ(atom_at(doubled, {0.125, 0.5}).weight, 0.7 * std::pow(2.0, 1.5));

  try {
    (void)change_modulus(axes, Modulus::min_abs());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TrivialResult);
  }
}

TEST(ChangeModulus, AxisMeasureAgainstConditioning) {
  // i.i.d. Pareto(1) pair: t P{x_0 > t, T_{1/t} xi in A} -> mass of A under the
  // measure on {|x_0| = 1}, which is the single atom e_0 with weight 1.
  const auto g = make_generator(gen::ParetoIID{1.0, 2});
  const auto xs = sample_vectors(*g, 41, 1'000'000);
  const double t = 200.0;
  const double est = empirical_tail_mass(
      xs, [](std::span<const double> x) { return x[0] > 2.0 && x[1] < 0.1; }, t, t, ScalingSpec::linear());
  const double se = t * std::sqrt(0.5 / t / 1e6);
  EXPECT_NEAR(est, 0.5, 4.0 * se);
}

TEST(ChangeModulusProperty, MassIdentity) {
  std::mt19937_64 eng(5);
  std::uniform_real_distribution<double> u(0.2, 1.0);
  for (int i = 0; i < 200; ++i) {
    const auto mu = random_measure(eng, 3, 3, 0.5 + 2.0 * u(eng));
    const auto ell = Modulus::linear_form({u(eng), u(eng), u(eng)});
    const auto changed = change_modulus(mu, ell);
    double sum = 0.0;
    for (const auto& at : mu.spectral().atoms()) sum += at.weight * std::pow(ell.eval(at.location), mu.alpha());
    ASSERT_NEAR(sector_mass(changed, all_directions, 1.0, kInfinity), sum, 1e-12 * std::max(1.0, sum));
  }
}

TEST(Assembly, SingleCoordinate) {
  const auto part = measure(1.5, {{vec({1}), 0.8}, {vec({-1}), 0.2}});
  const auto seg = assemble_from_marginals({part}, 2.0);
  EXPECT_NEAR(seg.total(), sector_mass(part, all_directions, 2.0, kInfinity), 1e-15);
  EXPECT_NEAR(seg.mass([](const Element& x) { return coords(x)[0] > 0; }, 3.0, 5.0),
              sector_mass(part, [](const Element& x) { return coords(x)[0] > 0; }, 3.0, 5.0), 1e-15);
  EXPECT_EQ(seg.mass(all_directions, 0.5, 2.0), 0.0);
}

TEST(Assembly, ExchangeablePairCoincidesWithAxisMeasure) {
  const auto mu = measure(1.0, {{vec({1, 0}), 1.0}, {vec({0, 1}), 1.0}});
  const std::vector<TailMeasure> parts{change_modulus(mu, Modulus::coord_abs(0)), change_modulus(mu, Modulus::coord_abs(1))};
  const double a = 1.0;
  const auto seg = assemble_from_marginals(parts, a);
  auto first = [](const Element& x) { return coords(x)[0] == 1.0; };
  for (auto [s, t] : {std::pair{1.0, 2.0}, {2.0, 4.0}, {4.0, kInfinity}, {1.0, kInfinity}}) {
    EXPECT_DOUBLE_EQ(seg.mass(first, s, t), sector_mass(mu, first, s, t));
    EXPECT_DOUBLE_EQ(seg.mass(all_directions, s, t), sector_mass(mu, all_directions, s, t));
  }
}

TEST(AssemblyProperty, PermutationInvariance) {
  std::mt19937_64 eng(17);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  const std::vector<std::vector<std::size_t>> perms{{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {0, 2, 1}, {2, 1, 0}, {1, 0, 2}};
  for (int i = 0; i < 200; ++i) {
    const auto mu = random_measure(eng, 4, 3, 0.5 + u(eng));
    const double a = 0.5 + u(eng);
    auto assemble = [&](const std::vector<std::size_t>& p) {
      std::vector<Atom> atoms;
      for (const auto& at : mu.spectral().atoms()) {
        const auto v = coords(at.location);
        atoms.push_back({vec({v[p[0]], v[p[1]], v[p[2]]}), at.weight});
      }
      const auto permuted = measure(mu.alpha(), std::move(atoms));
      std::vector<TailMeasure> parts;
      for (std::size_t j = 0; j < 3; ++j) parts.push_back(change_modulus(permuted, Modulus::coord_abs(j)));
      return assemble_from_marginals(parts, a);
    };
    const auto base = assemble(perms[0]);
    const double total = sector_mass(mu, all_directions, a, kInfinity);
    ASSERT_NEAR(base.total(), total, 1e-12 * total);
    for (const auto& p : perms) {
      const auto seg = assemble(p);
      // Coordinate p[j] of the permuted vector is coordinate j of the original.
      std::size_t where0 = 0;
      while (p[where0] != 0) ++where0;
      auto big0 = [&](const Element& x) { return coords(x)[where0] > 0.6; };
      auto big0_base = [](const Element& x) { return coords(x)[0] > 0.6; };
      for (auto [s, t] : {std::pair{a, 2.0 * a}, {1.5 * a, kInfinity}, {a, kInfinity}}) {
        const double want = base.mass(big0_base, s, t);
        ASSERT_NEAR(seg.mass(big0, s, t), want, 1e-12 * (1.0 + want));
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Estimators

TEST(Polar, Examples) {
  const auto a = polar_decompose(Modulus::norm(2), ScalingSpec::linear(), vec({3, 4}));
  EXPECT_DOUBLE_EQ(a.radius, 5.0);
  EXPECT_EQ(coords(a.direction), (std::vector<double>{0.6, 0.8}));
  const auto b = polar_decompose(Modulus::max_abs(), ScalingSpec::linear(), vec({2, -6}));
  EXPECT_DOUBLE_EQ(b.radius, 6.0);
  EXPECT_DOUBLE_EQ(coords(b.direction)[0], 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(coords(b.direction)[1], -1.0);
  try {
    (void)polar_decompose(Modulus::max_abs(), ScalingSpec::linear(), vec({0, 0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroModulus);
  }
}

TEST(PolarProperty, RoundTrip) {
  std::mt19937_64 eng(23);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  const std::vector<std::pair<Modulus, ScalingSpec>> cases{
      {Modulus::norm(2), ScalingSpec::linear()},
      {Modulus::max_abs(), ScalingSpec::linear()},
      {Modulus::beta_star(0.25), ScalingSpec::linear()},
      {Modulus::norm(2), ScalingSpec::power_weights({1, 1})},
  };
  for (const auto& [tau, s] : cases) {
    for (int i = 0; i < 200; ++i) {
      const auto x = vec({u(eng), u(eng)});
      const auto p = polar_decompose(tau, s, x);
      ASSERT_NEAR(tau.eval(p.direction), 1.0, 1e-12);
      ASSERT_LE(element_distance(apply_scaling(s, p.radius, p.direction), x), 1e-12 * (1.0 + coordinate_size(x)));
    }
  }
  // Sets: polar decomposition of a polygon under set_sup.
  const Polytope k({{1, 2}, {-3, 0.5}, {0.5, -1}});
  const auto p = polar_decompose(Modulus::set_sup(), ScalingSpec::set_linear(), k);
  EXPECT_NEAR(Modulus::set_sup().eval(p.direction), 1.0, 1e-15);
  EXPECT_LE(element_distance(apply_scaling(ScalingSpec::set_linear(), p.radius, p.direction), k), 1e-15);
}

TEST(Hill, EqualRadiiAreInsufficient) {
  try {
    (void)estimate_tail_index(std::vector<double>(1000, 3.0), 100);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientData);
  }
  EXPECT_THROW(estimate_tail_index(std::vector<double>{1.0, 2.0}, 2), Error);
}

TEST(Hill, ParetoSamples) {
  const auto one = sample_scalars(gen::Pareto{1.0}, 101, 1'000'000);
  const auto h1 = estimate_tail_index(one, 10'000);
  EXPECT_NEAR(h1.alpha_hat, 1.0, 3.0 * h1.std_error);
  EXPECT_EQ(h1.k, 10'000u);
  const auto two = sample_scalars(gen::Pareto{2.0}, 102, 1'000'000);
  const auto h2 = estimate_tail_index(two, default_k(two.size()));
  EXPECT_NEAR(h2.alpha_hat, 2.0, 3.0 * h2.std_error);
}

TEST(HillProperty, ScaleInvarianceIsExactForPowersOfTwo) {
  std::mt19937_64 eng(29);
  std::uniform_int_distribution<int> e(-20, 20);
  for (int i = 0; i < 200; ++i) {
    auto v = sample_scalars(gen::Pareto{1.0 + 0.01 * i}, 1000 + static_cast<std::uint64_t>(i), 2000);
    const auto base = estimate_tail_index(v, 200);
    const double c = std::ldexp(1.0, e(eng));
    for (auto& x : v) x *= c;
    const auto scaled = estimate_tail_index(v, 200);
    ASSERT_EQ(scaled.alpha_hat, base.alpha_hat);
    ASSERT_EQ(scaled.std_error, base.std_error);
    ASSERT_EQ(scaled.threshold, c * base.threshold);
  }
}

TEST(EmpiricalSpectral, IidPairIsSupportedByTheAxes) {
  const auto xs = sample_vectors(gen::ParetoIID{1.0, 2}, 43, 1'000'000);
  const auto sm = empirical_spectral(xs, Modulus::max_abs(), ScalingSpec::linear(), 1000.0);
  const double m = static_cast<double>(sm.atoms().size());
  EXPECT_NEAR(sm.total_weight(), 1.0, 1e-12);
  const double first = spectral_weight(sm, [](const Element& u) { return coords(u)[0] == 1.0; });
  EXPECT_NEAR(first, 0.5, 4.0 * std::sqrt(0.25 / m));
  const double near_axes = spectral_weight(sm, [](const Element& u) {
    const auto v = coords(u);
    return std::min(v[0], v[1]) < 0.05;
  });
  EXPECT_GT(near_axes, 0.95);
}

TEST(EmpiricalSpectral, SpectralRVWeightsRecovered) {
  const auto mu = measure(1.5, {{vec({1, 0.4}), 0.3}, {vec({0.25, 1}), 0.7}});
  const auto g = gen::SpectralRV{std::make_shared<const TailMeasure>(mu)};
  const auto xs = sample_vectors(g, 47, 200'000);
  const auto sm = empirical_spectral(xs, Modulus::max_abs(), ScalingSpec::linear(), 10.0);
  const double m = static_cast<double>(sm.atoms().size());
  EXPECT_NEAR(sm.total_weight(), 1.0, 1e-12);
  for (const auto& a : sm.atoms()) ASSERT_NEAR(Modulus::max_abs().eval(a.location), 1.0, 1e-9);
  const double w = spectral_weight(sm, [](const Element& u) { return coords(u)[0] == 1.0; });
  EXPECT_NEAR(w, 0.3, 3.0 * std::sqrt(0.3 * 0.7 / m));
}

TEST(EmpiricalSpectral, NoExceedances) {
  const auto xs = sample_vectors(gen::ParetoIID{1.0, 2}, 1, 1000);
  try {
    (void)empirical_spectral(xs, Modulus::max_abs(), ScalingSpec::linear(), 1e12);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientExceedances);
  }
}

TEST(EmpiricalTailMass, IidParetoPair) {
  const auto xs = sample_vectors(gen::ParetoIID{1.0, 2}, 53, 1'000'000);
  const auto lin = ScalingSpec::linear();
  const double n = 1e6;
  const double above = empirical_tail_mass(
      xs, [](std::span<const double> x) { return std::max(x[0], x[1]) > 1.0; }, 10.0, 10.0, lin);
  EXPECT_NEAR(above, 1.9, 4.0 * 10.0 * std::sqrt(0.19 * 0.81 / n));
  EXPECT_EQ(empirical_tail_mass(xs, [](std::span<const double>) { return false; }, 10.0, 10.0, lin), 0.0);
  const double both = empirical_tail_mass(
      xs, [](std::span<const double> x) { return std::min(x[0], x[1]) > 1.0; }, 10.0, 100.0, lin);
  EXPECT_NEAR(both, 1.0, 4.0 * 100.0 * std::sqrt(0.01 * 0.99 / n));
}

TEST(EmpiricalTailMass, SelfNormalised) {
  const auto xs = sample_vectors(gen::ParetoIID{1.5, 3}, 59, 200'000);
  const auto tau = Modulus::norm(2);
  const double t = 20.0;
  const auto v = modulus_values(xs, tau);
  const double p = static_cast<double>(std::count_if(v.begin(), v.end(), [&](double x) { return x > t; })) / 2e5;
  const double est = empirical_tail_mass(
      xs, [&](std::span<const double> x) { return tau.eval_coords(x) > 1.0; }, t, 1.0 / p, ScalingSpec::linear());
  EXPECT_NEAR(est, 1.0, 1e-12);
}

TEST(Ladder, IidParetoPairIndices) {
  const auto xs = sample_vectors(gen::ParetoIID{1.0, 2}, 61, 1'000'000);
  const std::vector<Modulus> ladder{Modulus::max_abs(), Modulus::beta_star(0.25), Modulus::beta_min(0.25),
                                    Modulus::min_abs()};
  const auto entries = hidden_rv_ladder(xs, ladder, default_k(xs.size()));
  ASSERT_EQ(entries.size(), 4u);
  const std::vector<double> want{1.0, 4.0 / 3.0, 2.0, 2.0};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(entries[i].hill.alpha_hat, want[i], 0.07 * want[i]) << i;
  EXPECT_EQ(entries[0].classification, LadderClass::Same);
  for (std::size_t i = 1; i < 4; ++i) EXPECT_EQ(entries[i].classification, LadderClass::Hidden);
  // Indices are nondecreasing along the chain of shrinking ideals, up to noise.
  for (std::size_t i = 1; i < 4; ++i)
    EXPECT_GE(entries[i].hill.alpha_hat + 3.0 * entries[i].hill.std_error, entries[i - 1].hill.alpha_hat);

  const auto single = hidden_rv_ladder(xs, {Modulus::max_abs()}, default_k(xs.size()));
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0].classification, LadderClass::Same);
  EXPECT_EQ(single[0].comment.rfind("reference", 0), 0u);
}

TEST(Ladder, HalfBetaHasLogCorrection) {
  const auto xs = sample_vectors(gen::ParetoIID{1.0, 2}, 20240101, 10'000'000);
  // P{tau > t} = t^-2 (1 + 2 log t), so the log log t coefficient is 1.
  const auto entries = hidden_rv_ladder(xs, {Modulus::beta_min(0.5)}, default_k(xs.size()), 100'000);
  ASSERT_EQ(entries.size(), 1u);
  ASSERT_TRUE(entries[0].log_fit.has_value());
  EXPECT_TRUE(entries[0].log_fit->flagged);
  EXPECT_NEAR(entries[0].log_fit->loglog, 1.0, 3.0 * entries[0].log_fit->loglog_stderr);
  EXPECT_NE(entries[0].comment.find("log correction"), std::string::npos);
  EXPECT_NEAR(entries[0].hill.alpha_hat, 2.0, 0.3);
}

TEST(ConditionalLimit, ParetoScalarIsExact) {
  const auto xs = sample_vectors(gen::Pareto{1.0}, 67, 1'000'000);
  std::vector<std::pair<std::string, CoordPredicate>> probes;
  for (double a : {1.0, 2.0, 4.0})
    probes.emplace_back("(" + format_number(a) + ", inf)", [a](std::span<const double> x) { return x[0] > a; });
  const auto table = conditional_limit_test(xs, Modulus::max_abs(), Modulus::max_abs(), {10.0, 100.0}, probes,
                                            ScalingSpec::linear());
  for (const auto& lvl : table.levels) {
    EXPECT_EQ(lvl.frequency[0], 1.0);
    EXPECT_NEAR(lvl.frequency[1], 0.5, 4.0 * lvl.std_error[1]);
    EXPECT_NEAR(lvl.frequency[2], 0.25, 4.0 * lvl.std_error[2]);
  }
  EXPECT_FALSE(table.index_mismatch);
}

TEST(ConditionalLimit, ScaledEllMatchesShiftedThreshold) {
  const auto xs = sample_vectors(gen::ParetoIID{1.0, 2}, 71, 500'000);
  std::vector<std::pair<std::string, CoordPredicate>> probes{
      {"first", [](std::span<const double> x) { return x[0] > 2.0; }}};
  const auto tau = Modulus::max_abs();
  const auto a = conditional_limit_test(xs, tau, Modulus::scaled(2.0, tau), {20.0}, probes, ScalingSpec::linear());
  const auto b = conditional_limit_test(xs, tau, tau, {10.0}, {{"first", [](std::span<const double> x) {
                                                                   return x[0] > 4.0;
                                                                 }}},
                                        ScalingSpec::linear());
  EXPECT_EQ(a.levels[0].exceedances, b.levels[0].exceedances);
  EXPECT_EQ(a.levels[0].frequency[0], b.levels[0].frequency[0]);
}

TEST(ConditionalLimit, DombryRibatetIndexMismatch) {
  const auto xs = sample_vectors(gen::DombryRibatet{1.0}, 73, 2'000'000);
  const auto ell = Modulus::coord_if_axis(0);
  std::vector<std::pair<std::string, CoordPredicate>> probes;
  for (double a : {2.0, 4.0}) probes.emplace_back("a", [a](std::span<const double> x) { return x[0] > a; });
  const auto table = conditional_limit_test(xs, Modulus::max_abs(), ell, {5.0, 10.0, 20.0}, probes,
                                            ScalingSpec::linear());
  const auto& top = table.levels.back();
  EXPECT_NEAR(top.frequency[0], 0.25, 4.0 * top.std_error[0]);
  EXPECT_NEAR(top.frequency[1], 1.0 / 16.0, 4.0 * top.std_error[1]);
  EXPECT_TRUE(table.index_mismatch);
  EXPECT_NEAR(table.tau_index.alpha_hat, 1.0, 0.07);
  EXPECT_NEAR(table.ell_index.alpha_hat, 2.0, 0.14);
}

TEST(TailProcess, IidAndSharedSequences) {
  const std::vector<double> xs{0.5, 2.0};
  const auto iid = sample(gen::ParetoSequence{1.0, 9, false}, 79, 200'000);
  for (const auto& r : tail_process_estimate(iid, {50.0}, 1, xs)) {
    if (r.lag == 0) {
      EXPECT_NEAR(r.probability, r.x < 1.0 ? 1.0 : 0.5, 4.0 * r.std_error + 1e-12);
    } else {
      EXPECT_LT(r.probability, 0.05);
    }
  }
  const auto shared = sample(gen::ParetoSequence{1.0, 9, true}, 83, 100'000);
  const auto rows = tail_process_estimate(shared, {50.0}, 2, xs);
  for (const auto& r : rows) {
    const auto& same_x = *std::find_if(rows.begin(), rows.end(), [&](const TailProcessRow& q) {
      return q.lag == 0 && q.x == r.x;
    });
    EXPECT_EQ(r.probability, same_x.probability);
  }
}

TEST(TailProcess, MovingMaximumClosedForm) {
  const std::vector<double> w{1.0, 0.5, 0.25};
  const auto seqs = sample(gen::MovingMax{1.0, 12, w}, 89, 300'000);
  for (const auto& r : tail_process_estimate(seqs, {1000.0}, 2, {0.25, 0.5})) {
    const double want = moving_max_tail_process(w, 1.0, r.lag, r.x);
    EXPECT_NEAR(r.probability, want, 4.0 * std::max(r.std_error, 1e-3)) << "lag " << r.lag << " x " << r.x;
  }
}

TEST(FunctionDiagnostic, BrokenLinesConstantsAndSpikes) {
  auto g = [](double t) { return t; };
  const auto lines = sample(gen::BrokenLine{1.0, 65}, 97, 200'000);
  const auto d = function_rv_diagnostic(lines, {{0.25, 0.5, 0.75}}, {0.05, 0.1, 0.2}, 0.5, {10.0, 100.0}, g);
  ASSERT_EQ(d.fidi.size(), 1u);
  EXPECT_NEAR(d.fidi[0].hill.alpha_hat, 1.0, 4.0 * d.fidi[0].hill.std_error);
  EXPECT_TRUE(d.decays);

  const auto flat = sample(gen::ConstantFunction{1.0, 33}, 101, 20'000);
  const auto c = function_rv_diagnostic(flat, {{0.5}}, {0.1, 0.2}, 0.5, {10.0}, g);
  for (const auto& cell : c.oscillation) EXPECT_EQ(cell.value, 0.0);
  EXPECT_TRUE(c.decays);

  const auto spikes = sample(gen::RandomSpike{1.0, 0.05, 257}, 103, 200'000);
  const auto s = function_rv_diagnostic(spikes, {{0.5}}, {0.1, 0.2}, 0.5, {10.0, 100.0}, g);
  EXPECT_FALSE(s.decays);
}
