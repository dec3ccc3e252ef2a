// Samplers and the limit theorems checked on simulated data.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rvlab/rvlab.hpp"

using namespace rvlab;

namespace {

struct ThreadGuard {
  ~ThreadGuard() { set_threads(0); }
};

template <class F>
void for_each_thread_count(F&& f) {
  ThreadGuard guard;
  for (unsigned t : {1u, 2u, 8u}) {
    set_threads(t);
    f(t);
  }
}

PolarRect radial(double s, double t = kInf) {
  PolarRect a;
  a.name = "(" + format_number(s) + ", " + format_number(t) + ")";
  a.tau = Modulus::max_abs();
  a.s = s;
  a.t = t;
  a.target = 1.0 / s - (std::isinf(t) ? 0.0 : 1.0 / t);
  return a;
}

std::size_t total_points(const Element& e) {
  std::size_t m = 0;
  for (const auto& p : std::get<PointConfig>(e).points()) m += p.multiplicity;
  return m;
}

std::vector<double> values(const GridFunction& f) { return {f.values().begin(), f.values().end()}; }

}  // namespace

TEST(Samplers, ThreadCountDoesNotChangeDraws) {
  const auto point = make_generator(gen::ParetoIID{1.0, 2});
  const std::vector<GeneratorSpec> gens{
      gen::Pareto{1.5},
      gen::ParetoIID{1.0, 3},
      gen::BrokenLine{1.0, 17},
      gen::MovingMax{1.0, 6, {1.0, 0.5}},
      gen::PoissonPP{2.0, point},
      gen::ConvexHull{4, point},
      gen::DombryRibatet{1.0},
  };
  for (const auto& g : gens) {
    std::vector<std::vector<Element>> runs;
    for_each_thread_count([&](unsigned) { runs.push_back(sample(g, 99, 3000)); });
    ASSERT_EQ(runs[0], runs[1]);
    ASSERT_EQ(runs[0], runs[2]);
  }
  std::vector<std::vector<std::pair<double, double>>> pairs;
  for_each_thread_count([&](unsigned) {
    pairs.push_back(sample_pair_with_covariate(gen::Pareto{1.0}, eta::CltAverage{1.0, 1.5}, 5, 5000));
  });
  EXPECT_EQ(pairs[0], pairs[1]);
  EXPECT_EQ(pairs[0], pairs[2]);
}

TEST(SamplersProperty, SamplesArePrefixes) {
  const std::vector<GeneratorSpec> gens{gen::Pareto{1.0}, gen::ParetoSequence{2.0, 4, false},
                                        gen::RandomSpike{1.0, 0.1, 33}};
  for (const auto& g : gens) {
    const auto small = sample(g, 7, 100);
    const auto large = sample(g, 7, 1000);
    ASSERT_TRUE(std::equal(small.begin(), small.end(), large.begin()));
    ASSERT_NE(sample(g, 8, 100), small);
  }
}

TEST(Samplers, ParetoLogSurvivalSlope) {
  for (double alpha : {0.5, 1.0, 2.0}) {
    auto v = sample_scalars(gen::Pareto{alpha}, 31, 1'000'000);
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    std::vector<double> lx, ly;
    for (double t = 2.0; t <= std::min(50.0, std::pow(n, 1.0 / alpha) / 30.0); t *= 1.25) {
      const auto above = v.end() - std::upper_bound(v.begin(), v.end(), t);
      lx.push_back(std::log(t));
      ly.push_back(std::log(static_cast<double>(above) / n));
    }
    ASSERT_GE(lx.size(), 5u);
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(lx.size());
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(ly.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sxy += (lx[i] - mx) * (ly[i] - my);
      sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    EXPECT_NEAR(-sxy / sxx, alpha, 0.02 * alpha) << alpha;
    EXPECT_GE(v.front(), 1.0);
  }
}

TEST(Samplers, PointProcesses) {
  const auto point = make_generator(gen::ParetoIID{1.0, 2});
  for (const auto& e : sample(gen::BinomialPP{3, point}, 1, 500)) ASSERT_EQ(total_points(e), 3u);
  const auto pp = sample(gen::PoissonPP{2.5, point}, 2, 100'000);
  double mean = 0.0;
  for (const auto& e : pp) mean += static_cast<double>(total_points(e));
  mean /= 1e5;
  EXPECT_NEAR(mean, 2.5, 4.0 * std::sqrt(2.5 / 1e5));
  const auto empty = sample(gen::PoissonPP{0.0, point}, 3, 10);
  for (const auto& e : empty) EXPECT_EQ(total_points(e), 0u);
}

TEST(ShotNoise, Examples) {
  const gen::Kernel tri{gen::Kernel::Shape::Triangle, 0.25};
  const auto one = shot_noise_path(PointConfig({{{0.5, 2.0}, 1}}), tri, 0.0, 1.0, 5);
  EXPECT_EQ(values(one), (std::vector<double>{0.0, 0.0, 2.0, 0.0, 0.0}));
  EXPECT_EQ(*std::max_element(one.values().begin(), one.values().end()), 2.0);

  const auto none = shot_noise_path(PointConfig(), tri, 0.0, 1.0, 9);
  EXPECT_EQ(values(none), std::vector<double>(9, 0.0));

  const gen::Kernel wide{gen::Kernel::Shape::Triangle, 0.5};
  const auto a = shot_noise_path(PointConfig({{{0.25, 1.0}, 1}}), wide, 0.0, 1.0, 5);
  const auto b = shot_noise_path(PointConfig({{{0.5, 3.0}, 2}}), wide, 0.0, 1.0, 5);
  const auto ab = shot_noise_path(PointConfig({{{0.25, 1.0}, 1}, {{0.5, 3.0}, 2}}), wide, 0.0, 1.0, 5);
  for (std::size_t j = 0; j < 5; ++j) EXPECT_DOUBLE_EQ(ab.values()[j], a.values()[j] + b.values()[j]);
  EXPECT_DOUBLE_EQ(b.values()[2], 6.0);
}

TEST(Covariates, LlnAverageConcentrates) {
  const auto pairs = sample_pair_with_covariate(gen::Pareto{1.0}, eta::LlnAverage{2.0, 1.0}, 13, 200'000);
  double sum = 0.0;
  std::size_t m = 0;
  for (const auto& [x, e] : pairs) {
    ASSERT_GE(x, 1.0);
    ASSERT_GE(e, 0.0);
    if (x > 1000.0) {
      sum += e;
      ++m;
    }
  }
  ASSERT_GT(m, 100u);
  // eta_x has mean 2 floor(x)/x and sd 2 sqrt(floor x)/x < 0.07 here.
  EXPECT_NEAR(sum / static_cast<double>(m), 2.0, 0.02);
}

TEST(Mda, FrechetConverges) {
  const std::vector<double> probes{0.5, 1.0, 2.0};
  for (std::size_t reps : {1000u, 100'000u}) {
    const auto t = mda_check(gen::Pareto{1.0}, MdaSpec::frechet(1.0), {1000}, reps, 3, probes);
    ASSERT_EQ(t.rows.size(), 3u);
    double max_se = 0.0;
    for (const auto& r : t.rows) {
      EXPECT_DOUBLE_EQ(r.a_n, 1000.0);
      EXPECT_NEAR(r.target, std::exp(-1.0 / r.probe), 1e-15);
      EXPECT_LT(std::abs(r.z), 4.0);
      max_se = std::max(max_se, r.std_error);
    }
    EXPECT_LT(t.sup_deviation[0].second, 4.0 * max_se) << reps;
  }
}

TEST(Mda, TransformMustMatchFamily) {
  auto spec = MdaSpec::gumbel(1.0);
  spec.transform = ScalingSpec::linear();
  try {
    (void)mda_check(gen::LogPareto{1.0}, spec, {100}, 10, 1, {0.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IncompatibleVariant);
  }
}

TEST(Void, Examples) {
  const auto rows = void_probability_check(gen::Pareto{1.0}, {radial(1.0), radial(2.0), radial(1e6)}, {1000},
                                           Norming::closed_form(), 50'000, 17);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_NEAR(rows[0].target, std::exp(-1.0), 1e-15);
  EXPECT_NEAR(rows[1].target, std::exp(-0.5), 1e-15);
  for (const auto& r : rows) EXPECT_LT(std::abs(r.z), 4.0) << r.set;
  EXPECT_GT(rows[2].frequency, 0.9999);
}

TEST(Poisson, SingleDrawAndDisjointSets) {
  const auto table = probe_set_counts(gen::Pareto{1.0}, {radial(0.5)}, 1, Norming::closed_form(), 10'000, 19);
  for (auto c : table.counts) ASSERT_LE(c, 1u);

  const auto rep = poisson_limit_counts(gen::Pareto{1.0}, {radial(1.0, 2.0), radial(2.0)}, 1000,
                                        Norming::closed_form(), 20'000, 23);
  ASSERT_EQ(rep.laws.size(), 2u);
  EXPECT_NEAR(rep.laws[0].target_mean, 0.5, 1e-15);
  for (const auto& law : rep.laws) {
    EXPECT_LT(law.total_variation, 0.02) << law.set;
    EXPECT_NEAR(law.mean, law.target_mean, 0.03);
  }
  ASSERT_EQ(rep.covariances.size(), 1u);
  EXPECT_LT(std::abs(rep.covariances[0].covariance), 4.0 * rep.covariances[0].std_error);
  EXPECT_NEAR(poisson_pmf(1.0, 0), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(poisson_pmf(2.0, 3), 8.0 / 6.0 * std::exp(-2.0), 1e-15);
}

TEST(Breiman, DegenerateFactor) {
  BreimanOptions opt;
  opt.n = 1'000'000;
  opt.w_samples = 10'000;
  opt.moment_samples = 2000;
  const auto one = make_generator(gen::Uniform{1.0, std::nextafter(1.0, 2.0)});
  const auto rep = breiman_verify(gen::Pareto{1.0}, eta::Independent{one}, opt, 29);
  for (const auto& r : rep.rows) {
    EXPECT_NEAR(r.target, 1.0, 1e-15);
    EXPECT_LT(std::abs(r.z), 4.0);
  }
  EXPECT_TRUE(rep.moment_ok);
  EXPECT_DOUBLE_EQ(rep.positive_fraction, 1.0);
}

TEST(BreimanProperty, ScalingTheFactor) {
  // W -> cW multiplies E W^alpha by c^alpha; with shared streams the tail
  // estimate at ct equals c^alpha times the one at t.
  BreimanOptions opt;
  opt.n = 200'000;
  opt.w_samples = 20'000;
  opt.moment_samples = 1000;
  opt.t_ladder = {10.0, 20.0};
  const auto w = make_generator(gen::Uniform{1.0, 2.0});
  for (double alpha : {0.5, 1.0, 2.0}) {
    for (double c : {0.5, 2.0, 3.0}) {
      const auto base = breiman_verify(gen::Pareto{alpha}, eta::Independent{w}, opt, 37);
      auto scaled_opt = opt;
      for (auto& t : scaled_opt.t_ladder) t *= c;
      const auto scaled =
          breiman_verify(gen::Pareto{alpha}, eta::Independent{make_generator(gen::ScaledBy{c, w})}, scaled_opt, 37);
      const double ca = std::pow(c, alpha);
      for (std::size_t i = 0; i < base.rows.size(); ++i) {
        ASSERT_NEAR(scaled.rows[i].target, ca * base.rows[i].target, 1e-12 * ca * base.rows[i].target);
        ASSERT_NEAR(scaled.rows[i].estimate, ca * base.rows[i].estimate, 1e-12 * ca * base.rows[i].estimate);
      }
    }
  }
}

TEST(Breiman, LlnFamilyHasUnitConstant) {
  BreimanOptions opt;
  opt.n = 2'000'000;
  opt.w_samples = 10'000;
  opt.moment_samples = 5000;
  const auto rep = breiman_verify(gen::Pareto{1.0}, eta::LlnAverage{1.0, 1.0}, opt, 41);
  for (const auto& r : rep.rows) {
    EXPECT_NEAR(r.target, 1.0, 1e-12);
    EXPECT_LT(std::abs(r.z), 4.0) << r.t;
  }
  EXPECT_TRUE(rep.moment_ok);
}

TEST(Janossy, SinglePointProcess) {
  const auto point = make_generator(gen::ParetoIID{1.0, 2});
  JanossyOptions opt;
  opt.t_ladder = {10.0, 100.0};
  opt.g = [](double t) { return t; };
  opt.n = 100'000;
  const std::vector<JanossyProbe> probes{
      {"max > 2", [](std::span<const double> x) { return std::max(x[0], x[1]) > 2.0 ? 1.0 : 0.0; }, 1.0},
      {"x0 > 2", [](std::span<const double> x) { return x[0] > 2.0 ? 1.0 : 0.0; }, 0.5},
  };
  const auto one = janossy_rv_check(gen::BinomialPP{1, point}, probes, opt, 43);
  for (const auto& r : one.two_point) EXPECT_EQ(r.value, 0.0);
  EXPECT_TRUE(one.converges);
  EXPECT_TRUE(one.regularly_varying);

  // With three points, g(t) E[f; exactly one point in T_t B] is
  // 3 t P{x in T_t A} (1 - P{max > t})^2, P{max > t} = 2/t - 1/t^2.
  const auto three = janossy_rv_check(gen::BinomialPP{3, point}, probes, opt, 47);
  ASSERT_EQ(three.rows.size(), 4u);
  for (const auto& r : three.rows) {
    const double t = r.t;
    const double miss = 1.0 - (2.0 / t - 1.0 / (t * t));
    const double p = r.probe == "max > 2" ? 1.0 / t - 1.0 / (4.0 * t * t) : 1.0 / (2.0 * t);
    EXPECT_NEAR(r.estimate, 3.0 * t * p * miss * miss, 4.0 * r.std_error) << r.probe << " t " << t;
  }
  EXPECT_TRUE(three.two_point_decays);
}

TEST(SetPipeline, HullsOfParetoPoints) {
  const auto sets = sample(gen::ConvexHull{3, make_generator(gen::ParetoIID{1.0, 2})}, 53, 20'000);
  const auto rep = set_functional_pipeline(sets, {SetFunctional::SetSup, SetFunctional::Steiner,
                                                  SetFunctional::MeanWidth});
  EXPECT_EQ(rep.polygons, 20'000u);
  EXPECT_EQ(rep.steiner_outside, 0u);
  EXPECT_EQ(rep.quadrature_outside, 0u);
  EXPECT_EQ(rep.homogeneity_failures, 0u);
  ASSERT_EQ(rep.functionals.size(), 3u);
  for (const auto& f : rep.functionals) EXPECT_NEAR(f.hill.alpha_hat, 1.0, 4.0 * f.hill.std_error) << f.name;
}

TEST(SetPipeline, SteinerPointTail) {
  // s(K) is about x/2 for the far vertex x, shifted by O(1) from the others,
  // so P{|s(K)| > t} / P{|K| > 2t} -> 1 with an O(1/t) bias.
  const auto sets = sample(gen::ConvexHull{3, make_generator(gen::ParetoIID{1.0, 2})}, 59, 200'000);
  const auto rows = steiner_tail_check(sets, {20.0, 100.0, 500.0});
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_GT(rows[0].z, 4.0);
  EXPECT_LT(rows[1].steiner / rows[1].hull - 1.0, rows[0].steiner / rows[0].hull - 1.0);
  EXPECT_LT(std::abs(rows[2].z), 4.0);
}
