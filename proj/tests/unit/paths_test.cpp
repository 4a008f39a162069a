#include <gtest/gtest.h>

#include <cmath>
#include <cstring>

#include "gendensity/errors.hpp"
#include "gendensity/paths.hpp"
#include "test_util.hpp"

using namespace gendensity;
using testutil::vec;

namespace {

double total_span(const DensityProfile& p) { return p.arclengths.back() - p.arclengths.front(); }

}  // namespace

TEST(Paths, SegmentTimesAndRayTimes) {
  const auto seg = LatentPath::segment(vec({0}), vec({1}), 5);
  EXPECT_EQ(seg.times(), (std::vector<double>{0, 0.25, 0.5, 0.75, 1}));
  EXPECT_EQ(seg.origin_index(), 0u);
  const auto ray = LatentPath::ray(vec({0}), vec({1}), 3.0, 4);
  ASSERT_EQ(ray.times().size(), 9u);
  EXPECT_EQ(ray.origin_index(), 4u);
  EXPECT_EQ(ray.times()[4], 0.0);
  for (std::size_t k = 0; k < 9; ++k) EXPECT_EQ(ray.times()[k], -ray.times()[8 - k]);
  for (std::size_t k = 1; k < 9; ++k) EXPECT_LT(ray.times()[k - 1], ray.times()[k]);
  EXPECT_THROW(LatentPath::ray(vec({0}), vec({1}), 0.0, 4), InputError);
  EXPECT_THROW(LatentPath::segment(vec({0}), vec({1, 2}), 5), InputError);
}

TEST(Paths, IdentitySegmentUniformPrior) {
  const auto p = path_density(Generator::identity(2), vec({0, 0}), vec({1, 0}),
                              LatentPrior::uniform_box(2, -2, 2), {}, 11);
  ASSERT_EQ(p.size(), 11u);
  for (std::size_t k = 0; k < 11; ++k) {
    EXPECT_NEAR(p.arclengths[k], k / 10.0, 1e-15);
    EXPECT_NEAR(p.log_densities[k], -2 * std::log(4.0), 1e-15);
    EXPECT_EQ(p.flags[k], SampleFlag::ok);
    EXPECT_EQ(p.ranks[k], 2);
  }
}

TEST(Paths, ConstantStretchDoublesArclength) {
  const auto g = Generator::linear(Matrix::Constant(1, 1, 2.0));
  const auto prior = LatentPrior::standard_normal(1);
  const auto p = path_density(g, vec({0}), vec({1}), prior, {}, 11);
  for (std::size_t k = 0; k < 11; ++k) {
    EXPECT_NEAR(p.arclengths[k], 2.0 * k / 10.0, 1e-12);
    EXPECT_NEAR(p.log_densities[k], prior.log_density(vec({k / 10.0})) - std::log(2.0), 1e-10);
  }
}

// Independent numpy/mpmath evaluation of the same samples: endpoints 16.3035,
// middle-third minimum -4.1405, margin 20.44.
TEST(Paths, PairMemorizerValley) {
  const auto g = Generator::memorizer(pair_layout());
  const auto p = path_density(g, vec({-1, 0}), vec({1, 0}), LatentPrior::standard_normal(2), {}, 101);
  double middle_min = INFINITY;
  for (std::size_t k = 101 / 3; k < 101 - 101 / 3; ++k) {
    ASSERT_TRUE(p.usable(k));
    middle_min = std::min(middle_min, p.log_densities[k]);
  }
  EXPECT_NEAR(p.log_densities.front(), 16.30348180311132, 1e-2);
  EXPECT_NEAR(p.log_densities.back(), 16.30348180311132, 1e-2);
  EXPECT_NEAR(middle_min, -4.140459936130327, 1e-2);
  EXPECT_GE(std::min(p.log_densities.front(), p.log_densities.back()) - middle_min, 5.0);
}

TEST(Paths, IdentityRayIsGaussianShape) {
  const auto prior = LatentPrior::standard_normal(3);
  const auto d = decay_profile(Generator::identity(3), Vector::Zero(3), 0, prior, {});
  const auto& p = d.profile;
  ASSERT_EQ(p.size(), 103u);
  EXPECT_EQ(p.arclengths[p.origin_index], 0.0);
  const double c = p.log_densities[p.origin_index];
  for (std::size_t k = 0; k < p.size(); ++k) {
    EXPECT_NEAR(p.log_densities[k], c - 0.5 * p.arclengths[k] * p.arclengths[k], 1e-12);
    EXPECT_NEAR(std::abs(p.arclengths[k]), std::abs(p.times[k]), 1e-12);
    if (p.times[k] < 0) EXPECT_LT(p.arclengths[k], 0.0);
  }
  EXPECT_EQ(d.rank_at_origin, 3);
  EXPECT_DOUBLE_EQ(d.sigma, 1.0);
}

TEST(Paths, StretchedRayUniformPrior) {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 3;
  a(1, 1) = 1;
  const auto d = decay_profile(Generator::linear(a), Vector::Zero(2), 0,
                               LatentPrior::uniform_box(2, -5, 5), {}, DecayOptions{1.0, 10, false});
  EXPECT_NEAR(d.sigma, 3.0, 1e-9);
  const auto& p = d.profile;
  for (std::size_t k = 0; k < p.size(); ++k) {
    EXPECT_NEAR(p.log_densities[k], -2 * std::log(10.0) - std::log(3.0), 1e-9);
    EXPECT_NEAR(p.arclengths[k], 3.0 * p.times[k], 1e-9);
  }
}

// At t_max = 0.5 the ray stays inside the anchor's capture cell.
TEST(Paths, MemorizerRayCollapsesRelativeToSmooth) {
  const auto prior = LatentPrior::standard_normal(3);
  const DecayOptions options{0.5, 51, false};
  const Vector center = vec({1, 1, 0});
  const auto mem = decay_profile(Generator::memorizer(square_layout()), center, 0, prior, {}, options);
  const auto smooth = decay_profile(Generator::smooth_interpolator(square_layout()), center, 0, prior, {}, options);
  const double s_mem = std::abs(mem.profile.arclengths.back());
  const double s_smooth = std::abs(smooth.profile.arclengths.back());
  EXPECT_NEAR(s_smooth, 0.4, 1e-6);
  EXPECT_LT(s_mem, 1e-5);
  EXPECT_LE(s_mem, 0.1 * s_smooth);
}

TEST(Paths, DegenerateDirectionNeedsOverride) {
  const auto g = Generator::memorizer(square_layout());
  const auto prior = LatentPrior::standard_normal(3);
  const Vector center = vec({1, 1, 0});
  EXPECT_THROW(decay_profile(g, center, 2, prior, {}), DegenerateDirectionError);
  DecayOptions options;
  options.allow_degenerate = true;
  const auto degenerate = decay_profile(g, center, 2, prior, {}, options);
  const auto top = decay_profile(g, center, 0, prior, {}, options);
  EXPECT_LE(total_span(degenerate.profile), total_span(top.profile) / 100.0);
  EXPECT_THROW(decay_profile(g, center, 3, prior, {}, options), InputError);
}

TEST(Paths, NullSpaceDirectionBeyondOutputDimension) {
  Matrix a(1, 2);
  a << 1, 0;
  DecayOptions options;
  options.allow_degenerate = true;
  const auto d = decay_profile(Generator::linear(a), Vector::Zero(2), 1, LatentPrior::standard_normal(2), {}, options);
  EXPECT_EQ(d.sigma, 0.0);
  EXPECT_NEAR(std::abs(d.direction[1]), 1.0, 1e-12);
  EXPECT_LE(std::abs(total_span(d.profile)), 1e-12);
}

TEST(Paths, ArclengthReparametrizeExamples) {
  const auto p = arclength_reparametrize({0, 1}, {vec({0, 0}), vec({3, 4})}, {0, 0},
                                         {SampleFlag::ok, SampleFlag::ok});
  EXPECT_EQ(p.arclengths, (std::vector<double>{0, 5}));

  const auto flat = arclength_reparametrize({0, 0.5, 1}, {vec({1, 1}), vec({1, 1}), vec({1, 1})},
                                            {0, 0, 0}, std::vector<SampleFlag>(3, SampleFlag::ok));
  EXPECT_EQ(flat.arclengths, (std::vector<double>{0, 0, 0}));

  const auto g = Generator::circle_embed();
  const auto path = LatentPath::segment(vec({0}), vec({M_PI}), 1001);
  std::vector<Vector> outputs;
  for (std::size_t k = 0; k < 1001; ++k) outputs.push_back(g.evaluate(path.sample(k)));
  const auto circle = arclength_reparametrize(path.times(), outputs, std::vector<double>(1001, 0.0),
                                              std::vector<SampleFlag>(1001, SampleFlag::ok));
  EXPECT_NEAR(circle.arclengths.back(), M_PI, 1e-4);
  EXPECT_THROW(arclength_reparametrize({0}, {vec({0})}, {0}, {SampleFlag::ok}), InputError);
}

TEST(Paths, RefinementConvergesQuadratically) {
  const auto g = Generator::circle_embed();
  const auto prior = LatentPrior::standard_normal(1);
  double previous_error = 0.0;
  for (std::size_t n : {11u, 21u, 41u, 81u}) {
    const auto p = path_density(g, vec({0}), vec({M_PI}), prior, {}, n);
    const double error = M_PI - p.arclengths.back();
    EXPECT_GT(error, 0.0);
    if (previous_error > 0.0) EXPECT_GE(previous_error / error, 3.5) << n;
    previous_error = error;
  }
}

TEST(Paths, ReversalSymmetry) {
  const auto prior = LatentPrior::standard_normal(3);
  const std::vector<Generator> generators{Generator::memorizer(square_layout()),
                                          Generator::smooth_interpolator(square_layout())};
  std::mt19937_64 rng(21);
  for (const auto& g : generators) {
    for (int trial = 0; trial < 5; ++trial) {
      const Vector z1 = testutil::random_vector(rng, 3);
      const Vector z2 = testutil::random_vector(rng, 3);
      const auto fwd = path_density(g, z1, z2, prior, {}, 51);
      const auto rev = path_density(g, z2, z1, prior, {}, 51);
      const double total = fwd.arclengths.back();
      for (std::size_t k = 0; k < 51; ++k) {
        const std::size_t r = 50 - k;
        EXPECT_EQ(fwd.flags[k], rev.flags[r]);
        if (fwd.usable(k)) EXPECT_NEAR(fwd.log_densities[k], rev.log_densities[r], 1e-12);
        EXPECT_NEAR(fwd.arclengths[k], total - rev.arclengths[r], 1e-12);
      }
    }
  }
}

TEST(Paths, SignFlipMirrorsProfile) {
  const auto g = Generator::smooth_interpolator(square_layout());
  const auto prior = LatentPrior::standard_normal(3);
  const Vector z0 = vec({0.3, -0.2, 0.5});
  const auto d = decay_profile(g, z0, 0, prior, {});
  const auto flipped = profile_along(g, LatentPath::ray(z0, -d.direction, 3.0, 51), prior, {});
  const auto& p = d.profile;
  const std::size_t n = p.size();
  for (std::size_t k = 0; k < n; ++k) {
    EXPECT_NEAR(p.arclengths[k], -flipped.arclengths[n - 1 - k], 1e-12);
    EXPECT_NEAR(p.log_densities[k], flipped.log_densities[n - 1 - k], 1e-9);
  }
}

TEST(Paths, ResultIndependentOfThreadCount) {
  const auto g = Generator::memorizer(square_layout());
  const auto prior = LatentPrior::standard_normal(3);
  EvaluationSettings serial;
  serial.threads = 1;
  EvaluationSettings parallel;
  parallel.threads = 8;
  const auto a = path_density(g, vec({1, 1, 0}), vec({-1, 1, 0.2}), prior, serial, 101);
  const auto b = path_density(g, vec({1, 1, 0}), vec({-1, 1, 0.2}), prior, parallel, 101);
  EXPECT_EQ(a.arclengths, b.arclengths);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(std::memcmp(&a.log_densities[k], &b.log_densities[k], sizeof(double)), 0);
  }
}

TEST(Paths, DegenerateSamplesAreFlaggedNotDropped) {
  // Output constant for z1 <= 0, linear beyond: relu with a single unit.
  NetworkSpec spec;
  spec.layers.push_back({Matrix::Constant(1, 1, 1.0), Vector::Zero(1), Activation::relu});
  const auto g = Generator::network(spec);
  const auto p = path_density(g, vec({-1}), vec({1}), LatentPrior::standard_normal(1), {}, 21);
  ASSERT_EQ(p.size(), 21u);
  EXPECT_EQ(p.flags[0], SampleFlag::degenerate);
  EXPECT_TRUE(std::isnan(p.log_densities[0]));
  EXPECT_EQ(p.arclengths[5], 0.0);
  EXPECT_EQ(p.flags[20], SampleFlag::ok);
}

TEST(Paths, AllDegenerateIsEmptyProfile) {
  const auto g = Generator::linear(Matrix::Zero(2, 2));
  EXPECT_THROW(path_density(g, vec({0, 0}), vec({1, 1}), LatentPrior::standard_normal(2), {}, 11),
               EmptyProfileError);
  EXPECT_THROW(path_density(Generator::identity(2), vec({0, 0}), vec({1, 1}), LatentPrior::standard_normal(2), {}, 2),
               InputError);
  EXPECT_THROW(path_density(Generator::identity(2), vec({0}), vec({1, 1}), LatentPrior::standard_normal(2), {}, 11),
               InputError);
}

TEST(Paths, MidpointIsArclengthMidpoint) {
  DensityProfile p;
  p.times = {0, 0.25, 0.5, 0.75, 1};
  p.arclengths = {0, 0.1, 0.2, 0.3, 4.0};
  p.log_densities.assign(5, 0.0);
  p.flags.assign(5, SampleFlag::ok);
  EXPECT_EQ(arclength_midpoint_index(p), 3u);
  p.arclengths = {0, 1, 2, 3};
  p.times.resize(4);
  p.log_densities.resize(4);
  p.flags.resize(4);
  EXPECT_EQ(arclength_midpoint_index(p), 1u);
}
