#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gendensity/errors.hpp"
#include "gendensity/scores.hpp"
#include "test_util.hpp"

using namespace gendensity;
using testutil::vec;

namespace {

DensityProfile make_profile(std::vector<double> s, std::vector<double> lp, std::size_t origin = 0) {
  DensityProfile p;
  p.times = s;
  p.arclengths = std::move(s);
  p.log_densities = std::move(lp);
  p.flags.assign(p.times.size(), SampleFlag::ok);
  p.ranks.assign(p.times.size(), 1);
  p.origin_index = origin;
  return p;
}

AnchorSet anchors_at(const Generator& g, std::vector<Vector> latents) {
  return AnchorSet::from_latents(g, std::move(latents));
}

std::vector<Vector> square_anchor_latents() {
  const auto layout = square_layout();
  std::vector<Vector> out;
  for (Eigen::Index i = 0; i < layout.count(); ++i) out.emplace_back(layout.anchors.row(i).transpose());
  return out;
}

}  // namespace

TEST(Scores, NearestNeighbourExamples) {
  const auto g = Generator::identity(2);
  const auto pairs = nearest_neighbor_pairs(anchors_at(g, {vec({0, 0}), vec({1, 0}), vec({5, 0})}));
  using P = std::pair<std::size_t, std::size_t>;
  EXPECT_EQ(pairs, (std::vector<P>{{0, 1}, {1, 0}, {2, 1}}));
  const auto twins = nearest_neighbor_pairs(anchors_at(g, {vec({2, 2}), vec({2, 2})}));
  EXPECT_EQ(twins, (std::vector<P>{{0, 1}, {1, 0}}));
  const auto tie = nearest_neighbor_pairs(anchors_at(g, {vec({0, 0}), vec({-1, 0}), vec({1, 0})}));
  EXPECT_EQ(tie[0].second, 1u);
  EXPECT_THROW(nearest_neighbor_pairs(anchors_at(g, {vec({0, 0})})), InputError);
}

TEST(Scores, NearestNeighbourMetricChoice) {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 10;
  a(1, 1) = 1;
  const auto g = Generator::linear(a);
  // Latent distances favour anchor 1, output distances favour anchor 2.
  const auto set = anchors_at(g, {vec({0, 0}), vec({0.5, 0}), vec({0, 2})});
  EXPECT_EQ(nearest_neighbor_pairs(set, NeighborMetric::latent)[0].second, 1u);
  EXPECT_EQ(nearest_neighbor_pairs(set, NeighborMetric::output)[0].second, 2u);
}

TEST(Scores, NearestNeighbourMatchesBruteForceUnderPermutation) {
  std::mt19937_64 rng(17);
  const auto g = Generator::smooth_interpolator(square_layout());
  std::vector<Vector> latents;
  for (int i = 0; i < 100; ++i) latents.push_back(testutil::random_vector(rng, 3));
  const auto set = anchors_at(g, latents);
  const auto pairs = nearest_neighbor_pairs(set);
  for (std::size_t i = 0; i < set.size(); ++i) {
    double best = INFINITY;
    std::size_t arg = 0;
    for (std::size_t j = 0; j < set.size(); ++j) {
      if (j == i) continue;
      const double d = (set.outputs[i] - set.outputs[j]).norm();
      if (d < best) {
        best = d;
        arg = j;
      }
    }
    EXPECT_EQ(pairs[i].second, arg);
  }
  std::vector<std::size_t> order(latents.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Vector> shuffled;
  for (auto i : order) shuffled.push_back(latents[i]);
  const auto permuted = nearest_neighbor_pairs(anchors_at(g, shuffled));
  for (std::size_t k = 0; k < order.size(); ++k) {
    EXPECT_EQ(order[permuted[k].second], pairs[order[k]].second);
  }
}

TEST(Scores, DipArithmetic) {
  EXPECT_EQ(dip_score(make_profile({0, 1, 2}, {3, 3, 3})), 0.0);
  EXPECT_EQ(dip_score(make_profile({0, 1, 2}, {0, -2, 0})), 4.0);
  auto p = make_profile({0, 1, 2}, {0, -2, 0});
  p.flags[1] = SampleFlag::degenerate;
  EXPECT_THROW(dip_score(p), ScoreUndefinedError);
}

TEST(Scores, DipUsesArclengthMidpoint) {
  // t-midpoint is index 2, arclength midpoint is index 3.
  const auto p = make_profile({0, 0.1, 0.2, 5, 10}, {0, 1, 2, -1, 0});
  EXPECT_EQ(dip_score(p), 2.0);
}

TEST(Scores, ScoresIgnoreLogOffsets) {
  const auto p = make_profile({-2, -1, 0, 1, 2}, {-3, -1.2, 0, -0.7, -2.5}, 2);
  auto shifted = p;
  for (auto& v : shifted.log_densities) v += 123.25;
  EXPECT_NEAR(dip_score(p), dip_score(shifted), 1e-12);
  for (double r : {0.5, 1.0, 1.5}) EXPECT_NEAR(*decay_at_radius(p, r), *decay_at_radius(shifted, r), 1e-12);
}

TEST(Scores, PairMemorizerDipSeparation) {
  const auto prior = LatentPrior::standard_normal(2);
  const auto mem = path_density(Generator::memorizer(pair_layout()), vec({-1, 0}), vec({1, 0}), prior, {});
  const auto smooth = path_density(Generator::smooth_interpolator(pair_layout()), vec({-1, 0}), vec({1, 0}), prior, {});
  // oracle: memorizer 40.888, smooth -1
  EXPECT_NEAR(dip_score(mem), 40.887883478483296, 2e-2);
  EXPECT_NEAR(dip_score(smooth), -1.0, 1e-9);
  EXPECT_GE(dip_score(mem) - dip_score(smooth), 5.0);
}

TEST(Scores, InterpolationInArclength) {
  const auto p = make_profile({-1, 0, 2}, {1, 0, 4}, 1);
  EXPECT_EQ(*log_density_at_arclength(p, 1.0), 2.0);
  EXPECT_EQ(*log_density_at_arclength(p, -0.5), 0.5);
  EXPECT_EQ(*log_density_at_arclength(p, 2.0), 4.0);
  EXPECT_FALSE(log_density_at_arclength(p, 2.5));
  EXPECT_FALSE(log_density_at_arclength(p, -1.5));
  auto broken = p;
  broken.flags[2] = SampleFlag::overflow;
  EXPECT_FALSE(log_density_at_arclength(broken, 1.0));
  EXPECT_TRUE(log_density_at_arclength(broken, -0.5));
}

// Linear interpolation of c - s^2/2 between grid points a < r < b undershoots
// by (r - a)(b - r)/2 on each side.
TEST(Scores, IdentityDecayOnDefaultGridMatchesInterpolationError) {
  const auto prior = LatentPrior::standard_normal(2);
  const auto d = decay_profile(Generator::identity(2), Vector::Zero(2), 0, prior, {});
  const double step = 3.0 / 51.0;
  for (double r : {0.5, 1.0}) {
    const double a = std::floor(r / step) * step;
    const double b = a + step;
    const double predicted = -r - 2.0 * ((r - a) * (b - r) / 2.0) / r;
    EXPECT_NEAR(*decay_at_radius(d.profile, r), predicted, 1e-12) << r;
  }
}

TEST(Scores, IdentityDecayIsMinusRadius) {
  const auto prior = LatentPrior::standard_normal(2);
  const auto d = decay_profile(Generator::identity(2), Vector::Zero(2), 0, prior, {},
                               DecayOptions{3.0, 101, false});
  EXPECT_NEAR(*decay_at_radius(d.profile, 0.5), -0.5, 1e-3);
  EXPECT_NEAR(*decay_at_radius(d.profile, 1.0), -1.0, 1e-3);
  const auto score = decay_score({d.profile}, {0.5, 1.0});
  EXPECT_NEAR(score.mean, -0.75, 1e-3);
  EXPECT_EQ(score.n_terms, 2u);
}

TEST(Scores, ConstantProfileHasZeroDecay) {
  const auto p = make_profile({-2, -1, 0, 1, 2}, {5, 5, 5, 5, 5}, 2);
  const auto score = decay_score({p}, {0.5, 1.0});
  EXPECT_EQ(score.mean, 0.0);
}

TEST(Scores, ShortProfileTermsAreExcluded) {
  const auto p = make_profile({-0.7, 0, 0.7}, {0, 0, 0}, 1);
  const auto score = decay_score({p}, {0.5, 1.0});
  EXPECT_EQ(score.n_terms, 1u);
  EXPECT_EQ(score.n_excluded, 1u);
  EXPECT_TRUE(score.per_point[0][0]);
  EXPECT_FALSE(score.per_point[0][1]);
  EXPECT_TRUE(std::isnan(decay_score({p}, {2.0}).mean));
  EXPECT_THROW(decay_at_radius(p, 0.0), InputError);
}

TEST(Scores, MemorizerVersusSmoothOnSquare) {
  const auto prior = LatentPrior::standard_normal(3);
  const auto latents = square_anchor_latents();
  const auto mem = Generator::memorizer(square_layout());
  const auto smooth = Generator::smooth_interpolator(square_layout());
  const auto rm = score_run(mem, AnchorSet::from_latents(mem, latents), prior);
  const auto rs = score_run(smooth, AnchorSet::from_latents(smooth, latents), prior);
  EXPECT_GT(rm.mean_dip, 0.0);
  EXPECT_LT(rm.mean_decay, 0.0);
  EXPECT_LE(std::abs(rs.mean_dip), 0.1 * std::abs(rm.mean_dip));
  EXPECT_LE(std::abs(rs.mean_decay), 0.1 * std::abs(rm.mean_decay));
  EXPECT_EQ(rm.n_paths, 4u);
  EXPECT_EQ(rm.n_excluded, 0u);
  EXPECT_EQ(rm.radii_used, (std::vector<double>{0.5, 1.0}));
  ASSERT_EQ(rm.points.size(), 4u);
  for (const auto& p : rm.points) {
    EXPECT_EQ(p.direction_index, 0);
    EXPECT_GT(p.sigma, 0.0);
  }
  const double mean = std::accumulate(rm.per_path_dips.begin(), rm.per_path_dips.end(), 0.0) / 4.0;
  EXPECT_NEAR(rm.mean_dip, mean, 1e-12);
}

TEST(Scores, ConstantDensityPair) {
  const auto g = Generator::identity(2);
  const auto prior = LatentPrior::uniform_box(2, -5, 5);
  const auto report = score_run(g, anchors_at(g, {vec({-0.5, 0}), vec({0.5, 0})}), prior);
  EXPECT_EQ(report.mean_dip, 0.0);
  EXPECT_NEAR(report.mean_decay, 0.0, 1e-12);
}

TEST(Scores, PermutationInvariance) {
  std::mt19937_64 rng(31);
  const auto g = Generator::memorizer(square_layout());
  const auto prior = LatentPrior::standard_normal(3);
  std::vector<Vector> latents = square_anchor_latents();
  for (int i = 0; i < 4; ++i) latents.push_back(testutil::random_vector(rng, 3));
  ScoreConfig config;
  config.path_samples = 41;
  config.decay.samples_per_side = 25;
  const auto base = score_run(g, anchors_at(g, latents), prior, config);
  std::reverse(latents.begin(), latents.end());
  std::swap(latents[1], latents[5]);
  const auto permuted = score_run(g, anchors_at(g, latents), prior, config);
  EXPECT_NEAR(base.mean_dip, permuted.mean_dip, 1e-9 * std::abs(base.mean_dip));
  EXPECT_NEAR(base.mean_decay, permuted.mean_decay, 1e-9 * std::abs(base.mean_decay));
}

TEST(Scores, SingleAnchorHasNoDip) {
  const auto g = Generator::identity(2);
  const auto report = score_run(g, anchors_at(g, {vec({0, 0})}), LatentPrior::standard_normal(2));
  EXPECT_TRUE(std::isnan(report.mean_dip));
  EXPECT_NEAR(report.mean_decay, -0.75, 3e-3);
}

TEST(Scores, AllPathsExcludedIsAnError) {
  NetworkSpec spec;
  spec.layers.push_back({Matrix::Constant(1, 1, 1.0), Vector::Zero(1), Activation::relu});
  const auto g = Generator::network(spec);
  const auto set = anchors_at(g, {vec({-1}), vec({-2})});
  EXPECT_THROW(score_run(g, set, LatentPrior::standard_normal(1)), ScoreUndefinedError);
  EXPECT_THROW(score_run(g, AnchorSet{}, LatentPrior::standard_normal(1)), InputError);
}

TEST(Scores, AnchorSetBookkeeping) {
  const auto g = Generator::circle_embed();
  auto set = AnchorSet::from_latents(g, {vec({0}), vec({1})}, {"x", "y"});
  EXPECT_EQ(set.max_output_drift(g), 0.0);
  set.outputs[1][0] += 0.5;
  EXPECT_DOUBLE_EQ(set.max_output_drift(g), 0.5);
  EXPECT_THROW(AnchorSet::from_latents(g, {vec({0})}, {"x", "y"}), InputError);
}

TEST(Scores, ConfigValidation) {
  ScoreConfig config;
  config.radii = {};
  EXPECT_THROW(config.validate(), InputError);
  config.radii = {-1};
  EXPECT_THROW(config.validate(), InputError);
  config = {};
  config.path_samples = 2;
  EXPECT_THROW(config.validate(), InputError);
}
