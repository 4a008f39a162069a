#pragma once

#include <cstddef>
#include <vector>

#include "gendensity/density.hpp"

namespace gendensity {

/// Straight latent line sampled at strictly increasing times.
///   segment: gamma(t) = (1 - t) z1 + t z2,  t in [0, 1]
///   ray:     gamma(t) = z0 + t v,           t in [-t_max, t_max], symmetric, includes 0
class LatentPath {
 public:
  enum class Kind { segment, ray };

  /// `samples` uniform times on [0, 1]; samples >= 2.
  static LatentPath segment(Vector z1, Vector z2, std::size_t samples);
  /// 2 * samples_per_side + 1 uniform times on [-t_max, t_max].
  static LatentPath ray(Vector z0, Vector direction, double t_max, std::size_t samples_per_side);

  Kind kind() const { return kind_; }
  const std::vector<double>& times() const { return times_; }
  Vector at(double t) const;
  /// Latent point of sample k. Segment weights are formed as exact integer
  /// ratios, so segment(z1, z2) and segment(z2, z1) visit bitwise-identical
  /// points in reverse order.
  Vector sample(std::size_t k) const;
  /// Index of the sample where arclength is anchored at zero.
  std::size_t origin_index() const { return origin_; }

 private:
  LatentPath(Kind kind, Vector base, Vector second, std::vector<double> times, std::size_t origin);

  Kind kind_;
  Vector base_;    // z1 or z0
  Vector second_;  // z2 or v
  std::vector<double> times_;
  std::size_t origin_ = 0;
};

/// Discrete curve (s_k, log p~_k) in output space. Samples flagged other than
/// ok are kept so plots show plateaus, but carry no usable log density.
struct DensityProfile {
  std::vector<double> times;
  std::vector<double> arclengths;
  std::vector<double> log_densities;
  std::vector<SampleFlag> flags;
  std::vector<Eigen::Index> ranks;
  std::size_t origin_index = 0;

  std::size_t size() const { return times.size(); }
  bool usable(std::size_t k) const { return flags[k] == SampleFlag::ok; }
};

/// Cumulative L2 chord lengths of the outputs, zero at `origin_index` and
/// negative before it. Requires at least two samples.
DensityProfile arclength_reparametrize(const std::vector<double>& times,
                                       const std::vector<Vector>& outputs,
                                       std::vector<double> log_densities,
                                       std::vector<SampleFlag> flags,
                                       std::size_t origin_index = 0);

/// Samples the path, maps it through f, and evaluates the induced log density
/// at every sample. Per-sample work runs concurrently; results are assembled
/// in time order. Throws EmptyProfileError when no sample is usable.
DensityProfile profile_along(const Generator& generator, const LatentPath& path,
                             const LatentPrior& prior, const EvaluationSettings& settings);

/// Density along the segment z1 -> z2, `samples` >= 3 uniform times.
DensityProfile path_density(const Generator& generator, const Vector& z1, const Vector& z2,
                            const LatentPrior& prior, const EvaluationSettings& settings,
                            std::size_t samples = 101);

struct DecayOptions {
  double t_max = 3.0;
  std::size_t samples_per_side = 51;
  /// Permit directions whose singular value falls below the rank threshold.
  bool allow_degenerate = false;
};

struct DecayResult {
  DensityProfile profile;
  Eigen::Index direction_index = 0;
  Vector direction;
  double sigma = 0.0;
  Eigen::Index rank_at_origin = 0;
};

/// Density along z0 + t v with v the `direction_index`-th right singular
/// vector of J_f(z0) (largest sigma first). Throws DegenerateDirectionError
/// when the index is not below the rank at z0, unless allow_degenerate is set.
DecayResult decay_profile(const Generator& generator, const Vector& z0,
                          Eigen::Index direction_index, const LatentPrior& prior,
                          const EvaluationSettings& settings, const DecayOptions& options = {});

/// Index of the sample whose arclength is closest to (s_first + s_last) / 2;
/// ties go to the smaller index.
std::size_t arclength_midpoint_index(const DensityProfile& profile);

}  // namespace gendensity
