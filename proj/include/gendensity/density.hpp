#pragma once

#include <limits>
#include <random>
#include <string>

#include "gendensity/spectrum.hpp"

namespace gendensity {

/// Evaluable latent density: a standard normal, or uniform on [lo, hi]^m.
class LatentPrior {
 public:
  enum class Kind { standard_normal, uniform_box };

  static LatentPrior standard_normal(Eigen::Index dim);
  static LatentPrior uniform_box(Eigen::Index dim, double lo, double hi);

  Kind kind() const { return kind_; }
  Eigen::Index dim() const { return dim_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

  /// Natural log of the prior density; -infinity outside a uniform box.
  double log_density(const Vector& z) const;

  Vector sample(std::mt19937_64& rng) const;

  /// "normal" or "uniform:<lo>:<hi>".
  std::string describe() const;

 private:
  LatentPrior(Kind kind, Eigen::Index dim, double lo, double hi)
      : kind_(kind), dim_(dim), lo_(lo), hi_(hi) {}

  Kind kind_;
  Eigen::Index dim_;
  double lo_;
  double hi_;
};

/// Same as prior.log_density(z); throws InputError on a length mismatch.
double prior_log_density(const LatentPrior& prior, const Vector& z);

/// log p~ = log_prior - log_volume_factor. p~ is a density on the rank-l
/// output manifold, not on R^n.
struct LogDensityValue {
  double log_p_tilde = 0.0;
  double log_prior = 0.0;
  double log_volume_factor = 0.0;
  Eigen::Index rank_used = 0;
};

/// ok: finite log density. degenerate: rank 0, so the density is undefined.
/// overflow: a non-finite log density or generator output.
enum class SampleFlag { ok, degenerate, overflow };

std::string to_string(SampleFlag flag);

/// Finite-difference and rank settings shared by every density computation.
/// `threads` bounds per-sample parallelism in profile and spectrum
/// computations (0 = hardware concurrency).
struct EvaluationSettings {
  FdConfig fd;
  RankPolicy rank;
  unsigned threads = 0;
};

/// Non-throwing evaluation used by profile code: the flag says whether
/// `value` is meaningful.
struct DensitySample {
  LogDensityValue value;
  SampleFlag flag = SampleFlag::ok;
  SpectrumResult spectrum;
};

DensitySample evaluate_density(const Generator& generator, const Vector& z,
                               const LatentPrior& prior, const EvaluationSettings& settings);

/// Composes jacobian -> svd_spectrum -> log_volume_factor. Throws
/// DegeneratePointError at rank-0 points.
LogDensityValue induced_log_density(const Generator& generator, const Vector& z,
                                    const LatentPrior& prior,
                                    const EvaluationSettings& settings = {});

}  // namespace gendensity
