#pragma once

#include <optional>
#include <vector>

#include "gendensity/differentiation.hpp"

namespace gendensity {

/// sigma_i counts as nonzero when sigma_i >= relative_threshold * sigma_1.
/// `fixed_rank` replaces the threshold rule for sensitivity studies.
struct RankPolicy {
  double relative_threshold = 1e-6;
  std::optional<Eigen::Index> fixed_rank;

  void validate() const;
};

struct SpectrumResult {
  Vector singular_values;  // non-increasing, length min(m, n)
  Matrix left_vectors;     // n x min(m, n), tangent basis of the output
  Matrix right_vectors;    // m x min(m, n), tangent basis of the latent space
  Eigen::Index rank = 0;
  double threshold_used = 0.0;
};

/// Thin SVD of J with rank chosen by `policy`. Throws NumericalError for a
/// non-finite matrix and InputError when a fixed rank exceeds min(m, n).
SpectrumResult svd_spectrum(const Matrix& jac, const RankPolicy& policy = {});
SpectrumResult svd_spectrum(const JacobianMatrix& jac, const RankPolicy& policy = {});

/// Product of the first `rank` singular values. Throws DegeneratePointError
/// when rank is 0.
double volume_factor(const SpectrumResult& spectrum);

/// Sum of log sigma_i over the first `rank` singular values; the form used by
/// every density computation. Throws DegeneratePointError when rank is 0 or a
/// retained singular value is exactly zero.
double log_volume_factor(const SpectrumResult& spectrum);

/// First `rank` right singular vectors, largest sigma first.
std::vector<Vector> nondegenerate_directions(const SpectrumResult& spectrum);

}  // namespace gendensity
