#pragma once

#include <cstddef>
#include <vector>

#include "gendensity/density.hpp"

namespace gendensity {

struct SpectrumSummary {
  /// Index-wise mean of the K largest singular values over usable points.
  Vector mean_singular_values;
  /// One row per usable point, K columns.
  Matrix per_point_spectra;
  /// Count of leading mean values >= relative_threshold * mean sigma_1.
  /// Heuristic: a numeric stand-in for reading the decay curve by eye.
  Eigen::Index suggested_dimension = 0;
  double relative_threshold = 1e-6;
  std::size_t n_points = 0;
  std::size_t n_skipped = 0;
};

/// Jacobian spectra at every point, averaged index-wise. Points whose
/// Jacobian is non-finite are skipped and counted. Requires K <= min(m, n).
SpectrumSummary mean_spectrum(const Generator& generator, const std::vector<Vector>& points,
                              Eigen::Index top_k, const FdConfig& fd = {},
                              double relative_threshold = 1e-6, unsigned threads = 0);

/// Singular values of the mean-centred (count x m) matrix of latents.
Vector pointcloud_svd(const std::vector<Vector>& latents);

}  // namespace gendensity
