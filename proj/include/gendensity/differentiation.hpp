#pragma once

#include "gendensity/generator.hpp"

namespace gendensity {

struct FdConfig {
  /// Central-difference step in latent units. Must lie in (0, 1).
  double epsilon = 1e-5;

  void validate() const;
};

struct JacobianMatrix {
  Matrix entries;  // output_dim x latent_dim
  Vector base_point;
  double epsilon_used = 0.0;
};

/// Column j is (f(z + eps e_j) - f(z - eps e_j)) / (2 eps). Uses exactly
/// 2 * latent_dim evaluations. Throws NumericalError naming the column when
/// the generator returns a non-finite value.
JacobianMatrix jacobian(const Generator& generator, const Vector& z, const FdConfig& cfg = {});

}  // namespace gendensity
