#include "gendensity/spectrum.hpp"

#include <cmath>
#include <sstream>

#include "gendensity/errors.hpp"

namespace gendensity {

void RankPolicy::validate() const {
  if (!(relative_threshold > 0.0 && relative_threshold < 1.0)) {
    std::ostringstream msg;
    msg << "relative singular-value threshold must lie in (0, 1), got " << relative_threshold;
    throw InputError(msg.str());
  }
  if (fixed_rank && *fixed_rank < 0) throw InputError("fixed rank must be non-negative");
}

SpectrumResult svd_spectrum(const Matrix& jac, const RankPolicy& policy) {
  policy.validate();
  if (!jac.allFinite()) throw NumericalError("Jacobian has non-finite entries");

  Eigen::JacobiSVD<Matrix> svd(jac, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericalError("SVD did not converge");

  SpectrumResult result;
  result.singular_values = svd.singularValues();
  result.left_vectors = svd.matrixU();
  result.right_vectors = svd.matrixV();
  result.threshold_used = policy.relative_threshold;

  const Eigen::Index available = result.singular_values.size();
  if (policy.fixed_rank) {
    if (*policy.fixed_rank > available) {
      std::ostringstream msg;
      msg << "fixed rank " << *policy.fixed_rank << " exceeds min(m, n) = " << available;
      throw InputError(msg.str());
    }
    result.rank = *policy.fixed_rank;
    return result;
  }

  const double top = available > 0 ? result.singular_values[0] : 0.0;
  if (top > 0.0) {
    const double cut = policy.relative_threshold * top;
    for (Eigen::Index i = 0; i < available; ++i) {
      if (result.singular_values[i] >= cut) ++result.rank;
    }
  }
  return result;
}

SpectrumResult svd_spectrum(const JacobianMatrix& jac, const RankPolicy& policy) {
  return svd_spectrum(jac.entries, policy);
}

double log_volume_factor(const SpectrumResult& spectrum) {
  if (spectrum.rank == 0) {
    throw DegeneratePointError("Jacobian has rank 0; the induced density is undefined here");
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < spectrum.rank; ++i) {
    const double sigma = spectrum.singular_values[i];
    if (!(sigma > 0.0)) {
      throw DegeneratePointError("a retained singular value is zero; the volume element vanishes");
    }
    total += std::log(sigma);
  }
  return total;
}

double volume_factor(const SpectrumResult& spectrum) {
  return std::exp(log_volume_factor(spectrum));
}

std::vector<Vector> nondegenerate_directions(const SpectrumResult& spectrum) {
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(spectrum.rank));
  for (Eigen::Index i = 0; i < spectrum.rank; ++i) out.emplace_back(spectrum.right_vectors.col(i));
  return out;
}

}  // namespace gendensity
