#include "gendensity/dimension.hpp"

#include <optional>
#include <sstream>

#include "gendensity/errors.hpp"
#include "gendensity/parallel.hpp"

namespace gendensity {

SpectrumSummary mean_spectrum(const Generator& generator, const std::vector<Vector>& points,
                              Eigen::Index top_k, const FdConfig& fd, double relative_threshold,
                              unsigned threads) {
  fd.validate();
  const Eigen::Index available = std::min(generator.latent_dim(), generator.output_dim());
  if (top_k < 1 || top_k > available) {
    std::ostringstream msg;
    msg << "K must lie in [1, " << available << "], got " << top_k;
    throw InputError(msg.str());
  }
  if (!(relative_threshold > 0.0 && relative_threshold < 1.0)) {
    throw InputError("relative threshold must lie in (0, 1)");
  }
  if (points.empty()) throw InputError("mean spectrum needs at least one point");

  std::vector<std::optional<Vector>> spectra(points.size());
  parallel_for(points.size(), threads, [&](std::size_t i) {
    try {
      const auto jac = jacobian(generator, points[i], fd);
      Eigen::JacobiSVD<Matrix> svd(jac.entries);
      spectra[i] = svd.singularValues().head(top_k);
    } catch (const NumericalError&) {
      spectra[i].reset();
    }
  });

  SpectrumSummary summary;
  summary.relative_threshold = relative_threshold;
  std::size_t usable = 0;
  for (const auto& s : spectra) usable += s.has_value() ? 1 : 0;
  summary.n_points = usable;
  summary.n_skipped = points.size() - usable;
  summary.per_point_spectra.resize(static_cast<Eigen::Index>(usable), top_k);
  summary.mean_singular_values = Vector::Zero(top_k);
  Eigen::Index row = 0;
  for (const auto& s : spectra) {
    if (!s) continue;
    summary.per_point_spectra.row(row++) = s->transpose();
    summary.mean_singular_values += *s;
  }
  if (usable == 0) throw NumericalError("every sample point produced a non-finite Jacobian");
  summary.mean_singular_values /= static_cast<double>(usable);

  const double top = summary.mean_singular_values[0];
  if (top > 0.0) {
    for (Eigen::Index i = 0; i < top_k; ++i) {
      if (summary.mean_singular_values[i] >= relative_threshold * top) {
        summary.suggested_dimension = i + 1;
      }
    }
  }
  return summary;
}

Vector pointcloud_svd(const std::vector<Vector>& latents) {
  if (latents.size() < 2) throw InputError("point-cloud SVD needs at least 2 points");
  const Eigen::Index dim = latents.front().size();
  Matrix data(static_cast<Eigen::Index>(latents.size()), dim);
  for (std::size_t i = 0; i < latents.size(); ++i) {
    if (latents[i].size() != dim) throw InputError("point cloud has vectors of different lengths");
    data.row(static_cast<Eigen::Index>(i)) = latents[i].transpose();
  }
  const Vector mean = data.colwise().mean().transpose();
  data.rowwise() -= mean.transpose();
  return Eigen::JacobiSVD<Matrix>(data).singularValues();
}

}  // namespace gendensity
