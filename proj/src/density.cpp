#include "gendensity/density.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "gendensity/errors.hpp"

namespace gendensity {

LatentPrior LatentPrior::standard_normal(Eigen::Index dim) {
  if (dim <= 0) throw InputError("prior dimension must be positive");
  return LatentPrior(Kind::standard_normal, dim, 0.0, 0.0);
}

LatentPrior LatentPrior::uniform_box(Eigen::Index dim, double lo, double hi) {
  if (dim <= 0) throw InputError("prior dimension must be positive");
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw InputError("uniform prior needs finite bounds with lo < hi");
  }
  return LatentPrior(Kind::uniform_box, dim, lo, hi);
}

double LatentPrior::log_density(const Vector& z) const {
  if (z.size() != dim_) {
    std::ostringstream msg;
    msg << "latent vector has length " << z.size() << ", prior expects " << dim_;
    throw InputError(msg.str());
  }
  const double m = static_cast<double>(dim_);
  if (kind_ == Kind::standard_normal) {
    return -0.5 * z.squaredNorm() - 0.5 * m * std::log(2.0 * std::numbers::pi);
  }
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (z[i] < lo_ || z[i] > hi_) return -std::numeric_limits<double>::infinity();
  }
  return -m * std::log(hi_ - lo_);
}

Vector LatentPrior::sample(std::mt19937_64& rng) const {
  Vector z(dim_);
  if (kind_ == Kind::standard_normal) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index i = 0; i < dim_; ++i) z[i] = normal(rng);
  } else {
    std::uniform_real_distribution<double> uniform(lo_, hi_);
    for (Eigen::Index i = 0; i < dim_; ++i) z[i] = uniform(rng);
  }
  return z;
}

std::string LatentPrior::describe() const {
  if (kind_ == Kind::standard_normal) return "normal";
  std::ostringstream out;
  out.precision(17);
  out << "uniform:" << lo_ << ":" << hi_;
  return out.str();
}

double prior_log_density(const LatentPrior& prior, const Vector& z) {
  return prior.log_density(z);
}

std::string to_string(SampleFlag flag) {
  switch (flag) {
    case SampleFlag::ok:
      return "ok";
    case SampleFlag::degenerate:
      return "degenerate";
    case SampleFlag::overflow:
      return "overflow";
  }
  return "overflow";
}

namespace {

void check_dims(const Generator& generator, const LatentPrior& prior, const Vector& z) {
  if (prior.dim() != generator.latent_dim()) {
    std::ostringstream msg;
    msg << "prior dimension " << prior.dim() << " does not match generator latent dimension "
        << generator.latent_dim();
    throw InputError(msg.str());
  }
  if (z.size() != generator.latent_dim()) {
    std::ostringstream msg;
    msg << "latent vector has length " << z.size() << ", generator expects "
        << generator.latent_dim();
    throw InputError(msg.str());
  }
}

}  // namespace

DensitySample evaluate_density(const Generator& generator, const Vector& z,
                               const LatentPrior& prior, const EvaluationSettings& settings) {
  check_dims(generator, prior, z);
  DensitySample sample;
  sample.value.log_prior = prior.log_density(z);

  JacobianMatrix jac;
  try {
    jac = jacobian(generator, z, settings.fd);
  } catch (const NumericalError&) {
    sample.flag = SampleFlag::overflow;
    return sample;
  }
  sample.spectrum = svd_spectrum(jac, settings.rank);
  sample.value.rank_used = sample.spectrum.rank;

  try {
    sample.value.log_volume_factor = log_volume_factor(sample.spectrum);
  } catch (const DegeneratePointError&) {
    sample.flag = SampleFlag::degenerate;
    return sample;
  }
  sample.value.log_p_tilde = sample.value.log_prior - sample.value.log_volume_factor;
  if (!std::isfinite(sample.value.log_p_tilde)) sample.flag = SampleFlag::overflow;
  return sample;
}

LogDensityValue induced_log_density(const Generator& generator, const Vector& z,
                                    const LatentPrior& prior, const EvaluationSettings& settings) {
  check_dims(generator, prior, z);
  const auto spectrum = svd_spectrum(jacobian(generator, z, settings.fd), settings.rank);
  LogDensityValue value;
  value.log_prior = prior.log_density(z);
  value.log_volume_factor = log_volume_factor(spectrum);
  value.rank_used = spectrum.rank;
  value.log_p_tilde = value.log_prior - value.log_volume_factor;
  return value;
}

}  // namespace gendensity
