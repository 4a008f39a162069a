#include "gendensity/paths.hpp"

#include <cmath>
#include <sstream>

#include "gendensity/errors.hpp"
#include "gendensity/parallel.hpp"

namespace gendensity {

LatentPath::LatentPath(Kind kind, Vector base, Vector second, std::vector<double> times,
                       std::size_t origin)
    : kind_(kind),
      base_(std::move(base)),
      second_(std::move(second)),
      times_(std::move(times)),
      origin_(origin) {}

LatentPath LatentPath::segment(Vector z1, Vector z2, std::size_t samples) {
  if (samples < 2) throw InputError("a segment needs at least 2 samples");
  if (z1.size() != z2.size()) throw InputError("segment endpoints have different lengths");
  std::vector<double> times(samples);
  const double last = static_cast<double>(samples - 1);
  for (std::size_t k = 0; k < samples; ++k) times[k] = static_cast<double>(k) / last;
  return LatentPath(Kind::segment, std::move(z1), std::move(z2), std::move(times), 0);
}

LatentPath LatentPath::ray(Vector z0, Vector direction, double t_max,
                           std::size_t samples_per_side) {
  if (samples_per_side < 1) throw InputError("a ray needs at least 1 sample per side");
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw InputError("t_max must be positive");
  if (z0.size() != direction.size()) throw InputError("ray origin and direction have different lengths");
  const auto n = static_cast<long>(samples_per_side);
  std::vector<double> times;
  times.reserve(2 * samples_per_side + 1);
  for (long k = -n; k <= n; ++k) times.push_back(t_max * static_cast<double>(k) / static_cast<double>(n));
  return LatentPath(Kind::ray, std::move(z0), std::move(direction), std::move(times),
                    samples_per_side);
}

Vector LatentPath::at(double t) const {
  if (kind_ == Kind::segment) return (1.0 - t) * base_ + t * second_;
  return base_ + t * second_;
}

Vector LatentPath::sample(std::size_t k) const {
  if (kind_ == Kind::ray) return base_ + times_[k] * second_;
  const double last = static_cast<double>(times_.size() - 1);
  const double to_end = static_cast<double>(k) / last;
  const double to_start = static_cast<double>(times_.size() - 1 - k) / last;
  return to_start * base_ + to_end * second_;
}

DensityProfile arclength_reparametrize(const std::vector<double>& times,
                                       const std::vector<Vector>& outputs,
                                       std::vector<double> log_densities,
                                       std::vector<SampleFlag> flags, std::size_t origin_index) {
  const std::size_t count = times.size();
  if (count < 2) throw InputError("arclength reparametrization needs at least 2 samples");
  if (outputs.size() != count || log_densities.size() != count || flags.size() != count) {
    throw InputError("arclength reparametrization: sample arrays differ in length");
  }
  if (origin_index >= count) throw InputError("arclength origin index out of range");

  DensityProfile profile;
  profile.times = times;
  profile.log_densities = std::move(log_densities);
  profile.flags = std::move(flags);
  profile.origin_index = origin_index;
  profile.arclengths.assign(count, 0.0);
  for (std::size_t k = origin_index + 1; k < count; ++k) {
    profile.arclengths[k] = profile.arclengths[k - 1] + (outputs[k] - outputs[k - 1]).norm();
  }
  for (std::size_t k = origin_index; k-- > 0;) {
    profile.arclengths[k] = profile.arclengths[k + 1] - (outputs[k + 1] - outputs[k]).norm();
  }
  return profile;
}

DensityProfile profile_along(const Generator& generator, const LatentPath& path,
                             const LatentPrior& prior, const EvaluationSettings& settings) {
  settings.fd.validate();
  settings.rank.validate();
  const auto& times = path.times();
  const std::size_t count = times.size();

  std::vector<Vector> outputs(count);
  std::vector<DensitySample> samples(count);
  parallel_for(count, settings.threads, [&](std::size_t k) {
    const Vector z = path.sample(k);
    outputs[k] = generator.evaluate(z);
    samples[k] = evaluate_density(generator, z, prior, settings);
    if (!outputs[k].allFinite()) samples[k].flag = SampleFlag::overflow;
  });

  std::vector<double> log_densities(count);
  std::vector<SampleFlag> flags(count);
  std::vector<Eigen::Index> ranks(count);
  bool any_usable = false;
  for (std::size_t k = 0; k < count; ++k) {
    flags[k] = samples[k].flag;
    ranks[k] = samples[k].value.rank_used;
    log_densities[k] = flags[k] == SampleFlag::ok ? samples[k].value.log_p_tilde
                                                  : std::numeric_limits<double>::quiet_NaN();
    any_usable = any_usable || flags[k] == SampleFlag::ok;
    // Keep chord sums finite when an output overflowed.
    if (!outputs[k].allFinite()) outputs[k] = k > 0 ? outputs[k - 1] : Vector::Zero(generator.output_dim());
  }
  if (!any_usable) throw EmptyProfileError("every sample along the path is degenerate or non-finite");

  auto profile = arclength_reparametrize(times, outputs, std::move(log_densities),
                                         std::move(flags), path.origin_index());
  profile.ranks = std::move(ranks);
  return profile;
}

DensityProfile path_density(const Generator& generator, const Vector& z1, const Vector& z2,
                            const LatentPrior& prior, const EvaluationSettings& settings,
                            std::size_t samples) {
  if (samples < 3) throw InputError("path density needs at least 3 samples");
  if (z1.size() != generator.latent_dim() || z2.size() != generator.latent_dim()) {
    std::ostringstream msg;
    msg << "path endpoints must have length " << generator.latent_dim();
    throw InputError(msg.str());
  }
  return profile_along(generator, LatentPath::segment(z1, z2, samples), prior, settings);
}

DecayResult decay_profile(const Generator& generator, const Vector& z0,
                          Eigen::Index direction_index, const LatentPrior& prior,
                          const EvaluationSettings& settings, const DecayOptions& options) {
  if (z0.size() != generator.latent_dim()) {
    std::ostringstream msg;
    msg << "ray origin must have length " << generator.latent_dim();
    throw InputError(msg.str());
  }
  if (direction_index < 0 || direction_index >= generator.latent_dim()) {
    std::ostringstream msg;
    msg << "direction index " << direction_index << " outside [0, " << generator.latent_dim()
        << ")";
    throw InputError(msg.str());
  }

  const JacobianMatrix jac = jacobian(generator, z0, settings.fd);
  const SpectrumResult spectrum = svd_spectrum(jac, settings.rank);
  if (direction_index >= spectrum.rank && !options.allow_degenerate) {
    std::ostringstream msg;
    msg << "direction " << direction_index << " is degenerate at this point (rank "
        << spectrum.rank << "); pass --allow-degenerate to use it anyway";
    throw DegenerateDirectionError(msg.str());
  }

  DecayResult result;
  result.direction_index = direction_index;
  result.rank_at_origin = spectrum.rank;
  if (direction_index < spectrum.right_vectors.cols()) {
    result.direction = spectrum.right_vectors.col(direction_index);
    result.sigma = spectrum.singular_values[direction_index];
  } else {
    // Beyond min(m, n): a null-space direction from the full right basis.
    Eigen::JacobiSVD<Matrix> full(jac.entries, Eigen::ComputeFullV);
    result.direction = full.matrixV().col(direction_index);
    result.sigma = 0.0;
  }

  const auto path =
      LatentPath::ray(z0, result.direction, options.t_max, options.samples_per_side);
  result.profile = profile_along(generator, path, prior, settings);
  return result;
}

std::size_t arclength_midpoint_index(const DensityProfile& profile) {
  if (profile.size() == 0) throw EmptyProfileError("profile has no samples");
  const double target = 0.5 * (profile.arclengths.front() + profile.arclengths.back());
  std::size_t best = 0;
  double best_gap = std::abs(profile.arclengths[0] - target);
  for (std::size_t k = 1; k < profile.size(); ++k) {
    const double gap = std::abs(profile.arclengths[k] - target);
    if (gap < best_gap) {
      best = k;
      best_gap = gap;
    }
  }
  return best;
}

}  // namespace gendensity
