#include "gendensity/scores.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gendensity/errors.hpp"

namespace gendensity {

AnchorSet AnchorSet::from_latents(const Generator& generator, std::vector<Vector> latents,
                                  std::vector<std::string> labels) {
  if (!labels.empty() && labels.size() != latents.size()) {
    throw InputError("anchor labels must match the number of anchors");
  }
  AnchorSet set;
  set.outputs.reserve(latents.size());
  for (const auto& z : latents) set.outputs.push_back(generator.evaluate(z));
  set.latents = std::move(latents);
  set.labels = std::move(labels);
  return set;
}

double AnchorSet::max_output_drift(const Generator& generator) const {
  double worst = 0.0;
  for (std::size_t i = 0; i < latents.size(); ++i) {
    worst = std::max(worst, (generator.evaluate(latents[i]) - outputs[i]).cwiseAbs().maxCoeff());
  }
  return worst;
}

std::string to_string(NeighborMetric metric) {
  return metric == NeighborMetric::output ? "output" : "latent";
}

std::vector<std::pair<std::size_t, std::size_t>> nearest_neighbor_pairs(const AnchorSet& anchors,
                                                                        NeighborMetric metric) {
  const std::size_t count = anchors.size();
  if (count < 2) throw InputError("nearest-neighbour pairing needs at least 2 anchors");
  const auto& points = metric == NeighborMetric::output ? anchors.outputs : anchors.latents;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t best = i == 0 ? 1 : 0;
    double best_d2 = (points[i] - points[best]).squaredNorm();
    for (std::size_t j = best + 1; j < count; ++j) {
      if (j == i) continue;
      const double d2 = (points[i] - points[j]).squaredNorm();
      if (d2 < best_d2) {
        best = j;
        best_d2 = d2;
      }
    }
    pairs.emplace_back(i, best);
  }
  return pairs;
}

double dip_score(const DensityProfile& profile) {
  if (profile.size() < 3) throw ScoreUndefinedError("dip needs at least 3 samples");
  const std::size_t first = 0;
  const std::size_t last = profile.size() - 1;
  const std::size_t mid = arclength_midpoint_index(profile);
  for (std::size_t k : {first, mid, last}) {
    if (!profile.usable(k)) {
      std::ostringstream msg;
      msg << "dip undefined: sample " << k << " is " << to_string(profile.flags[k]);
      throw ScoreUndefinedError(msg.str());
    }
  }
  return profile.log_densities[first] + profile.log_densities[last] -
         2.0 * profile.log_densities[mid];
}

std::optional<double> log_density_at_arclength(const DensityProfile& profile, double s) {
  const auto& arc = profile.arclengths;
  if (arc.empty() || s < arc.front() || s > arc.back()) return std::nullopt;
  const auto it = std::lower_bound(arc.begin(), arc.end(), s);
  const auto k = static_cast<std::size_t>(it - arc.begin());
  if (arc[k] == s) {
    if (!profile.usable(k)) return std::nullopt;
    return profile.log_densities[k];
  }
  // arc[k - 1] < s < arc[k]
  if (!profile.usable(k - 1) || !profile.usable(k)) return std::nullopt;
  const double w = (s - arc[k - 1]) / (arc[k] - arc[k - 1]);
  return (1.0 - w) * profile.log_densities[k - 1] + w * profile.log_densities[k];
}

std::optional<double> decay_at_radius(const DensityProfile& profile, double radius) {
  if (!(radius > 0.0)) throw InputError("decay radius must be positive");
  const std::size_t origin = profile.origin_index;
  if (origin >= profile.size() || !profile.usable(origin)) return std::nullopt;
  const auto ahead = log_density_at_arclength(profile, radius);
  const auto behind = log_density_at_arclength(profile, -radius);
  if (!ahead || !behind) return std::nullopt;
  return (*ahead + *behind - 2.0 * profile.log_densities[origin]) / radius;
}

DecayScore decay_score(const std::vector<DensityProfile>& profiles,
                       const std::vector<double>& radii) {
  if (radii.empty()) throw InputError("decay score needs at least one radius");
  DecayScore score;
  double total = 0.0;
  for (const auto& profile : profiles) {
    auto& row = score.per_point.emplace_back();
    for (double r : radii) {
      const auto eta = decay_at_radius(profile, r);
      row.push_back(eta);
      if (eta) {
        total += *eta;
        ++score.n_terms;
      } else {
        ++score.n_excluded;
      }
    }
  }
  score.mean = score.n_terms > 0 ? total / static_cast<double>(score.n_terms)
                                 : std::numeric_limits<double>::quiet_NaN();
  return score;
}

void ScoreConfig::validate() const {
  settings.fd.validate();
  settings.rank.validate();
  if (path_samples < 3) throw InputError("path samples must be at least 3");
  if (!(decay.t_max > 0.0)) throw InputError("t_max must be positive");
  if (decay.samples_per_side < 1) throw InputError("ray samples per side must be at least 1");
  if (radii.empty()) throw InputError("at least one decay radius is required");
  for (double r : radii) {
    if (!(r > 0.0) || !std::isfinite(r)) throw InputError("decay radii must be positive");
  }
}

ScoreReport score_run(const Generator& generator, const AnchorSet& anchors,
                      const LatentPrior& prior, const ScoreConfig& config) {
  config.validate();
  if (anchors.size() == 0) throw InputError("score run needs at least one anchor");

  ScoreReport report;
  report.radii_used = config.radii;
  report.labels = anchors.labels;

  // Dips along nearest-neighbour paths.
  if (anchors.size() >= 2) {
    double total = 0.0;
    for (const auto& [i, j] : nearest_neighbor_pairs(anchors, config.metric)) {
      PathDiagnostic diag{i, j, std::nullopt, {}};
      try {
        const auto profile = path_density(generator, anchors.latents[i], anchors.latents[j],
                                          prior, config.settings, config.path_samples);
        diag.dip = dip_score(profile);
        total += *diag.dip;
        report.per_path_dips.push_back(*diag.dip);
      } catch (const ScoreUndefinedError& e) {
        diag.note = e.what();
      } catch (const EmptyProfileError& e) {
        diag.note = e.what();
      }
      if (!diag.dip) ++report.n_excluded;
      report.paths.push_back(std::move(diag));
    }
    report.n_paths = report.paths.size();
    if (report.per_path_dips.empty()) {
      throw ScoreUndefinedError("every nearest-neighbour path was excluded from the dip score");
    }
    report.mean_dip = total / static_cast<double>(report.per_path_dips.size());
  } else {
    report.mean_dip = std::numeric_limits<double>::quiet_NaN();
  }

  // Decay along the largest singular direction at every anchor.
  double decay_total = 0.0;
  std::size_t decay_terms = 0;
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    PointDiagnostic diag;
    diag.anchor = i;
    diag.eta.assign(config.radii.size(), std::nullopt);
    try {
      const auto decay = decay_profile(generator, anchors.latents[i], 0, prior, config.settings,
                                       config.decay);
      diag.direction_index = decay.direction_index;
      diag.sigma = decay.sigma;
      diag.rank = decay.rank_at_origin;
      for (std::size_t r = 0; r < config.radii.size(); ++r) {
        diag.eta[r] = decay_at_radius(decay.profile, config.radii[r]);
      }
    } catch (const DegenerateDirectionError& e) {
      diag.note = e.what();
    } catch (const EmptyProfileError& e) {
      diag.note = e.what();
    }
    for (const auto& eta : diag.eta) {
      if (eta) {
        decay_total += *eta;
        ++decay_terms;
      } else {
        ++report.n_excluded_decay;
      }
    }
    report.per_point_decays.push_back(diag.eta);
    report.points.push_back(std::move(diag));
  }
  report.mean_decay = decay_terms > 0 ? decay_total / static_cast<double>(decay_terms)
                                      : std::numeric_limits<double>::quiet_NaN();
  return report;
}

}  // namespace gendensity
