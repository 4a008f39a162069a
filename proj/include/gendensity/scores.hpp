#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gendensity/paths.hpp"

namespace gendensity {

/// Latent representations of training samples with their cached outputs.
struct AnchorSet {
  std::vector<Vector> latents;
  std::vector<Vector> outputs;
  std::vector<std::string> labels;  // empty, or one per anchor

  static AnchorSet from_latents(const Generator& generator, std::vector<Vector> latents,
                                std::vector<std::string> labels = {});

  std::size_t size() const { return latents.size(); }

  /// Largest |outputs[i] - f(latents[i])| entry; 0 when the cache is current.
  double max_output_drift(const Generator& generator) const;
};

enum class NeighborMetric { output, latent };

std::string to_string(NeighborMetric metric);

/// For each i, the j != i minimizing the L2 distance under `metric`; ties go
/// to the smallest j. Requires at least 2 anchors.
std::vector<std::pair<std::size_t, std::size_t>> nearest_neighbor_pairs(
    const AnchorSet& anchors, NeighborMetric metric = NeighborMetric::output);

/// log p~(s_first) + log p~(s_last) - 2 log p~(s_mid), with s_mid the
/// arclength midpoint. Positive values mean a density valley between the
/// endpoints. Throws ScoreUndefinedError when any of the three samples is
/// not usable.
double dip_score(const DensityProfile& profile);

/// log p~ at signed arclength s, linear in s between the bracketing samples.
/// nullopt when s lies outside the profile or a bracketing sample is unusable.
std::optional<double> log_density_at_arclength(const DensityProfile& profile, double s);

/// (1/r) (log p~(r) + log p~(-r) - 2 log p~(0)) about the profile origin.
std::optional<double> decay_at_radius(const DensityProfile& profile, double radius);

struct DecayScore {
  double mean = 0.0;  // NaN when every term was excluded
  /// per_point[i][j] = eta_i(r_j), nullopt where excluded.
  std::vector<std::vector<std::optional<double>>> per_point;
  std::size_t n_terms = 0;
  std::size_t n_excluded = 0;
};

/// Mean of eta_i(r_j) over points and radii. Terms whose profile does not
/// reach +-r_j, or whose origin is unusable, are excluded and counted.
DecayScore decay_score(const std::vector<DensityProfile>& profiles,
                       const std::vector<double>& radii);

struct ScoreConfig {
  EvaluationSettings settings;
  std::size_t path_samples = 101;
  DecayOptions decay;
  std::vector<double> radii{0.5, 1.0};
  NeighborMetric metric = NeighborMetric::output;

  void validate() const;
};

struct PathDiagnostic {
  std::size_t from = 0;
  std::size_t to = 0;
  std::optional<double> dip;
  std::string note;  // reason for exclusion
};

struct PointDiagnostic {
  std::size_t anchor = 0;
  Eigen::Index direction_index = 0;
  double sigma = 0.0;
  Eigen::Index rank = 0;
  std::vector<std::optional<double>> eta;  // one per radius
  std::string note;
};

struct ScoreReport {
  double mean_dip = 0.0;
  double mean_decay = 0.0;  // NaN when no decay term survived
  std::vector<double> per_path_dips;
  std::vector<std::vector<std::optional<double>>> per_point_decays;
  std::vector<double> radii_used;
  std::size_t n_paths = 0;
  std::size_t n_excluded = 0;        // excluded paths
  std::size_t n_excluded_decay = 0;  // excluded (point, radius) terms
  std::vector<PathDiagnostic> paths;
  std::vector<PointDiagnostic> points;
  std::vector<std::string> labels;
};

/// Nearest-neighbour paths scored by dip, per-anchor rays along the largest
/// singular direction scored by decay. Paths and rays run concurrently;
/// aggregation follows input order. Throws ScoreUndefinedError when every
/// path is excluded.
ScoreReport score_run(const Generator& generator, const AnchorSet& anchors,
                      const LatentPrior& prior, const ScoreConfig& config = {});

}  // namespace gendensity
