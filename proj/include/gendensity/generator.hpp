#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gendensity/types.hpp"

namespace gendensity {

enum class Activation { identity, relu, tanh, sigmoid };

std::string to_string(Activation activation);
std::optional<Activation> parse_activation(const std::string& name);

struct DenseLayer {
  Matrix weights;  // out_dim x in_dim
  Vector bias;     // out_dim
  Activation activation = Activation::identity;
};

/// Feed-forward network applied as x <- act(W x + b), layer by layer.
struct NetworkSpec {
  std::vector<DenseLayer> layers;

  Eigen::Index latent_dim() const;
  Eigen::Index output_dim() const;

  /// Throws LoadError naming the first layer whose shape breaks the chain.
  void validate() const;
};

/// Latent anchor positions (rows of `anchors`, K x m) and the output points
/// they are sent to (rows of `centers`, K x n).
struct CenterLayout {
  Matrix anchors;
  Matrix centers;

  Eigen::Index count() const { return anchors.rows(); }
  void validate() const;
};

/// Four anchors on the corners of a square in the z3 = 0 plane of R^3, sent
/// to the corners of a square in R^4. The third latent coordinate is unused
/// by the anchor layout, which gives the memorizer an exactly degenerate
/// direction.
CenterLayout square_layout();

/// Two anchors at (+-1, 0) in R^2 sent to (+-0.8, 0, 0) in R^3.
CenterLayout pair_layout();

namespace builtin {

struct Identity {
  Eigen::Index dim = 1;
};

struct Linear {
  Matrix map;
};

/// z -> (cos z, sin z)
struct CircleEmbed {};

/// Smooth map through every center: affine least-squares fit on the anchor
/// span, an isometric completion (scaled to the fit's mean stretch) on the
/// orthogonal complement, and a Gaussian RBF correction that interpolates
/// the residuals exactly.
class SmoothInterpolator {
 public:
  explicit SmoothInterpolator(CenterLayout layout);

  Eigen::Index latent_dim() const { return layout_.anchors.cols(); }
  Eigen::Index output_dim() const { return layout_.centers.cols(); }
  const CenterLayout& layout() const { return layout_; }

  Vector evaluate(const Vector& z) const;
  Matrix jacobian(const Vector& z) const;

  /// Orthogonal projection onto the affine hull of the anchors.
  Vector project_to_hull(const Vector& z) const;
  const Matrix& hull_projector() const { return hull_projector_; }

 private:
  CenterLayout layout_;
  Vector anchor_mean_;
  Vector center_mean_;
  Matrix linear_;         // n x m
  Matrix rbf_weights_;    // K x n
  Matrix hull_projector_; // m x m
  double rbf_width_ = 1.0;
};

/// Soft nearest-anchor collapse. Weights are a softmax over
///   l_i(z) = -(sharpness / 2) |z - a_i|^2 / d^2   (one per anchor)
///   l_0    = -(sharpness / 2) rho^2               (fallback)
/// where d is the minimum anchor spacing and rho the capture radius in units
/// of d. Between two neighbouring anchors this is a logistic ramp whose slope
/// in units of anchor spacing equals the sharpness. The output is
///   f(z) = sum_i w_i c_i + w_0 S(P z)
/// with S the smooth interpolator of the same layout and P the projection
/// onto the anchor hull, so every captured cell collapses onto its center
/// and rays leaving a cell keep moving in output space.
class Memorizer {
 public:
  static constexpr double kDefaultSharpness = 50.0;
  /// Capture radius at the default sharpness, in anchor-spacing units.
  static constexpr double kBaseCaptureRadius = 0.86;

  Memorizer(CenterLayout layout, double sharpness,
            std::optional<double> capture_radius = std::nullopt);

  Eigen::Index latent_dim() const { return smooth_.latent_dim(); }
  Eigen::Index output_dim() const { return smooth_.output_dim(); }
  double sharpness() const { return sharpness_; }
  double capture_radius() const { return capture_radius_; }
  const CenterLayout& layout() const { return smooth_.layout(); }

  Vector evaluate(const Vector& z) const;
  Matrix jacobian(const Vector& z) const;

 private:
  Vector weights(const Vector& z) const;  // K anchors followed by fallback

  SmoothInterpolator smooth_;
  double sharpness_;
  double capture_radius_;
  double spacing_ = 1.0;
};

}  // namespace builtin

enum class GeneratorKind {
  identity,
  linear,
  circle_embed,
  memorizer,
  smooth_interpolator,
  network
};

std::string to_string(GeneratorKind kind);

/// Immutable handle on a map f: R^m -> R^n. Copies share the model and the
/// evaluation counter. Safe for concurrent evaluation.
class Generator {
 public:
  static Generator identity(Eigen::Index dim);
  static Generator linear(Matrix map);
  static Generator circle_embed();
  static Generator memorizer(CenterLayout layout,
                             double sharpness = builtin::Memorizer::kDefaultSharpness,
                             std::optional<double> capture_radius = std::nullopt);
  static Generator smooth_interpolator(CenterLayout layout);
  static Generator network(NetworkSpec spec);

  Eigen::Index latent_dim() const { return latent_dim_; }
  Eigen::Index output_dim() const { return output_dim_; }
  GeneratorKind kind() const;
  bool is_analytic() const { return kind() != GeneratorKind::network; }

  /// f(z). Throws InputError on a length mismatch.
  Vector evaluate(const Vector& z) const;

  /// Closed-form Jacobian (n x m). Throws UnsupportedOperation for networks.
  Matrix analytic_jacobian(const Vector& z) const;

  /// The anchor layout of memorizer / smooth-interpolator builtins.
  std::optional<CenterLayout> layout() const;

  std::uint64_t evaluation_count() const;
  void reset_evaluation_count() const;

 private:
  using Model = std::variant<builtin::Identity, builtin::Linear, builtin::CircleEmbed,
                             builtin::Memorizer, builtin::SmoothInterpolator, NetworkSpec>;

  Generator(Model model, Eigen::Index latent_dim, Eigen::Index output_dim);
  void check_latent(const Vector& z) const;

  std::shared_ptr<const Model> model_;
  std::shared_ptr<std::atomic<std::uint64_t>> evaluations_;
  Eigen::Index latent_dim_ = 0;
  Eigen::Index output_dim_ = 0;
};

}  // namespace gendensity
