#include "gendensity/generator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gendensity/errors.hpp"

namespace gendensity {

std::string to_string(Activation activation) {
  switch (activation) {
    case Activation::identity:
      return "identity";
    case Activation::relu:
      return "relu";
    case Activation::tanh:
      return "tanh";
    case Activation::sigmoid:
      return "sigmoid";
  }
  return "identity";
}

std::optional<Activation> parse_activation(const std::string& name) {
  if (name == "identity") return Activation::identity;
  if (name == "relu") return Activation::relu;
  if (name == "tanh") return Activation::tanh;
  if (name == "sigmoid") return Activation::sigmoid;
  return std::nullopt;
}

std::string to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::identity:
      return "identity";
    case GeneratorKind::linear:
      return "linear";
    case GeneratorKind::circle_embed:
      return "circle";
    case GeneratorKind::memorizer:
      return "memorizer";
    case GeneratorKind::smooth_interpolator:
      return "smooth";
    case GeneratorKind::network:
      return "network";
  }
  return "network";
}

// ---------------------------------------------------------------------------
// NetworkSpec

Eigen::Index NetworkSpec::latent_dim() const {
  return layers.empty() ? 0 : layers.front().weights.cols();
}

Eigen::Index NetworkSpec::output_dim() const {
  return layers.empty() ? 0 : layers.back().weights.rows();
}

void NetworkSpec::validate() const {
  if (layers.empty()) throw LoadError("network has no layers");
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const auto& layer = layers[k];
    std::ostringstream where;
    where << "layer " << k << ": ";
    if (layer.weights.rows() == 0 || layer.weights.cols() == 0) {
      throw LoadError(where.str() + "empty weight matrix");
    }
    if (layer.bias.size() != layer.weights.rows()) {
      std::ostringstream msg;
      msg << where.str() << "bias has length " << layer.bias.size() << " but weights have "
          << layer.weights.rows() << " rows";
      throw LoadError(msg.str());
    }
    if (k > 0 && layer.weights.cols() != layers[k - 1].weights.rows()) {
      std::ostringstream msg;
      msg << where.str() << "in_dim " << layer.weights.cols()
          << " does not match previous out_dim " << layers[k - 1].weights.rows();
      throw LoadError(msg.str());
    }
    if (!layer.weights.allFinite() || !layer.bias.allFinite()) {
      throw LoadError(where.str() + "non-finite parameter");
    }
  }
}

namespace {

double activate(Activation activation, double x) {
  switch (activation) {
    case Activation::identity:
      return x;
    case Activation::relu:
      return x > 0.0 ? x : 0.0;
    case Activation::tanh:
      return std::tanh(x);
    case Activation::sigmoid:
      return 1.0 / (1.0 + std::exp(-x));
  }
  return x;
}

Vector forward(const NetworkSpec& spec, const Vector& z) {
  Vector x = z;
  for (const auto& layer : spec.layers) {
    Vector pre = layer.weights * x + layer.bias;
    for (Eigen::Index i = 0; i < pre.size(); ++i) pre[i] = activate(layer.activation, pre[i]);
    x = std::move(pre);
  }
  return x;
}

double min_anchor_spacing(const Matrix& anchors) {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < anchors.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < anchors.rows(); ++j) {
      best = std::min(best, (anchors.row(i) - anchors.row(j)).norm());
    }
  }
  return std::isfinite(best) ? best : 1.0;
}

}  // namespace

// ---------------------------------------------------------------------------
// CenterLayout

void CenterLayout::validate() const {
  if (anchors.rows() == 0) throw InputError("center layout needs at least one anchor");
  if (anchors.rows() != centers.rows()) {
    throw InputError("center layout: anchor and center counts differ");
  }
  if (anchors.cols() == 0 || centers.cols() == 0) {
    throw InputError("center layout: zero-dimensional anchors or centers");
  }
  if (!anchors.allFinite() || !centers.allFinite()) {
    throw InputError("center layout: non-finite coordinates");
  }
  if (anchors.rows() > 1 && min_anchor_spacing(anchors) == 0.0) {
    throw InputError("center layout: anchors must be distinct");
  }
}

CenterLayout square_layout() {
  CenterLayout layout;
  layout.anchors.resize(4, 3);
  layout.anchors << 1, 1, 0,
                   -1, 1, 0,
                   -1, -1, 0,
                    1, -1, 0;
  layout.centers.resize(4, 4);
  layout.centers << 0.8, 0.8, 0, 0,
                   -0.8, 0.8, 0, 0,
                   -0.8, -0.8, 0, 0,
                    0.8, -0.8, 0, 0;
  return layout;
}

CenterLayout pair_layout() {
  CenterLayout layout;
  layout.anchors.resize(2, 2);
  layout.anchors << -1, 0,
                     1, 0;
  layout.centers.resize(2, 3);
  layout.centers << -0.8, 0, 0,
                     0.8, 0, 0;
  return layout;
}

namespace builtin {

// ---------------------------------------------------------------------------
// SmoothInterpolator

SmoothInterpolator::SmoothInterpolator(CenterLayout layout) : layout_(std::move(layout)) {
  layout_.validate();
  const Eigen::Index count = layout_.count();
  const Eigen::Index m = layout_.anchors.cols();
  const Eigen::Index n = layout_.centers.cols();

  anchor_mean_ = layout_.anchors.colwise().mean().transpose();
  center_mean_ = layout_.centers.colwise().mean().transpose();
  const Matrix anchored = layout_.anchors.rowwise() - anchor_mean_.transpose();
  const Matrix centered = layout_.centers.rowwise() - center_mean_.transpose();

  // Basis of the anchor span from the right singular vectors of the
  // centered anchor matrix.
  Eigen::JacobiSVD<Matrix> hull_svd(anchored, Eigen::ComputeFullV);
  const Vector& hull_sigma = hull_svd.singularValues();
  const double hull_cut = 1e-10 * (hull_sigma.size() > 0 ? hull_sigma[0] : 0.0);
  Eigen::Index span_rank = 0;
  for (Eigen::Index i = 0; i < hull_sigma.size(); ++i) {
    if (hull_sigma[i] > hull_cut && hull_sigma[i] > 0.0) ++span_rank;
  }
  const Matrix span = hull_svd.matrixV().leftCols(span_rank);
  const Matrix complement = hull_svd.matrixV().rightCols(m - span_rank);
  hull_projector_ = span * span.transpose();

  // Minimum-norm least-squares map on the span: linear * anchored^T ~ centered^T.
  Matrix fit = Matrix::Zero(n, m);
  if (span_rank > 0) {
    fit = (anchored.completeOrthogonalDecomposition().solve(centered)).transpose();
    fit = fit * hull_projector_;
  }

  Eigen::JacobiSVD<Matrix> fit_svd(fit, Eigen::ComputeFullU);
  const Vector& fit_sigma = fit_svd.singularValues();
  Eigen::Index fit_rank = 0;
  double log_stretch = 0.0;
  for (Eigen::Index i = 0; i < fit_sigma.size(); ++i) {
    if (fit_sigma[i] > 1e-12 * std::max(1.0, fit_sigma[0])) {
      ++fit_rank;
      log_stretch += std::log(fit_sigma[i]);
    }
  }
  const double stretch = fit_rank > 0 ? std::exp(log_stretch / static_cast<double>(fit_rank)) : 1.0;

  // Isometric completion: send each complement direction to a fresh output
  // direction orthogonal to the fitted range, picked from the standard basis
  // by Gram-Schmidt so the construction is deterministic.
  std::vector<Vector> used;
  for (Eigen::Index i = 0; i < fit_rank; ++i) used.emplace_back(fit_svd.matrixU().col(i));
  linear_ = fit;
  Eigen::Index next_complement = 0;
  for (Eigen::Index e = 0; e < n && next_complement < complement.cols(); ++e) {
    Vector candidate = Vector::Unit(n, e);
    for (const auto& u : used) candidate -= u.dot(candidate) * u;
    const double norm = candidate.norm();
    if (norm < 1e-8) continue;
    candidate /= norm;
    used.push_back(candidate);
    linear_ += stretch * candidate * complement.col(next_complement).transpose();
    ++next_complement;
  }

  rbf_width_ = min_anchor_spacing(layout_.anchors);
  Matrix kernel(count, count);
  for (Eigen::Index i = 0; i < count; ++i) {
    for (Eigen::Index j = 0; j < count; ++j) {
      const double d2 = (layout_.anchors.row(i) - layout_.anchors.row(j)).squaredNorm();
      kernel(i, j) = std::exp(-d2 / (2.0 * rbf_width_ * rbf_width_));
    }
  }
  Matrix residual(count, n);
  for (Eigen::Index i = 0; i < count; ++i) {
    const Vector a = layout_.anchors.row(i).transpose();
    residual.row(i) =
        (layout_.centers.row(i).transpose() - center_mean_ - linear_ * (a - anchor_mean_))
            .transpose();
  }
  rbf_weights_ = kernel.ldlt().solve(residual);
}

Vector SmoothInterpolator::evaluate(const Vector& z) const {
  Vector out = center_mean_ + linear_ * (z - anchor_mean_);
  const double inv = 1.0 / (2.0 * rbf_width_ * rbf_width_);
  for (Eigen::Index i = 0; i < layout_.count(); ++i) {
    const double phi = std::exp(-(z - layout_.anchors.row(i).transpose()).squaredNorm() * inv);
    out += phi * rbf_weights_.row(i).transpose();
  }
  return out;
}

Matrix SmoothInterpolator::jacobian(const Vector& z) const {
  Matrix jac = linear_;
  const double inv = 1.0 / (2.0 * rbf_width_ * rbf_width_);
  for (Eigen::Index i = 0; i < layout_.count(); ++i) {
    const Vector offset = z - layout_.anchors.row(i).transpose();
    const double phi = std::exp(-offset.squaredNorm() * inv);
    jac += rbf_weights_.row(i).transpose() * (-phi / (rbf_width_ * rbf_width_) * offset).transpose();
  }
  return jac;
}

Vector SmoothInterpolator::project_to_hull(const Vector& z) const {
  return anchor_mean_ + hull_projector_ * (z - anchor_mean_);
}

// ---------------------------------------------------------------------------
// Memorizer

Memorizer::Memorizer(CenterLayout layout, double sharpness, std::optional<double> capture_radius)
    : smooth_(std::move(layout)), sharpness_(sharpness) {
  if (!(sharpness > 0.0) || !std::isfinite(sharpness)) {
    throw InputError("memorizer sharpness must be positive and finite");
  }
  capture_radius_ =
      capture_radius.value_or(kBaseCaptureRadius * std::sqrt(sharpness / kDefaultSharpness));
  if (!(capture_radius_ > 0.0) || !std::isfinite(capture_radius_)) {
    throw InputError("memorizer capture radius must be positive and finite");
  }
  spacing_ = min_anchor_spacing(smooth_.layout().anchors);
}

Vector Memorizer::weights(const Vector& z) const {
  const auto& anchors = smooth_.layout().anchors;
  const Eigen::Index count = anchors.rows();
  Vector logits(count + 1);
  const double scale = 0.5 * sharpness_ / (spacing_ * spacing_);
  for (Eigen::Index i = 0; i < count; ++i) {
    logits[i] = -scale * (z - anchors.row(i).transpose()).squaredNorm();
  }
  logits[count] = -0.5 * sharpness_ * capture_radius_ * capture_radius_;
  const double top = logits.maxCoeff();
  Vector w = (logits.array() - top).exp().matrix();
  return w / w.sum();
}

Vector Memorizer::evaluate(const Vector& z) const {
  const auto& centers = smooth_.layout().centers;
  const Eigen::Index count = centers.rows();
  const Vector w = weights(z);
  Vector out = centers.transpose() * w.head(count);
  if (w[count] > 0.0) out += w[count] * smooth_.evaluate(smooth_.project_to_hull(z));
  return out;
}

Matrix Memorizer::jacobian(const Vector& z) const {
  const auto& layout = smooth_.layout();
  const Eigen::Index count = layout.count();
  const Vector w = weights(z);
  const Vector f = evaluate(z);
  const double slope = sharpness_ / (spacing_ * spacing_);

  Matrix jac = Matrix::Zero(output_dim(), latent_dim());
  for (Eigen::Index i = 0; i < count; ++i) {
    const Vector grad_logit = -slope * (z - layout.anchors.row(i).transpose());
    jac += w[i] * (layout.centers.row(i).transpose() - f) * grad_logit.transpose();
  }
  // The fallback logit is constant, so it only contributes through S(P z).
  if (w[count] > 0.0) {
    jac += w[count] * smooth_.jacobian(smooth_.project_to_hull(z)) * smooth_.hull_projector();
  }
  return jac;
}

}  // namespace builtin

// ---------------------------------------------------------------------------
// Generator

Generator::Generator(Model model, Eigen::Index latent_dim, Eigen::Index output_dim)
    : model_(std::make_shared<const Model>(std::move(model))),
      evaluations_(std::make_shared<std::atomic<std::uint64_t>>(0)),
      latent_dim_(latent_dim),
      output_dim_(output_dim) {}

Generator Generator::identity(Eigen::Index dim) {
  if (dim <= 0) throw InputError("identity generator needs a positive dimension");
  return Generator(builtin::Identity{dim}, dim, dim);
}

Generator Generator::linear(Matrix map) {
  if (map.rows() == 0 || map.cols() == 0) throw InputError("linear generator needs a non-empty matrix");
  if (!map.allFinite()) throw InputError("linear generator matrix has non-finite entries");
  const auto rows = map.rows();
  const auto cols = map.cols();
  return Generator(builtin::Linear{std::move(map)}, cols, rows);
}

Generator Generator::circle_embed() { return Generator(builtin::CircleEmbed{}, 1, 2); }

Generator Generator::memorizer(CenterLayout layout, double sharpness,
                               std::optional<double> capture_radius) {
  builtin::Memorizer model(std::move(layout), sharpness, capture_radius);
  const auto m = model.latent_dim();
  const auto n = model.output_dim();
  return Generator(std::move(model), m, n);
}

Generator Generator::smooth_interpolator(CenterLayout layout) {
  builtin::SmoothInterpolator model(std::move(layout));
  const auto m = model.latent_dim();
  const auto n = model.output_dim();
  return Generator(std::move(model), m, n);
}

Generator Generator::network(NetworkSpec spec) {
  spec.validate();
  const auto m = spec.latent_dim();
  const auto n = spec.output_dim();
  return Generator(std::move(spec), m, n);
}

GeneratorKind Generator::kind() const {
  struct Visitor {
    GeneratorKind operator()(const builtin::Identity&) const { return GeneratorKind::identity; }
    GeneratorKind operator()(const builtin::Linear&) const { return GeneratorKind::linear; }
    GeneratorKind operator()(const builtin::CircleEmbed&) const { return GeneratorKind::circle_embed; }
    GeneratorKind operator()(const builtin::Memorizer&) const { return GeneratorKind::memorizer; }
    GeneratorKind operator()(const builtin::SmoothInterpolator&) const {
      return GeneratorKind::smooth_interpolator;
    }
    GeneratorKind operator()(const NetworkSpec&) const { return GeneratorKind::network; }
  };
  return std::visit(Visitor{}, *model_);
}

void Generator::check_latent(const Vector& z) const {
  if (z.size() != latent_dim_) {
    std::ostringstream msg;
    msg << "latent vector has length " << z.size() << ", generator expects " << latent_dim_;
    throw InputError(msg.str());
  }
}

Vector Generator::evaluate(const Vector& z) const {
  check_latent(z);
  evaluations_->fetch_add(1, std::memory_order_relaxed);
  struct Visitor {
    const Vector& z;
    Vector operator()(const builtin::Identity&) const { return z; }
    Vector operator()(const builtin::Linear& g) const { return g.map * z; }
    Vector operator()(const builtin::CircleEmbed&) const {
      Vector out(2);
      out << std::cos(z[0]), std::sin(z[0]);
      return out;
    }
    Vector operator()(const builtin::Memorizer& g) const { return g.evaluate(z); }
    Vector operator()(const builtin::SmoothInterpolator& g) const { return g.evaluate(z); }
    Vector operator()(const NetworkSpec& g) const { return forward(g, z); }
  };
  return std::visit(Visitor{z}, *model_);
}

Matrix Generator::analytic_jacobian(const Vector& z) const {
  check_latent(z);
  struct Visitor {
    const Vector& z;
    Matrix operator()(const builtin::Identity& g) const { return Matrix::Identity(g.dim, g.dim); }
    Matrix operator()(const builtin::Linear& g) const { return g.map; }
    Matrix operator()(const builtin::CircleEmbed&) const {
      Matrix out(2, 1);
      out << -std::sin(z[0]), std::cos(z[0]);
      return out;
    }
    Matrix operator()(const builtin::Memorizer& g) const { return g.jacobian(z); }
    Matrix operator()(const builtin::SmoothInterpolator& g) const { return g.jacobian(z); }
    Matrix operator()(const NetworkSpec&) const {
      throw UnsupportedOperation("analytic Jacobian is only available for builtin generators");
    }
  };
  return std::visit(Visitor{z}, *model_);
}

std::optional<CenterLayout> Generator::layout() const {
  if (const auto* mem = std::get_if<builtin::Memorizer>(model_.get())) return mem->layout();
  if (const auto* smooth = std::get_if<builtin::SmoothInterpolator>(model_.get())) {
    return smooth->layout();
  }
  return std::nullopt;
}

std::uint64_t Generator::evaluation_count() const {
  return evaluations_->load(std::memory_order_relaxed);
}

void Generator::reset_evaluation_count() const { evaluations_->store(0, std::memory_order_relaxed); }

}  // namespace gendensity
