#include "gendensity/differentiation.hpp"

#include <cmath>
#include <sstream>

#include "gendensity/errors.hpp"

namespace gendensity {

void FdConfig::validate() const {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    std::ostringstream msg;
    msg << "finite-difference epsilon must lie in (0, 1), got " << epsilon;
    throw InputError(msg.str());
  }
}

JacobianMatrix jacobian(const Generator& generator, const Vector& z, const FdConfig& cfg) {
  cfg.validate();
  if (z.size() != generator.latent_dim()) {
    std::ostringstream msg;
    msg << "latent vector has length " << z.size() << ", generator expects "
        << generator.latent_dim();
    throw InputError(msg.str());
  }

  JacobianMatrix result;
  result.base_point = z;
  result.epsilon_used = cfg.epsilon;
  result.entries.resize(generator.output_dim(), generator.latent_dim());

  Vector probe = z;
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    // Divide by the step actually taken between the two representable probe
    // coordinates; this keeps the identity map exact.
    const double upper = z[j] + cfg.epsilon;
    const double lower = z[j] - cfg.epsilon;
    probe[j] = upper;
    const Vector forward = generator.evaluate(probe);
    probe[j] = lower;
    const Vector backward = generator.evaluate(probe);
    probe[j] = z[j];

    if (!forward.allFinite() || !backward.allFinite()) {
      std::ostringstream msg;
      msg << "generator produced a non-finite value while differentiating column " << j;
      throw NumericalError(msg.str());
    }
    result.entries.col(j) = (forward - backward) / (upper - lower);
  }
  return result;
}

}  // namespace gendensity
