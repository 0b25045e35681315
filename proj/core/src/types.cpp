#include "latent/types.hpp"

#include "latent/error.hpp"

namespace latent {

bool all_finite(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  return m.allFinite();
}

void require_finite(const Eigen::Ref<const Eigen::MatrixXd>& m,
                    const std::string& what) {
  if (!m.allFinite()) throw NumericalError(what + ": non-finite value");
}

}  // namespace latent
