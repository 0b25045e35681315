#pragma once

#include <Eigen/Core>

#include <string>

namespace latent {

/// A style w in the raw latent space W.
struct LatentW {
  Eigen::VectorXd values;

  Eigen::Index dim() const { return values.size(); }
  bool operator==(const LatentW&) const = default;
};

/// A latent v = LRU_5(w) in the Gaussianized space V.
struct LatentV {
  Eigen::VectorXd values;

  Eigen::Index dim() const { return values.size(); }
  bool operator==(const LatentV&) const = default;
};

/// A point of the extended space W+: one style per synthesis scale.
/// Row k is read by scale k.
struct StyleStack {
  Eigen::MatrixXd styles;  // scales x dim

  Eigen::Index scales() const { return styles.rows(); }
  Eigen::Index dim() const { return styles.cols(); }
  LatentW row(Eigen::Index k) const { return {styles.row(k).transpose()}; }
  bool operator==(const StyleStack&) const = default;
};

/// A flat height x width x channels image, row-major with channels fastest.
struct Image {
  int height = 0;
  int width = 0;
  int channels = 0;
  Eigen::VectorXd pixels;

  Eigen::Index size() const { return pixels.size(); }
  bool operator==(const Image&) const = default;
};

bool all_finite(const Eigen::Ref<const Eigen::MatrixXd>& m);

/// Throws NumericalError naming `what` if any entry is NaN or infinite.
void require_finite(const Eigen::Ref<const Eigen::MatrixXd>& m,
                    const std::string& what);

}  // namespace latent
