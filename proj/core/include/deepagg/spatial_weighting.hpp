#pragma once

#include <cstddef>

#include "deepagg/types.hpp"

namespace deepagg {

/// Fraction of grid cells treated as "large responses" when locating the
/// Gaussian center. Valid range (0, 1].
class AlphaFraction {
 public:
  explicit AlphaFraction(double value);
  double value() const noexcept { return value_; }

 private:
  double value_;
};

enum class SigmaRule {
  Edge,    // max(H, W) / 4
  Corner,  // half of the center-to-corner distance
};

struct GaussianParams {
  GridPoint center;
  double sigma = 1.0;
};

/// Per-cell sum over channels, accumulated in double.
SpatialMap response_map(const FeatureTensor& tensor);

/// Number of cells selected for a given alpha: max(1, round(alpha * cells)),
/// rounding half away from zero.
std::size_t top_count(AlphaFraction alpha, std::size_t cells) noexcept;

/// Unweighted centroid (1-based) of the top-alpha cells of `response`.
/// Cells are ranked by value descending; equal values keep row-major order.
GridPoint select_center(const SpatialMap& response, AlphaFraction alpha);

/// Half the distance from the grid center to the farthest boundary. A 1x1
/// grid always gets 0.5.
double default_sigma(std::size_t height, std::size_t width, SigmaRule rule = SigmaRule::Edge);

/// Isotropic Gaussian density evaluated at every 1-based cell. Not
/// renormalized over the grid. Throws InvalidArgument unless sigma > 0.
SpatialMap gaussian_map(std::size_t height, std::size_t width, const GaussianParams& params);

/// Gaussian centered on the top-alpha response centroid.
SpatialMap adaptive_gaussian(const FeatureTensor& tensor, AlphaFraction alpha,
                             SigmaRule rule = SigmaRule::Edge);

/// Gaussian fixed at the grid center (the alpha = 1 special case).
SpatialMap centered_gaussian(std::size_t height, std::size_t width,
                             SigmaRule rule = SigmaRule::Edge);

}  // namespace deepagg
