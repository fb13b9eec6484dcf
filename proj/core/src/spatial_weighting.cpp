#include "deepagg/spatial_weighting.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "deepagg/error.hpp"

namespace deepagg {

AlphaFraction::AlphaFraction(double value) : value_(value) {
  if (!(value > 0.0 && value <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "alpha must lie in (0, 1], got " + std::to_string(value));
  }
}

SpatialMap response_map(const FeatureTensor& tensor) {
  SpatialMap out(tensor.height(), tensor.width());
  std::vector<double> acc(tensor.cells(), 0.0);
  for (std::size_t k = 0; k < tensor.channels(); ++k) {
    const auto plane = tensor.channel(k);
    for (std::size_t c = 0; c < plane.size(); ++c) acc[c] += plane[c];
  }
  return SpatialMap(tensor.height(), tensor.width(), std::move(acc));
}

std::size_t top_count(AlphaFraction alpha, std::size_t cells) noexcept {
  const auto n = static_cast<std::size_t>(std::llround(alpha.value() * static_cast<double>(cells)));
  return std::clamp<std::size_t>(n, 1, cells);
}

GridPoint select_center(const SpatialMap& response, AlphaFraction alpha) {
  const std::size_t cells = response.cells();
  if (cells == 0) throw Error(ErrorCode::InvalidArgument, "empty response map");
  const std::size_t n = top_count(alpha, cells);
  const auto values = response.values();

  std::vector<std::size_t> order(cells);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (values[a] != values[b]) return values[a] > values[b];
                      return a < b;
                    });

  // Coordinates are integers, so these sums are exact in double.
  double sum_i = 0.0;
  double sum_j = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    sum_i += static_cast<double>(order[r] / response.width() + 1);
    sum_j += static_cast<double>(order[r] % response.width() + 1);
  }
  return {sum_i / static_cast<double>(n), sum_j / static_cast<double>(n)};
}

double default_sigma(std::size_t height, std::size_t width, SigmaRule rule) {
  if (height == 0 || width == 0) {
    throw Error(ErrorCode::InvalidArgument, "grid extents must be >= 1");
  }
  if (height == 1 && width == 1) return 0.5;
  const double h = static_cast<double>(height);
  const double w = static_cast<double>(width);
  switch (rule) {
    case SigmaRule::Edge: return std::max(h, w) / 4.0;
    case SigmaRule::Corner: return 0.5 * std::hypot(h / 2.0, w / 2.0);
  }
  return std::max(h, w) / 4.0;
}

SpatialMap gaussian_map(std::size_t height, std::size_t width, const GaussianParams& params) {
  if (!(params.sigma > 0.0) || !std::isfinite(params.sigma)) {
    throw Error(ErrorCode::InvalidArgument, "sigma must be positive and finite");
  }
  const double two_var = 2.0 * params.sigma * params.sigma;
  const double scale = 1.0 / (std::numbers::pi * two_var);
  SpatialMap out(height, width);
  for (std::size_t i = 0; i < height; ++i) {
    const double di = static_cast<double>(i + 1) - params.center.i;
    for (std::size_t j = 0; j < width; ++j) {
      const double dj = static_cast<double>(j + 1) - params.center.j;
      out.at(i, j) = scale * std::exp(-(di * di + dj * dj) / two_var);
    }
  }
  return out;
}

SpatialMap adaptive_gaussian(const FeatureTensor& tensor, AlphaFraction alpha, SigmaRule rule) {
  const GridPoint center = select_center(response_map(tensor), alpha);
  return gaussian_map(tensor.height(), tensor.width(),
                      {center, default_sigma(tensor.height(), tensor.width(), rule)});
}

SpatialMap centered_gaussian(std::size_t height, std::size_t width, SigmaRule rule) {
  return gaussian_map(height, width,
                      {grid_center(height, width), default_sigma(height, width, rule)});
}

}  // namespace deepagg
