#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "deepagg/types.hpp"

namespace deepagg {

/// 8-bit RGB raster, row-major, 3 bytes per pixel.
struct HeatmapRendering {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> rgb;

  std::array<std::uint8_t, 3> pixel(std::size_t x, std::size_t y) const {
    const std::size_t o = 3 * (y * width + x);
    return {rgb[o], rgb[o + 1], rgb[o + 2]};
  }
};

/// Linear blue (minimum) to red (maximum) ramp; t = 0.5 for a constant map.
std::array<std::uint8_t, 3> ramp_color(double t) noexcept;

/// Each cell becomes a scale x scale block. An optional center (1-based
/// grid coordinates) is marked with a 3x3 yellow dot.
HeatmapRendering render_heatmap(const SpatialMap& map, std::optional<GridPoint> center = {},
                                std::size_t scale = 16);

/// Binary PPM (P6).
std::vector<char> encode_ppm(const HeatmapRendering& image);
void write_ppm(const HeatmapRendering& image, const std::filesystem::path& path);

/// Elementwise product of two equally shaped maps.
SpatialMap weighted_response(const SpatialMap& response, const SpatialMap& weights);

enum class CorrelationMetric { Pearson, Cosine };
CorrelationMetric parse_correlation_metric(std::string_view text);

struct CorrelationMatrix {
  std::size_t n = 0;
  std::vector<double> values;  // n x n, row-major
  std::vector<std::string> ids;

  double at(std::size_t r, std::size_t c) const { return values[r * n + c]; }
};

/// Pairwise correlation of equal-length vectors. Throws ZeroVariance for a
/// constant vector (Pearson) or a zero vector (cosine), InvalidArgument for
/// fewer than two vectors, DimensionMismatch for unequal lengths.
CorrelationMatrix channel_correlation(std::span<const ChannelVector> vectors,
                                      std::vector<std::string> ids = {},
                                      CorrelationMetric metric = CorrelationMetric::Pearson);

/// Header row of ids, then one row per id.
std::string correlation_csv(const CorrelationMatrix& matrix);

/// One value per line, full precision.
std::string vector_csv(const ChannelVector& vector);
ChannelVector parse_vector_csv(std::string_view text);

}  // namespace deepagg
