#include "deepagg/viz.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <sstream>

#include "binary_io.hpp"
#include "deepagg/error.hpp"

namespace deepagg {

std::array<std::uint8_t, 3> ramp_color(double t) noexcept {
  t = std::clamp(t, 0.0, 1.0);
  const auto red = static_cast<std::uint8_t>(std::lround(255.0 * t));
  return {red, 0, static_cast<std::uint8_t>(255 - red)};
}

HeatmapRendering render_heatmap(const SpatialMap& map, std::optional<GridPoint> center,
                                std::size_t scale) {
  if (scale == 0) throw Error(ErrorCode::InvalidArgument, "scale must be >= 1");
  const auto values = map.values();
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteValue, "heat map value is not finite");
  }
  HeatmapRendering img;
  img.width = map.width() * scale;
  img.height = map.height() * scale;
  img.rgb.resize(3 * img.width * img.height);
  if (values.empty()) return img;

  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double range = *hi - *lo;
  for (std::size_t y = 0; y < img.height; ++y) {
    for (std::size_t x = 0; x < img.width; ++x) {
      const double v = map.at(y / scale, x / scale);
      const auto c = ramp_color(range > 0.0 ? (v - *lo) / range : 0.5);
      std::copy(c.begin(), c.end(), img.rgb.begin() + 3 * (y * img.width + x));
    }
  }

  if (center) {
    // Cell i spans pixel rows [(i-1)*scale, i*scale), so position i maps to
    // the middle of that span.
    const auto py = static_cast<long>(std::floor((center->i - 0.5) * static_cast<double>(scale)));
    const auto px = static_cast<long>(std::floor((center->j - 0.5) * static_cast<double>(scale)));
    for (long dy = -1; dy <= 1; ++dy) {
      for (long dx = -1; dx <= 1; ++dx) {
        const long y = py + dy;
        const long x = px + dx;
        if (y < 0 || x < 0 || y >= static_cast<long>(img.height) || x >= static_cast<long>(img.width)) {
          continue;
        }
        const std::size_t o = 3 * (static_cast<std::size_t>(y) * img.width + static_cast<std::size_t>(x));
        img.rgb[o] = 255;
        img.rgb[o + 1] = 255;
        img.rgb[o + 2] = 0;
      }
    }
  }
  return img;
}

std::vector<char> encode_ppm(const HeatmapRendering& image) {
  const std::string header = fmt::format("P6\n{} {}\n255\n", image.width, image.height);
  std::vector<char> out(header.begin(), header.end());
  out.insert(out.end(), image.rgb.begin(), image.rgb.end());
  return out;
}

void write_ppm(const HeatmapRendering& image, const std::filesystem::path& path) {
  detail::write_file(path, encode_ppm(image));
}

SpatialMap weighted_response(const SpatialMap& response, const SpatialMap& weights) {
  if (response.height() != weights.height() || response.width() != weights.width()) {
    throw Error(ErrorCode::DimensionMismatch, "maps differ in shape");
  }
  std::vector<double> out(response.cells());
  for (std::size_t c = 0; c < out.size(); ++c) out[c] = response.values()[c] * weights.values()[c];
  return SpatialMap(response.height(), response.width(), std::move(out));
}

CorrelationMetric parse_correlation_metric(std::string_view text) {
  if (text == "pearson") return CorrelationMetric::Pearson;
  if (text == "cosine") return CorrelationMetric::Cosine;
  throw Error(ErrorCode::InvalidArgument, "unknown metric '" + std::string(text) + "'");
}

CorrelationMatrix channel_correlation(std::span<const ChannelVector> vectors,
                                      std::vector<std::string> ids, CorrelationMetric metric) {
  const std::size_t n = vectors.size();
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "correlation needs at least two vectors");
  const std::size_t len = vectors.front().size();
  if (ids.empty()) {
    for (std::size_t i = 0; i < n; ++i) ids.push_back(std::to_string(i));
  }
  if (ids.size() != n) throw Error(ErrorCode::InvalidArgument, "one id per vector required");

  // Center (Pearson) and scale each vector to unit length once.
  std::vector<ChannelVector> unit(n);
  for (std::size_t v = 0; v < n; ++v) {
    if (vectors[v].size() != len) {
      throw Error(ErrorCode::DimensionMismatch, "vector '" + ids[v] + "' has a different length");
    }
    ChannelVector x = vectors[v];
    if (metric == CorrelationMetric::Pearson) {
      double mean = 0.0;
      for (double e : x) mean += e;
      mean /= static_cast<double>(len);
      for (double& e : x) e -= mean;
    }
    const double norm = l2_norm(x);
    if (!(norm > 0.0)) throw Error(ErrorCode::ZeroVariance, "vector '" + ids[v] + "' has no variance");
    for (double& e : x) e /= norm;
    unit[v] = std::move(x);
  }

  CorrelationMatrix m;
  m.n = n;
  m.ids = std::move(ids);
  m.values.assign(n * n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    m.values[r * n + r] = 1.0;
    for (std::size_t c = r + 1; c < n; ++c) {
      double dot = 0.0;
      for (std::size_t e = 0; e < len; ++e) dot += unit[r][e] * unit[c][e];
      dot = std::clamp(dot, -1.0, 1.0);
      m.values[r * n + c] = dot;
      m.values[c * n + r] = dot;
    }
  }
  return m;
}

std::string correlation_csv(const CorrelationMatrix& matrix) {
  std::string out = "id";
  for (const auto& id : matrix.ids) out += "," + id;
  out += "\n";
  for (std::size_t r = 0; r < matrix.n; ++r) {
    out += matrix.ids[r];
    for (std::size_t c = 0; c < matrix.n; ++c) out += fmt::format(",{}", matrix.at(r, c));
    out += "\n";
  }
  return out;
}

std::string vector_csv(const ChannelVector& vector) {
  std::string out;
  for (double v : vector) out += fmt::format("{}\n", v);
  return out;
}

ChannelVector parse_vector_csv(std::string_view text) {
  ChannelVector out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
    if (ec != std::errc{} || ptr != line.data() + line.size()) {
      throw Error(ErrorCode::MalformedFile, "bad vector entry '" + line + "'");
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace deepagg
