#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace deepagg {

/// K x H x W activation tensor of one image, stored channel-major then
/// row-major (k slowest, j fastest). Storage indices are 0-based; every
/// coordinate the library reports is a 1-based grid position.
class FeatureTensor {
 public:
  FeatureTensor() = default;

  /// Zero-filled tensor. Throws InvalidArgument if any extent is 0.
  FeatureTensor(std::size_t channels, std::size_t height, std::size_t width,
                std::string image_id = {});

  /// Throws DimensionMismatch if values.size() != K*H*W and NonFiniteValue
  /// if any value is NaN or infinite.
  FeatureTensor(std::size_t channels, std::size_t height, std::size_t width,
                std::vector<float> values, std::string image_id = {});

  std::size_t channels() const noexcept { return channels_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t cells() const noexcept { return height_ * width_; }
  std::size_t size() const noexcept { return values_.size(); }

  const std::string& image_id() const noexcept { return image_id_; }
  void set_image_id(std::string id) { image_id_ = std::move(id); }

  float at(std::size_t k, std::size_t i, std::size_t j) const {
    return values_[(k * height_ + i) * width_ + j];
  }
  float& at(std::size_t k, std::size_t i, std::size_t j) {
    return values_[(k * height_ + i) * width_ + j];
  }

  /// The H*W plane of channel k.
  std::span<const float> channel(std::size_t k) const {
    return std::span<const float>(values_).subspan(k * cells(), cells());
  }

  std::span<const float> values() const noexcept { return values_; }

  friend bool operator==(const FeatureTensor&, const FeatureTensor&) = default;

 private:
  std::size_t channels_ = 0;
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<float> values_;
  std::string image_id_;
};

/// H x W real matrix, row-major. Used both for Gaussian weights and for the
/// aggregated response map.
class SpatialMap {
 public:
  SpatialMap() = default;
  SpatialMap(std::size_t height, std::size_t width, double fill = 0.0);
  SpatialMap(std::size_t height, std::size_t width, std::vector<double> values);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t cells() const noexcept { return values_.size(); }

  double at(std::size_t i, std::size_t j) const { return values_[i * width_ + j]; }
  double& at(std::size_t i, std::size_t j) { return values_[i * width_ + j]; }

  std::span<const double> values() const noexcept { return values_; }

  friend bool operator==(const SpatialMap&, const SpatialMap&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<double> values_;
};

/// Length-K per-channel vector: weighted sums, element-value items,
/// sparsity items and channel weights all share this shape.
using ChannelVector = std::vector<double>;

/// Real-valued position on the grid, 1-based: cell (i, j) sits at (i, j).
struct GridPoint {
  double i = 0.0;
  double j = 0.0;

  friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

/// ((H+1)/2, (W+1)/2): the centroid of all cells of an H x W grid.
GridPoint grid_center(std::size_t height, std::size_t width) noexcept;

enum class DescriptorStage { RawNormalized, WhitenedNormalized };

/// Unit-L2 global image vector.
class GlobalDescriptor {
 public:
  static constexpr double kNormTolerance = 1e-9;

  GlobalDescriptor() = default;

  /// Throws DegenerateDescriptor if values has zero norm; otherwise stores
  /// values / ||values||.
  static GlobalDescriptor normalized(std::vector<double> values, std::string image_id,
                                     DescriptorStage stage = DescriptorStage::RawNormalized);

  std::size_t dim() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  const std::string& image_id() const noexcept { return image_id_; }
  DescriptorStage stage() const noexcept { return stage_; }

  friend bool operator==(const GlobalDescriptor&, const GlobalDescriptor&) = default;

 private:
  GlobalDescriptor(std::vector<double> values, std::string image_id, DescriptorStage stage)
      : values_(std::move(values)), image_id_(std::move(image_id)), stage_(stage) {}

  std::vector<double> values_;
  std::string image_id_;
  DescriptorStage stage_ = DescriptorStage::RawNormalized;
};

double l2_norm(std::span<const double> v) noexcept;

}  // namespace deepagg
