#include "deepagg/types.hpp"

#include <cmath>

#include "deepagg/error.hpp"

namespace deepagg {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::MalformedFile: return "MalformedFile";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::DegenerateDescriptor: return "DegenerateDescriptor";
    case ErrorCode::ModelDimMismatch: return "ModelDimMismatch";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::EmptyPositives: return "EmptyPositives";
    case ErrorCode::MalformedGroundTruth: return "MalformedGroundTruth";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
  }
  return "Unknown";
}

FeatureTensor::FeatureTensor(std::size_t channels, std::size_t height, std::size_t width,
                             std::string image_id)
    : FeatureTensor(channels, height, width,
                    std::vector<float>(channels * height * width, 0.0f), std::move(image_id)) {}

FeatureTensor::FeatureTensor(std::size_t channels, std::size_t height, std::size_t width,
                             std::vector<float> values, std::string image_id)
    : channels_(channels),
      height_(height),
      width_(width),
      values_(std::move(values)),
      image_id_(std::move(image_id)) {
  if (channels == 0 || height == 0 || width == 0) {
    throw Error(ErrorCode::InvalidArgument, "tensor extents must be >= 1");
  }
  if (values_.size() != channels * height * width) {
    throw Error(ErrorCode::DimensionMismatch,
                "tensor payload has " + std::to_string(values_.size()) + " values, expected " +
                    std::to_string(channels * height * width));
  }
  for (float v : values_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteValue, "tensor value is not finite");
  }
}

SpatialMap::SpatialMap(std::size_t height, std::size_t width, double fill)
    : height_(height), width_(width), values_(height * width, fill) {}

SpatialMap::SpatialMap(std::size_t height, std::size_t width, std::vector<double> values)
    : height_(height), width_(width), values_(std::move(values)) {
  if (values_.size() != height * width) {
    throw Error(ErrorCode::DimensionMismatch, "map payload does not match H*W");
  }
}

GridPoint grid_center(std::size_t height, std::size_t width) noexcept {
  return {(static_cast<double>(height) + 1.0) / 2.0, (static_cast<double>(width) + 1.0) / 2.0};
}

double l2_norm(std::span<const double> v) noexcept {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

GlobalDescriptor GlobalDescriptor::normalized(std::vector<double> values, std::string image_id,
                                              DescriptorStage stage) {
  const double norm = l2_norm(values);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw Error(ErrorCode::DegenerateDescriptor,
                "descriptor '" + image_id + "' has zero (or non-finite) norm");
  }
  for (double& x : values) x /= norm;
  return GlobalDescriptor(std::move(values), std::move(image_id), stage);
}

}  // namespace deepagg
