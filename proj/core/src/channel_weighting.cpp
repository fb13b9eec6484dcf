#include "deepagg/channel_weighting.hpp"

#include <cmath>

#include "deepagg/error.hpp"

namespace deepagg {

Epsilon::Epsilon(double value) : value_(value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw Error(ErrorCode::InvalidArgument, "epsilon must be positive and finite");
  }
}

ChannelVector weighted_channel_sums(const FeatureTensor& tensor, const SpatialMap& weights) {
  if (weights.height() != tensor.height() || weights.width() != tensor.width()) {
    throw Error(ErrorCode::DimensionMismatch, "spatial map " + std::to_string(weights.height()) +
                                                  "x" + std::to_string(weights.width()) +
                                                  " does not match tensor grid " +
                                                  std::to_string(tensor.height()) + "x" +
                                                  std::to_string(tensor.width()));
  }
  const auto s = weights.values();
  ChannelVector omega(tensor.channels(), 0.0);
  for (std::size_t k = 0; k < tensor.channels(); ++k) {
    const auto plane = tensor.channel(k);
    double acc = 0.0;
    for (std::size_t c = 0; c < plane.size(); ++c) acc += static_cast<double>(plane[c]) * s[c];
    omega[k] = acc;
  }
  return omega;
}

ChannelVector element_value_items(const ChannelVector& omega, std::size_t height,
                                  std::size_t width) {
  const double cells = static_cast<double>(height * width);
  ChannelVector b(omega.size());
  for (std::size_t k = 0; k < omega.size(); ++k) {
    const double mean = omega[k] / cells;
    b[k] = mean * mean;
  }
  return b;
}

ChannelVector echannel_weights(const ChannelVector& items, Epsilon eps) {
  if (items.empty()) throw Error(ErrorCode::InvalidArgument, "channel vector is empty");
  double total = 0.0;
  for (double v : items) {
    if (!(v >= 0.0)) throw Error(ErrorCode::InvalidArgument, "channel items must be >= 0");
    total += v;
  }
  const double e = eps.value();
  const double numerator = static_cast<double>(items.size()) * e + total;
  ChannelVector weights(items.size());
  for (std::size_t k = 0; k < items.size(); ++k) {
    weights[k] = std::log(numerator / (e + items[k]));
  }
  return weights;
}

ChannelVector sparsity_items(const FeatureTensor& tensor) {
  ChannelVector q(tensor.channels());
  const double cells = static_cast<double>(tensor.cells());
  for (std::size_t k = 0; k < tensor.channels(); ++k) {
    std::size_t nonzero = 0;
    for (float v : tensor.channel(k)) nonzero += v != 0.0f ? 1 : 0;
    q[k] = static_cast<double>(nonzero) / cells;
  }
  return q;
}

ChannelVector schannel_weights(const ChannelVector& sparsity, Epsilon eps) {
  return echannel_weights(sparsity, eps);
}

}  // namespace deepagg
