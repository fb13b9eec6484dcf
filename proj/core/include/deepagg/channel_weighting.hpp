#pragma once

#include <cstddef>

#include "deepagg/types.hpp"

namespace deepagg {

/// Stabilizing constant added to every weight denominator. Must be > 0.
class Epsilon {
 public:
  static constexpr double kDefault = 1e-6;

  explicit Epsilon(double value = kDefault);
  double value() const noexcept { return value_; }

 private:
  double value_;
};

/// Spatially weighted per-channel sums: sum over cells of X(k,i,j) * S(i,j).
/// Throws DimensionMismatch when the map and tensor grids differ.
ChannelVector weighted_channel_sums(const FeatureTensor& tensor, const SpatialMap& weights);

/// Squared per-cell mean of each weighted sum: (omega_k / (W*H))^2.
ChannelVector element_value_items(const ChannelVector& omega, std::size_t height,
                                  std::size_t width);

/// log((K*eps + sum_c items_c) / (eps + items_k)), natural log. Channels with
/// a large share of the total get small weights. Items must be >= 0.
ChannelVector echannel_weights(const ChannelVector& items, Epsilon eps = Epsilon{});

/// Fraction of cells in each channel whose value is exactly nonzero.
ChannelVector sparsity_items(const FeatureTensor& tensor);

/// The same log-ratio form applied to sparsity items instead of
/// element-value items.
ChannelVector schannel_weights(const ChannelVector& sparsity, Epsilon eps = Epsilon{});

}  // namespace deepagg
