#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "deepagg/channel_weighting.hpp"
#include "deepagg/error.hpp"
#include "deepagg/spatial_weighting.hpp"
#include "deepagg/tensor_io.hpp"
#include "deepagg/types.hpp"
#include "deepagg/whitening.hpp"

namespace deepagg {

enum class SpatialMode {
  None,              // all-ones map (plain sum pooling)
  AdaptiveGaussian,  // centered on the top-alpha responses
  CenteredGaussian,  // fixed at the grid center
};

enum class ChannelMode {
  None,          // all-ones weights
  ElementValue,  // log-ratio of squared weighted means
  Sparsity,      // log-ratio of nonzero fractions
};

std::string_view to_string(SpatialMode mode) noexcept;
std::string_view to_string(ChannelMode mode) noexcept;
/// Accepts the CLI spellings none|agauss|ngauss and none|echan|schan.
SpatialMode parse_spatial_mode(std::string_view text);
ChannelMode parse_channel_mode(std::string_view text);

struct AggregationConfig {
  AlphaFraction alpha{0.1};
  Epsilon eps{};
  SpatialMode spatial_mode = SpatialMode::AdaptiveGaussian;
  ChannelMode channel_mode = ChannelMode::ElementValue;
  SigmaRule sigma_rule = SigmaRule::Edge;
  /// Whitened output dimensionality; 0 means "same as the model".
  std::size_t target_dim = 0;
};

/// The spatial map chosen by cfg.spatial_mode for this tensor.
SpatialMap spatial_weights(const FeatureTensor& tensor, const AggregationConfig& cfg);

/// The channel weights chosen by cfg.channel_mode, given the weighted sums.
ChannelVector channel_weights(const FeatureTensor& tensor, const ChannelVector& omega,
                              const AggregationConfig& cfg);

/// Spatial weighting, weighted channel sums, channel weighting, product and
/// L2 normalization. Throws DegenerateDescriptor for an all-zero product.
GlobalDescriptor aggregate_raw(const FeatureTensor& tensor, const AggregationConfig& cfg);

/// aggregate_raw followed by whitening and a second L2 normalization.
/// Throws ModelDimMismatch when the model does not take K inputs or (with a
/// nonzero cfg.target_dim) does not produce target_dim outputs.
GlobalDescriptor aggregate(const FeatureTensor& tensor, const AggregationConfig& cfg,
                           const WhiteningModel& model);

struct ImageFailure {
  std::string image_id;
  ErrorCode code;
  std::string message;
};

struct BatchResult {
  std::vector<GlobalDescriptor> descriptors;  // manifest order, failures skipped
  std::vector<ImageFailure> failures;         // manifest order
};

/// Loads and aggregates every manifest entry, in parallel up to
/// worker_count() threads. Per-image errors are collected, not thrown.
BatchResult aggregate_batch(const DatasetManifest& manifest, const AggregationConfig& cfg,
                            const WhiteningModel* model = nullptr);

}  // namespace deepagg
