#include "deepagg/aggregation.hpp"

#include <optional>

#include "deepagg/parallel.hpp"

namespace deepagg {

std::string_view to_string(SpatialMode mode) noexcept {
  switch (mode) {
    case SpatialMode::None: return "none";
    case SpatialMode::AdaptiveGaussian: return "agauss";
    case SpatialMode::CenteredGaussian: return "ngauss";
  }
  return "?";
}

std::string_view to_string(ChannelMode mode) noexcept {
  switch (mode) {
    case ChannelMode::None: return "none";
    case ChannelMode::ElementValue: return "echan";
    case ChannelMode::Sparsity: return "schan";
  }
  return "?";
}

SpatialMode parse_spatial_mode(std::string_view text) {
  if (text == "none") return SpatialMode::None;
  if (text == "agauss") return SpatialMode::AdaptiveGaussian;
  if (text == "ngauss") return SpatialMode::CenteredGaussian;
  throw Error(ErrorCode::InvalidArgument, "unknown spatial mode '" + std::string(text) + "'");
}

ChannelMode parse_channel_mode(std::string_view text) {
  if (text == "none") return ChannelMode::None;
  if (text == "echan") return ChannelMode::ElementValue;
  if (text == "schan") return ChannelMode::Sparsity;
  throw Error(ErrorCode::InvalidArgument, "unknown channel mode '" + std::string(text) + "'");
}

SpatialMap spatial_weights(const FeatureTensor& tensor, const AggregationConfig& cfg) {
  switch (cfg.spatial_mode) {
    case SpatialMode::None:
      return SpatialMap(tensor.height(), tensor.width(), 1.0);
    case SpatialMode::AdaptiveGaussian:
      return adaptive_gaussian(tensor, cfg.alpha, cfg.sigma_rule);
    case SpatialMode::CenteredGaussian:
      return centered_gaussian(tensor.height(), tensor.width(), cfg.sigma_rule);
  }
  throw Error(ErrorCode::InvalidArgument, "invalid spatial mode");
}

ChannelVector channel_weights(const FeatureTensor& tensor, const ChannelVector& omega,
                              const AggregationConfig& cfg) {
  switch (cfg.channel_mode) {
    case ChannelMode::None:
      return ChannelVector(tensor.channels(), 1.0);
    case ChannelMode::ElementValue:
      return echannel_weights(element_value_items(omega, tensor.height(), tensor.width()),
                              cfg.eps);
    case ChannelMode::Sparsity:
      return schannel_weights(sparsity_items(tensor), cfg.eps);
  }
  throw Error(ErrorCode::InvalidArgument, "invalid channel mode");
}

GlobalDescriptor aggregate_raw(const FeatureTensor& tensor, const AggregationConfig& cfg) {
  const SpatialMap weights = spatial_weights(tensor, cfg);
  ChannelVector omega = weighted_channel_sums(tensor, weights);
  const ChannelVector channel = channel_weights(tensor, omega, cfg);
  for (std::size_t k = 0; k < omega.size(); ++k) omega[k] *= channel[k];
  return GlobalDescriptor::normalized(std::move(omega), tensor.image_id(),
                                      DescriptorStage::RawNormalized);
}

GlobalDescriptor aggregate(const FeatureTensor& tensor, const AggregationConfig& cfg,
                           const WhiteningModel& model) {
  if (model.input_dim != tensor.channels()) {
    throw Error(ErrorCode::ModelDimMismatch,
                "whitening model takes dim " + std::to_string(model.input_dim) +
                    " but the tensor has " + std::to_string(tensor.channels()) + " channels");
  }
  if (cfg.target_dim != 0 && model.output_dim != cfg.target_dim) {
    throw Error(ErrorCode::ModelDimMismatch,
                "whitening model emits dim " + std::to_string(model.output_dim) +
                    ", configuration asks for " + std::to_string(cfg.target_dim));
  }
  return apply_whitening(model, aggregate_raw(tensor, cfg));
}

BatchResult aggregate_batch(const DatasetManifest& manifest, const AggregationConfig& cfg,
                            const WhiteningModel* model) {
  const std::size_t n = manifest.size();
  std::vector<std::optional<GlobalDescriptor>> outputs(n);
  std::vector<std::optional<ImageFailure>> errors(n);

  parallel_for(n, [&](std::size_t idx) {
    const auto& entry = manifest.entries[idx];
    try {
      const FeatureTensor tensor = load_entry(entry);
      outputs[idx] = model ? aggregate(tensor, cfg, *model) : aggregate_raw(tensor, cfg);
    } catch (const Error& e) {
      errors[idx] = ImageFailure{entry.image_id, e.code(), e.what()};
    } catch (const std::exception& e) {
      errors[idx] = ImageFailure{entry.image_id, ErrorCode::IoFailure, e.what()};
    }
  });

  BatchResult result;
  for (std::size_t i = 0; i < n; ++i) {
    if (outputs[i]) result.descriptors.push_back(std::move(*outputs[i]));
    if (errors[i]) result.failures.push_back(std::move(*errors[i]));
  }
  return result;
}

}  // namespace deepagg
