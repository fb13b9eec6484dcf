#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "deepagg/aggregation.hpp"
#include "deepagg/retrieval.hpp"

namespace deepagg {

using ModePair = std::pair<SpatialMode, ChannelMode>;

/// The six combinations compared by default: plain sum pooling, each
/// spatial scheme alone, element-value channel weighting alone, the
/// centered Gaussian with sparsity weighting, and the adaptive Gaussian with
/// element-value weighting.
std::vector<ModePair> default_ablation_modes();
/// All 3 x 3 spatial/channel combinations.
std::vector<ModePair> full_ablation_modes();

struct ExperimentSpec {
  std::vector<double> alphas;
  std::vector<std::size_t> dims;
  std::vector<ModePair> modes;

  std::filesystem::path database_manifest;
  std::filesystem::path query_manifest;
  std::filesystem::path whitening_manifest;
  /// Oxford-layout directory, or a list-format file.
  std::filesystem::path ground_truth;

  /// Alpha used by the ablation's adaptive-Gaussian cells.
  double ablation_alpha = 0.1;
  /// Channel weighting used by the alpha sweep.
  ChannelMode sweep_channel_mode = ChannelMode::None;
  double eps = Epsilon::kDefault;
  double eps_w = 1e-8;
  SigmaRule sigma_rule = SigmaRule::Edge;
  ApMode ap_mode = ApMode::Trapezoid;
};

struct SweepRow {
  double alpha = 0.0;
  std::size_t dim = 0;
  double map = 0.0;
};

struct AblationRow {
  SpatialMode spatial = SpatialMode::None;
  ChannelMode channel = ChannelMode::None;
  std::size_t dim = 0;
  double map = 0.0;
};

/// Loaded, validated inputs shared by every cell of a harness run.
struct ExperimentData {
  DatasetManifest database;
  DatasetManifest queries;
  DatasetManifest whitening;
  std::vector<QueryGroundTruth> truths;
};

/// Throws InvalidArgument for empty lists, out-of-range alphas or missing
/// paths; data errors propagate from the loaders.
ExperimentData load_experiment(const ExperimentSpec& spec, bool need_alphas, bool need_modes);

/// mAP per dim for one aggregation config: whitening refit per dim on the
/// whitening set, database and queries whitened with it.
std::vector<double> evaluate_config(const ExperimentData& data, const AggregationConfig& cfg,
                                    std::span<const std::size_t> dims, double eps_w,
                                    ApMode ap_mode);

/// One row per (alpha, dim), alphas outer, in spec order.
std::vector<SweepRow> run_alpha_sweep(const ExperimentSpec& spec);

/// One row per (mode, dim), modes outer, in spec order.
std::vector<AblationRow> run_ablation(const ExperimentSpec& spec);

std::string sweep_json(const std::vector<SweepRow>& rows, const ExperimentSpec& spec);
std::string ablation_json(const std::vector<AblationRow>& rows, const ExperimentSpec& spec);
std::string sweep_table(const std::vector<SweepRow>& rows);
std::string ablation_table(const std::vector<AblationRow>& rows);

}  // namespace deepagg
