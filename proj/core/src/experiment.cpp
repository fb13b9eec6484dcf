#include "deepagg/experiment.hpp"

#include <fmt/format.h>

#include <json.hpp>

#include "deepagg/whitening.hpp"

namespace deepagg {

std::vector<ModePair> default_ablation_modes() {
  return {
      {SpatialMode::None, ChannelMode::None},
      {SpatialMode::CenteredGaussian, ChannelMode::None},
      {SpatialMode::AdaptiveGaussian, ChannelMode::None},
      {SpatialMode::None, ChannelMode::ElementValue},
      {SpatialMode::CenteredGaussian, ChannelMode::Sparsity},
      {SpatialMode::AdaptiveGaussian, ChannelMode::ElementValue},
  };
}

std::vector<ModePair> full_ablation_modes() {
  std::vector<ModePair> modes;
  for (auto s : {SpatialMode::None, SpatialMode::CenteredGaussian, SpatialMode::AdaptiveGaussian}) {
    for (auto c : {ChannelMode::None, ChannelMode::Sparsity, ChannelMode::ElementValue}) {
      modes.emplace_back(s, c);
    }
  }
  return modes;
}

namespace {

void require_path(const std::filesystem::path& p, const char* what) {
  if (p.empty() || !std::filesystem::exists(p)) {
    throw Error(ErrorCode::InvalidArgument,
                std::string(what) + " '" + p.string() + "' does not exist");
  }
}

[[noreturn]] void rethrow_failure(const BatchResult& batch, const char* set) {
  const auto& f = batch.failures.front();
  throw Error(f.code, std::string(set) + " image '" + f.image_id + "': " + f.message +
                          (batch.failures.size() > 1
                               ? " (+" + std::to_string(batch.failures.size() - 1) + " more)"
                               : std::string{}));
}

std::vector<GlobalDescriptor> aggregate_all(const DatasetManifest& m, const AggregationConfig& cfg,
                                            const char* set) {
  auto batch = aggregate_batch(m, cfg);
  if (!batch.failures.empty()) rethrow_failure(batch, set);
  return std::move(batch.descriptors);
}

std::vector<GlobalDescriptor> whiten_all(const WhiteningModel& model,
                                         std::span<const GlobalDescriptor> raw) {
  std::vector<GlobalDescriptor> out;
  out.reserve(raw.size());
  for (const auto& d : raw) out.push_back(apply_whitening(model, d));
  return out;
}

}  // namespace

ExperimentData load_experiment(const ExperimentSpec& spec, bool need_alphas, bool need_modes) {
  if (spec.dims.empty()) throw Error(ErrorCode::InvalidArgument, "dimension list is empty");
  if (need_alphas && spec.alphas.empty()) {
    throw Error(ErrorCode::InvalidArgument, "alpha list is empty");
  }
  if (need_modes && spec.modes.empty()) throw Error(ErrorCode::InvalidArgument, "mode list is empty");
  for (double a : spec.alphas) AlphaFraction{a};
  AlphaFraction{spec.ablation_alpha};
  Epsilon{spec.eps};
  for (auto d : spec.dims) {
    if (d == 0) throw Error(ErrorCode::InvalidArgument, "dimensions must be >= 1");
  }
  require_path(spec.database_manifest, "database manifest");
  require_path(spec.query_manifest, "query manifest");
  require_path(spec.whitening_manifest, "whitening manifest");
  require_path(spec.ground_truth, "ground truth");

  ExperimentData data;
  data.database = load_manifest(spec.database_manifest);
  data.queries = load_manifest(spec.query_manifest);
  data.whitening = load_manifest(spec.whitening_manifest);
  data.truths = std::filesystem::is_directory(spec.ground_truth)
                    ? load_oxford_ground_truth(spec.ground_truth)
                    : load_list_ground_truth(spec.ground_truth);
  return data;
}

std::vector<double> evaluate_config(const ExperimentData& data, const AggregationConfig& cfg,
                                    std::span<const std::size_t> dims, double eps_w,
                                    ApMode ap_mode) {
  const auto whitening_raw = aggregate_all(data.whitening, cfg, "whitening");
  const auto database_raw = aggregate_all(data.database, cfg, "database");
  const auto query_raw = aggregate_all(data.queries, cfg, "query");

  std::vector<double> maps;
  maps.reserve(dims.size());
  for (std::size_t dim : dims) {
    const auto fit = fit_whitening(whitening_raw, {dim, eps_w, true});
    const auto database = whiten_all(fit.model, database_raw);
    const auto queries = whiten_all(fit.model, query_raw);
    const auto index = build_index(database);
    const auto cases = pair_queries(queries, data.truths);
    maps.push_back(mean_average_precision(index, cases, ap_mode));
  }
  return maps;
}

std::vector<SweepRow> run_alpha_sweep(const ExperimentSpec& spec) {
  const auto data = load_experiment(spec, true, false);
  std::vector<SweepRow> rows;
  for (double alpha : spec.alphas) {
    AggregationConfig cfg;
    cfg.alpha = AlphaFraction{alpha};
    cfg.eps = Epsilon{spec.eps};
    cfg.spatial_mode = SpatialMode::AdaptiveGaussian;
    cfg.channel_mode = spec.sweep_channel_mode;
    cfg.sigma_rule = spec.sigma_rule;
    const auto maps = evaluate_config(data, cfg, spec.dims, spec.eps_w, spec.ap_mode);
    for (std::size_t d = 0; d < spec.dims.size(); ++d) rows.push_back({alpha, spec.dims[d], maps[d]});
  }
  return rows;
}

std::vector<AblationRow> run_ablation(const ExperimentSpec& spec) {
  const auto data = load_experiment(spec, false, true);
  std::vector<AblationRow> rows;
  for (const auto& [spatial, channel] : spec.modes) {
    AggregationConfig cfg;
    cfg.alpha = AlphaFraction{spec.ablation_alpha};
    cfg.eps = Epsilon{spec.eps};
    cfg.spatial_mode = spatial;
    cfg.channel_mode = channel;
    cfg.sigma_rule = spec.sigma_rule;
    const auto maps = evaluate_config(data, cfg, spec.dims, spec.eps_w, spec.ap_mode);
    for (std::size_t d = 0; d < spec.dims.size(); ++d) {
      rows.push_back({spatial, channel, spec.dims[d], maps[d]});
    }
  }
  return rows;
}

namespace {

nlohmann::ordered_json settings_json(const ExperimentSpec& spec) {
  nlohmann::ordered_json s;
  s["eps"] = spec.eps;
  s["eps_w"] = spec.eps_w;
  s["sigma_rule"] = spec.sigma_rule == SigmaRule::Edge ? "edge" : "corner";
  s["ap_mode"] = std::string(to_string(spec.ap_mode));
  s["log_base"] = "e";
  return s;
}

}  // namespace

std::string sweep_json(const std::vector<SweepRow>& rows, const ExperimentSpec& spec) {
  nlohmann::ordered_json j;
  j["experiment"] = "alpha-sweep";
  j["settings"] = settings_json(spec);
  j["settings"]["channel"] = std::string(to_string(spec.sweep_channel_mode));
  auto& out = j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    out.push_back({{"alpha", r.alpha}, {"dim", r.dim}, {"map", r.map}});
  }
  return j.dump(2) + "\n";
}

std::string ablation_json(const std::vector<AblationRow>& rows, const ExperimentSpec& spec) {
  nlohmann::ordered_json j;
  j["experiment"] = "ablation";
  j["settings"] = settings_json(spec);
  j["settings"]["alpha"] = spec.ablation_alpha;
  auto& out = j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    out.push_back({{"spatial", std::string(to_string(r.spatial))},
                   {"channel", std::string(to_string(r.channel))},
                   {"dim", r.dim},
                   {"map", r.map}});
  }
  return j.dump(2) + "\n";
}

std::string sweep_table(const std::vector<SweepRow>& rows) {
  std::string out = fmt::format("{:>8} {:>6} {:>8}\n", "alpha", "dim", "mAP");
  for (const auto& r : rows) out += fmt::format("{:>8.4f} {:>6} {:>8.4f}\n", r.alpha, r.dim, r.map);
  return out;
}

std::string ablation_table(const std::vector<AblationRow>& rows) {
  std::string out = fmt::format("{:>8} {:>8} {:>6} {:>8}\n", "spatial", "channel", "dim", "mAP");
  for (const auto& r : rows) {
    out += fmt::format("{:>8} {:>8} {:>6} {:>8.4f}\n", to_string(r.spatial), to_string(r.channel),
                       r.dim, r.map);
  }
  return out;
}

}  // namespace deepagg
