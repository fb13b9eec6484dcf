#include "commands.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <memory>

#include "deepagg/aggregation.hpp"
#include "deepagg/descriptor_io.hpp"
#include "deepagg/experiment.hpp"
#include "deepagg/retrieval.hpp"
#include "deepagg/synthetic.hpp"
#include "deepagg/tensor_io.hpp"
#include "deepagg/viz.hpp"
#include "deepagg/whitening.hpp"

namespace deepagg::cli {

namespace {

using json = nlohmann::ordered_json;

const std::map<std::string, SigmaRule> kSigmaRules{{"edge", SigmaRule::Edge},
                                                   {"corner", SigmaRule::Corner}};

void emit_json(const json& j) { std::cout << j.dump(2) << "\n"; }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw Error(ErrorCode::IoFailure, "write failed for '" + path.string() + "'");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, "cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<QueryGroundTruth> load_truths(const std::filesystem::path& p) {
  return std::filesystem::is_directory(p) ? load_oxford_ground_truth(p) : load_list_ground_truth(p);
}

// Options shared by every command that aggregates tensors.
struct AggregationOptions {
  double alpha = 0.1;
  double eps = Epsilon::kDefault;
  std::string spatial = "agauss";
  std::string channel = "echan";
  std::string sigma_rule = "edge";

  void add_to(CLI::App* cmd) {
    cmd->add_option("--alpha", alpha, "Fraction of top responses locating the Gaussian center")
        ->capture_default_str();
    cmd->add_option("--eps", eps, "Channel-weighting stabilizer")->capture_default_str();
    cmd->add_option("--spatial", spatial, "Spatial weighting")
        ->check(CLI::IsMember({"none", "agauss", "ngauss"}))
        ->capture_default_str();
    cmd->add_option("--channel", channel, "Channel weighting")
        ->check(CLI::IsMember({"none", "echan", "schan"}))
        ->capture_default_str();
    cmd->add_option("--sigma-rule", sigma_rule, "Gaussian width rule")
        ->check(CLI::IsMember({"edge", "corner"}))
        ->capture_default_str();
  }

  AggregationConfig config() const {
    AggregationConfig cfg;
    cfg.alpha = AlphaFraction{alpha};
    cfg.eps = Epsilon{eps};
    cfg.spatial_mode = parse_spatial_mode(spatial);
    cfg.channel_mode = parse_channel_mode(channel);
    cfg.sigma_rule = kSigmaRules.at(sigma_rule);
    return cfg;
  }
};

void add_aggregate(CLI::App& app) {
  struct Args {
    std::filesystem::path manifest, out, whitening;
    AggregationOptions agg;
    bool json = false;
  };
  auto args = std::make_shared<Args>();
  auto* cmd = app.add_subcommand("aggregate", "Aggregate every tensor of a manifest into descriptors");
  cmd->add_option("--manifest", args->manifest, "Manifest (image_id<TAB>path)")->required();
  cmd->add_option("--out", args->out, "Output descriptor file (DSC1)")->required();
  cmd->add_option("--whitening", args->whitening, "Whitening model (WHM1); whitens the output");
  args->agg.add_to(cmd);
  cmd->add_flag("--json", args->json, "Machine-readable summary");

  cmd->callback([args] {
    const auto cfg = args->agg.config();
    const auto manifest = load_manifest(args->manifest);
    std::optional<WhiteningModel> model;
    if (!args->whitening.empty()) model = load_model(args->whitening);
    const auto result = aggregate_batch(manifest, cfg, model ? &*model : nullptr);
    save_descriptors(result.descriptors, args->out);

    if (args->json) {
      json j;
      j["descriptors"] = result.descriptors.size();
      j["dim"] = result.descriptors.empty() ? 0 : result.descriptors.front().dim();
      j["stage"] = model ? "whitened-normalized" : "raw-normalized";
      j["spatial"] = std::string(to_string(cfg.spatial_mode));
      j["channel"] = std::string(to_string(cfg.channel_mode));
      j["alpha"] = cfg.alpha.value();
      j["eps"] = cfg.eps.value();
      j["log_base"] = "e";
      auto& failures = j["failures"] = json::array();
      for (const auto& f : result.failures) {
        failures.push_back({{"image_id", f.image_id},
                            {"error", std::string(to_string(f.code))},
                            {"message", f.message}});
      }
      emit_json(j);
    } else {
      for (const auto& f : result.failures) std::cerr << "skipped " << f.image_id << ": " << f.message << "\n";
      std::cout << fmt::format("wrote {} descriptors ({} failed) to {}\n", result.descriptors.size(),
                               result.failures.size(), args->out.string());
    }
    if (result.descriptors.empty() && !manifest.empty()) {
      throw Error(ErrorCode::DegenerateDescriptor, "no image produced a descriptor");
    }
  });
}

void add_whiten_train(CLI::App& app) {
  struct Args {
    std::filesystem::path descriptors, out;
    std::size_t dim = 512;
    double eps_w = 1e-8;
    bool no_scale = false;
    bool json = false;
  };
  auto args = std::make_shared<Args>();
  auto* cmd = app.add_subcommand("whiten-train", "Fit PCA whitening on raw-normalized descriptors");
  cmd->add_option("--descriptors", args->descriptors, "Training descriptors (DSC1)")->required();
  cmd->add_option("--dim", args->dim, "Output dimensionality (0 = input dimensionality)")->capture_default_str();
  cmd->add_option("--eps-w", args->eps_w, "Eigenvalue regularizer")->capture_default_str();
  cmd->add_flag("--no-whiten-scale", args->no_scale, "Plain PCA: rotate and truncate only");
  cmd->add_option("--out", args->out, "Output model (WHM1)")->required();
  cmd->add_flag("--json", args->json, "Machine-readable summary");

  cmd->callback([args] {
    const auto descriptors = load_descriptors(args->descriptors);
    const auto fit = fit_whitening(descriptors, {args->dim, args->eps_w, !args->no_scale});
    save_model(fit.model, args->out);
    if (args->json) {
      json j;
      j["samples"] = descriptors.size();
      j["input_dim"] = fit.model.input_dim;
      j["output_dim"] = fit.model.output_dim;
      j["eigenvalues"] = fit.model.eigenvalues;
      j["warnings"] = fit.warnings;
      emit_json(j);
    } else {
      for (const auto& w : fit.warnings) std::cerr << "warning: " << w << "\n";
      std::cout << fmt::format("fitted {} -> {} whitening on {} descriptors, wrote {}\n",
                               fit.model.input_dim, fit.model.output_dim, descriptors.size(),
                               args->out.string());
    }
  });
}

void add_index(CLI::App& app) {
  struct Args {
    std::vector<std::filesystem::path> inputs;
    std::filesystem::path out;
    bool json = false;
  };
  auto args = std::make_shared<Args>();
  auto* cmd = app.add_subcommand("index", "Validate and merge descriptor files into one index file");
  cmd->add_option("--descriptors", args->inputs, "Descriptor files (DSC1)")->required();
  cmd->add_option("--out", args->out, "Merged index (DSC1)")->required();
  cmd->add_flag("--json", args->json, "Machine-readable summary");

  cmd->callback([args] {
    std::vector<GlobalDescriptor> all;
    for (const auto& p : args->inputs) {
      auto part = load_descriptors(p);
      all.insert(all.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
    const auto index = build_index(all);
    save_descriptors(all, args->out);
    if (args->json) {
      emit_json({{"size", index.size()}, {"dim", index.dim()}});
    } else {
      std::cout << fmt::format("index: {} descriptors of dim {}\n", index.size(), index.dim());
    }
  });
}

void add_search(CLI::App& app) {
  struct Args {
    std::filesystem::path index, queries;
    std::string query_id;
    std::size_t top = 10;
    bool json = false;
  };
  auto args = std::make_shared<Args>();
  auto* cmd = app.add_subcommand("search", "Rank the index for each query descriptor");
  cmd->add_option("--index", args->index, "Database descriptors (DSC1)")->required();
  cmd->add_option("--queries", args->queries, "Query descriptors (DSC1)")->required();
  cmd->add_option("--query-id", args->query_id, "Only this query");
  cmd->add_option("--top", args->top, "Results per query (0 = all)")->capture_default_str();
  cmd->add_flag("--json", args->json, "Machine-readable output");

  cmd->callback([args] {
    const auto database = load_descriptors(args->index);
    const auto index = build_index(database);
    const auto queries = load_descriptors(args->queries);
    json j = json::array();
    bool matched = false;
    for (const auto& q : queries) {
      if (!args->query_id.empty() && q.image_id() != args->query_id) continue;
      matched = true;
      auto ranking = search(index, q);
      if (args->top > 0 && ranking.size() > args->top) ranking.resize(args->top);
      if (args->json) {
        json results = json::array();
        for (const auto& r : ranking) results.push_back({{"image_id", r.image_id}, {"score", r.score}});
        j.push_back({{"query", q.image_id()}, {"results", results}});
      } else {
        std::cout << q.image_id() << "\n";
        for (std::size_t r = 0; r < ranking.size(); ++r) {
          std::cout << fmt::format("  {:>4} {:>10.6f} {}\n", r + 1, ranking[r].score, ranking[r].image_id);
        }
      }
    }
    if (!matched) throw Error(ErrorCode::InvalidArgument, "no query matched '" + args->query_id + "'");
    if (args->json) emit_json(j);
  });
}

void add_evaluate(CLI::App& app) {
  struct Args {
    std::filesystem::path index, queries, gt;
    std::string mode = "trapezoid";
    bool json = false;
  };
  auto args = std::make_shared<Args>();
  auto* cmd = app.add_subcommand("evaluate", "Compute per-query AP and mAP");
  cmd->add_option("--index", args->index, "Database descriptors (DSC1)")->required();
  cmd->add_option("--queries", args->queries, "Query descriptors (DSC1)")->required();
  cmd->add_option("--gt", args->gt, "Oxford-layout ground-truth directory or list file")->required();
  cmd->add_option("--ap-mode", args->mode, "AP accumulation")
      ->check(CLI::IsMember({"trapezoid", "standard"}))
      ->capture_default_str();
  cmd->add_flag("--json", args->json, "Machine-readable output");

  cmd->callback([args] {
    const auto database = load_descriptors(args->index);
    const auto index = build_index(database);
    const auto queries = load_descriptors(args->queries);
    const auto truths = load_truths(args->gt);
    const auto cases = pair_queries(queries, truths);
    const ApMode mode = parse_ap_mode(args->mode);
    const auto report = evaluate(index, cases, mode);
    if (args->json) {
      json j;
      j["ap_mode"] = args->mode;
      auto& per = j["queries"] = json::array();
      for (const auto& s : report.per_query) per.push_back({{"query", s.query_id}, {"ap", s.ap}});
      j["map"] = report.map;
      emit_json(j);
    } else {
      for (const auto& s : report.per_query) std::cout << fmt::format("{:<32} {:.4f}\n", s.query_id, s.ap);
      std::cout << fmt::format("mAP {:.4f}\n", report.map);
    }
  });
}

// Dataset flags shared by the two experiment harnesses.
struct ExperimentArgs {
  ExperimentSpec spec;
  std::string channel = "none";
  std::string sigma_rule = "edge";
  std::string ap_mode = "trapezoid";
  std::filesystem::path out;
  bool json = false;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--database", spec.database_manifest, "Database manifest")->required();
    cmd->add_option("--queries", spec.query_manifest, "Query manifest")->required();
    cmd->add_option("--whitening-set", spec.whitening_manifest, "Whitening manifest")->required();
    cmd->add_option("--gt", spec.ground_truth, "Ground-truth directory or list file")->required();
    cmd->add_option("--dims", spec.dims, "Whitened dimensionalities")->delimiter(',')->required();
    cmd->add_option("--eps", spec.eps, "Channel-weighting stabilizer")->capture_default_str();
    cmd->add_option("--eps-w", spec.eps_w, "Whitening regularizer")->capture_default_str();
    cmd->add_option("--sigma-rule", sigma_rule, "Gaussian width rule")
        ->check(CLI::IsMember({"edge", "corner"}))
        ->capture_default_str();
    cmd->add_option("--ap-mode", ap_mode, "AP accumulation")
        ->check(CLI::IsMember({"trapezoid", "standard"}))
        ->capture_default_str();
    cmd->add_option("--out", out, "Also write the JSON result here");
    cmd->add_flag("--json", json, "Print JSON instead of a table");
  }

  void resolve() {
    spec.sigma_rule = kSigmaRules.at(sigma_rule);
    spec.ap_mode = parse_ap_mode(ap_mode);
  }

  void report(const std::string& json_text, const std::string& table) const {
    if (!out.empty()) write_text(out, json_text);
    std::cout << (json ? json_text : table);
  }
};

void add_sweep(CLI::App& app) {
  auto args = std::make_shared<ExperimentArgs>();
  auto* cmd = app.add_subcommand("sweep-alpha", "mAP for every (alpha, dim) with adaptive Gaussian weighting");
  args->add_to(cmd);
  cmd->add_option("--alphas", args->spec.alphas, "Alpha values")->delimiter(',')->required();
  cmd->add_option("--channel", args->channel, "Channel weighting applied during the sweep")
      ->check(CLI::IsMember({"none", "echan", "schan"}))
      ->capture_default_str();
  cmd->callback([args] {
    args->resolve();
    args->spec.sweep_channel_mode = parse_channel_mode(args->channel);
    const auto rows = run_alpha_sweep(args->spec);
    args->report(sweep_json(rows, args->spec), sweep_table(rows));
  });
}

void add_ablate(CLI::App& app) {
  auto args = std::make_shared<ExperimentArgs>();
  auto full = std::make_shared<bool>(false);
  auto* cmd = app.add_subcommand("ablate", "mAP for the spatial x channel weighting combinations");
  args->add_to(cmd);
  cmd->add_option("--alpha", args->spec.ablation_alpha, "Alpha for adaptive Gaussian cells")
      ->capture_default_str();
  cmd->add_flag("--full", *full, "Run all nine combinations instead of the default six");
  cmd->callback([args, full] {
    args->resolve();
    args->spec.modes = *full ? full_ablation_modes() : default_ablation_modes();
    const auto rows = run_ablation(args->spec);
    args->report(ablation_json(rows, args->spec), ablation_table(rows));
  });
}

void add_viz(CLI::App& app) {
  auto* viz = app.add_subcommand("viz", "Heat maps, channel vectors and correlation matrices");
  viz->require_subcommand(1);

  {
    struct Args {
      std::filesystem::path tensor, out;
      double alpha = 0.1;
      std::string map = "response";
      std::size_t scale = 16;
      std::string sigma_rule = "edge";
      bool no_center = false;
      bool json = false;
    };
    auto args = std::make_shared<Args>();
    auto* cmd = viz->add_subcommand("heatmap", "Render a map of one tensor as a PPM image");
    cmd->add_option("--tensor", args->tensor, "Tensor file (DFT1 or NPY)")->required();
    cmd->add_option("--alpha", args->alpha, "Alpha for the adaptive center")->capture_default_str();
    cmd->add_option("--map", args->map, "response: summed responses; gaussian: weights; weighted: product")
        ->check(CLI::IsMember({"response", "gaussian", "weighted"}))
        ->capture_default_str();
    cmd->add_option("--scale", args->scale, "Pixels per cell")->capture_default_str();
    cmd->add_option("--sigma-rule", args->sigma_rule, "Gaussian width rule")
        ->check(CLI::IsMember({"edge", "corner"}))
        ->capture_default_str();
    cmd->add_flag("--no-center", args->no_center, "Omit the center marker");
    cmd->add_option("--out", args->out, "Output PPM")->required();
    cmd->add_flag("--json", args->json, "Machine-readable summary");
    cmd->callback([args] {
      const auto tensor = load_tensor(args->tensor);
      const AlphaFraction alpha{args->alpha};
      const auto response = response_map(tensor);
      const auto center = select_center(response, alpha);
      const auto gaussian = gaussian_map(
          tensor.height(), tensor.width(),
          {center, default_sigma(tensor.height(), tensor.width(), kSigmaRules.at(args->sigma_rule))});
      const SpatialMap shown = args->map == "response"   ? response
                               : args->map == "gaussian" ? gaussian
                                                         : weighted_response(response, gaussian);
      const auto image = render_heatmap(
          shown, args->no_center ? std::nullopt : std::optional<GridPoint>(center), args->scale);
      write_ppm(image, args->out);
      if (args->json) {
        emit_json({{"center", {center.i, center.j}},
                   {"width", image.width},
                   {"height", image.height},
                   {"out", args->out.string()}});
      } else {
        std::cout << fmt::format("center ({:.3f}, {:.3f}); wrote {}x{} {}\n", center.i, center.j,
                                 image.width, image.height, args->out.string());
      }
    });
  }

  {
    struct Args {
      std::filesystem::path manifest, out;
      std::string kind = "b";
      AggregationOptions agg;
      bool json = false;
    };
    auto args = std::make_shared<Args>();
    auto* cmd = viz->add_subcommand("vectors", "Export per-image channel vectors as CSV files");
    cmd->add_option("--manifest", args->manifest, "Manifest of tensors")->required();
    cmd->add_option("--kind", args->kind,
                    "b: element-value items; q: sparsity items; B: element-value weights; S: sparsity weights")
        ->check(CLI::IsMember({"b", "q", "B", "S"}))
        ->capture_default_str();
    args->agg.add_to(cmd);
    cmd->add_option("--out", args->out, "Output directory")->required();
    cmd->add_flag("--json", args->json, "Machine-readable summary");
    cmd->callback([args] {
      const auto cfg = args->agg.config();
      const auto manifest = load_manifest(args->manifest);
      std::filesystem::create_directories(args->out);
      for (const auto& entry : manifest.entries) {
        const auto tensor = load_entry(entry);
        ChannelVector v;
        if (args->kind == "q" || args->kind == "S") {
          v = sparsity_items(tensor);
          if (args->kind == "S") v = schannel_weights(v, cfg.eps);
        } else {
          const auto omega = weighted_channel_sums(tensor, spatial_weights(tensor, cfg));
          v = element_value_items(omega, tensor.height(), tensor.width());
          if (args->kind == "B") v = echannel_weights(v, cfg.eps);
        }
        write_text(args->out / (entry.image_id + ".csv"), vector_csv(v));
      }
      if (args->json) {
        emit_json({{"vectors", manifest.size()}, {"kind", args->kind}, {"out", args->out.string()}});
      } else {
        std::cout << fmt::format("wrote {} vectors to {}\n", manifest.size(), args->out.string());
      }
    });
  }

  {
    struct Args {
      std::filesystem::path vectors, out;
      std::string metric = "pearson";
      bool json = false;
    };
    auto args = std::make_shared<Args>();
    auto* cmd = viz->add_subcommand("corr", "Pairwise correlation of channel vectors");
    cmd->add_option("--vectors", args->vectors, "Directory of *.csv vectors")->required();
    cmd->add_option("--metric", args->metric, "Correlation measure")
        ->check(CLI::IsMember({"pearson", "cosine"}))
        ->capture_default_str();
    cmd->add_option("--out", args->out, "Output CSV")->required();
    cmd->add_flag("--json", args->json, "Print the matrix as JSON");
    cmd->callback([args] {
      std::vector<std::filesystem::path> files;
      if (!std::filesystem::is_directory(args->vectors)) {
        throw Error(ErrorCode::InvalidArgument, "'" + args->vectors.string() + "' is not a directory");
      }
      for (const auto& e : std::filesystem::directory_iterator(args->vectors)) {
        if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
      }
      std::sort(files.begin(), files.end());
      std::vector<ChannelVector> vectors;
      std::vector<std::string> ids;
      for (const auto& f : files) {
        vectors.push_back(parse_vector_csv(read_text(f)));
        ids.push_back(f.stem().string());
      }
      const auto m = channel_correlation(vectors, ids, parse_correlation_metric(args->metric));
      write_text(args->out, correlation_csv(m));
      if (args->json) {
        json rows = json::array();
        for (std::size_t r = 0; r < m.n; ++r) {
          rows.push_back(std::vector<double>(m.values.begin() + static_cast<std::ptrdiff_t>(r * m.n),
                                             m.values.begin() + static_cast<std::ptrdiff_t>((r + 1) * m.n)));
        }
        emit_json({{"ids", m.ids}, {"metric", args->metric}, {"matrix", rows}});
      } else {
        std::cout << fmt::format("wrote {}x{} {} matrix to {}\n", m.n, m.n, args->metric, args->out.string());
      }
    });
  }
}

void add_gen_synthetic(CLI::App& app) {
  struct Args {
    std::filesystem::path out;
    SyntheticOptions options;
    bool clean = false;
    bool json = false;
  };
  auto args = std::make_shared<Args>();
  auto* cmd = app.add_subcommand("gen-synthetic", "Write the planted synthetic retrieval dataset");
  cmd->add_option("--out", args->out, "Output directory")->required();
  cmd->add_option("--seed", args->options.seed, "Random seed")->capture_default_str();
  cmd->add_option("--channels", args->options.channels, "Channels K")->capture_default_str();
  cmd->add_option("--size", args->options.height, "Grid height and width")->capture_default_str();
  cmd->add_option("--classes", args->options.classes, "Classes")->capture_default_str();
  cmd->add_option("--per-class", args->options.images_per_class, "Images per class")->capture_default_str();
  cmd->add_option("--signature", args->options.signature_channels, "Signature channels per class")
      ->capture_default_str();
  cmd->add_option("--whitening-landmarks", args->options.whitening_landmarks, "Landmarks in the whitening set")
      ->capture_default_str();
  cmd->add_flag("--clean", args->clean, "Omit the bursty channels");
  cmd->add_flag("--json", args->json, "Machine-readable summary");
  cmd->callback([args] {
    auto options = args->options;
    options.width = options.height;
    options.bursty = !args->clean;
    const auto ds = generate_synthetic(options);
    write_synthetic(ds, args->out);
    if (args->json) {
      emit_json({{"database", ds.database.size()},
                 {"whitening", ds.whitening.size()},
                 {"queries", ds.truths.size()},
                 {"bursty", options.bursty},
                 {"out", args->out.string()}});
    } else {
      std::cout << fmt::format("wrote {} database, {} whitening tensors and {} queries to {}\n",
                               ds.database.size(), ds.whitening.size(), ds.truths.size(),
                               args->out.string());
    }
  });
}

}  // namespace

void register_commands(CLI::App& app) {
  add_aggregate(app);
  add_whiten_train(app);
  add_index(app);
  add_search(app);
  add_evaluate(app);
  add_sweep(app);
  add_ablate(app);
  add_viz(app);
  add_gen_synthetic(app);
}

}  // namespace deepagg::cli
