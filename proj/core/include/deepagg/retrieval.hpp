#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "deepagg/types.hpp"

namespace deepagg {

/// Exhaustive cosine-similarity index over unit-norm descriptors.
class DescriptorIndex {
 public:
  static constexpr double kNormTolerance = 1e-6;

  DescriptorIndex() = default;

  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }
  std::size_t dim() const noexcept { return dim_; }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(matrix_).subspan(r * dim_, dim_);
  }

 private:
  friend DescriptorIndex build_index(std::span<const GlobalDescriptor> descriptors);

  std::size_t dim_ = 0;
  std::vector<std::string> ids_;
  std::vector<double> matrix_;  // size() x dim(), row-major
};

/// Throws DimensionMismatch (mixed dims or a row off unit norm by more than
/// kNormTolerance) or DuplicateId.
DescriptorIndex build_index(std::span<const GlobalDescriptor> descriptors);

struct ScoredId {
  std::string image_id;
  double score = 0.0;

  friend bool operator==(const ScoredId&, const ScoredId&) = default;
};

/// Full ranking, scores non-increasing, equal scores ordered by ascending id.
using RankedResult = std::vector<ScoredId>;

RankedResult search(const DescriptorIndex& index, const GlobalDescriptor& query);

struct CropBox {
  double x1 = 0, y1 = 0, x2 = 0, y2 = 0;
};

struct QueryGroundTruth {
  std::string query_id;     // e.g. "all_souls_1"
  std::string query_image;  // source image, "oxc1_" prefix stripped
  std::optional<CropBox> crop;
  std::set<std::string> positives;  // good + ok
  std::set<std::string> junk;
};

enum class ApMode {
  Trapezoid,  // the Oxford benchmark accumulation
  Standard,   // mean of precision at each positive
};

std::string_view to_string(ApMode mode) noexcept;
ApMode parse_ap_mode(std::string_view text);

/// Junk ids are dropped from the ranking before scoring. Throws
/// EmptyPositives when the ground truth has no positives.
double average_precision(std::span<const std::string> ranking, const QueryGroundTruth& gt,
                         ApMode mode = ApMode::Trapezoid);
double average_precision(const RankedResult& ranking, const QueryGroundTruth& gt,
                         ApMode mode = ApMode::Trapezoid);

struct QueryCase {
  GlobalDescriptor descriptor;
  QueryGroundTruth truth;
};

struct QueryScore {
  std::string query_id;
  double ap = 0.0;
};

struct EvaluationReport {
  std::vector<QueryScore> per_query;
  double map = 0.0;
};

/// Searches every query (in parallel) and averages the per-query APs.
/// Throws InvalidArgument when there are no queries.
EvaluationReport evaluate(const DescriptorIndex& index, std::span<const QueryCase> queries,
                          ApMode mode = ApMode::Trapezoid);

double mean_average_precision(const DescriptorIndex& index, std::span<const QueryCase> queries,
                              ApMode mode = ApMode::Trapezoid);

/// Pairs each ground-truth query with the descriptor whose id equals its
/// query_id, or failing that its query_image. Throws MalformedGroundTruth
/// when neither is present.
std::vector<QueryCase> pair_queries(std::span<const GlobalDescriptor> descriptors,
                                    std::span<const QueryGroundTruth> truths);

/// Standard Oxford/Paris layout: <name>_query.txt ("<image> x1 y1 x2 y2"),
/// <name>_good.txt, <name>_ok.txt, <name>_junk.txt, one image name per line.
/// Queries are returned sorted by name. Throws MalformedGroundTruth.
std::vector<QueryGroundTruth> load_oxford_ground_truth(const std::filesystem::path& dir);

/// Writes the same layout (empty ok file); used by the synthetic generator.
void save_oxford_ground_truth(std::span<const QueryGroundTruth> truths,
                              const std::filesystem::path& dir);

/// Flat list form for datasets without the Oxford layout (e.g. Holidays):
/// "query_id<TAB>positives<TAB>junk", ids space-separated, junk optional.
std::vector<QueryGroundTruth> load_list_ground_truth(const std::filesystem::path& path);

}  // namespace deepagg
