#include "deepagg/retrieval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "binary_io.hpp"
#include "deepagg/error.hpp"
#include "deepagg/parallel.hpp"

namespace deepagg {

DescriptorIndex build_index(std::span<const GlobalDescriptor> descriptors) {
  DescriptorIndex index;
  if (descriptors.empty()) return index;
  index.dim_ = descriptors.front().dim();
  index.ids_.reserve(descriptors.size());
  index.matrix_.reserve(descriptors.size() * index.dim_);
  std::unordered_set<std::string> seen;
  for (const auto& d : descriptors) {
    if (d.dim() != index.dim_) {
      throw Error(ErrorCode::DimensionMismatch, "descriptor '" + d.image_id() + "' has dim " +
                                                    std::to_string(d.dim()) + ", index dim is " +
                                                    std::to_string(index.dim_));
    }
    if (std::abs(l2_norm(d.values()) - 1.0) > DescriptorIndex::kNormTolerance) {
      throw Error(ErrorCode::DimensionMismatch, "descriptor '" + d.image_id() + "' is not unit norm");
    }
    if (!seen.insert(d.image_id()).second) {
      throw Error(ErrorCode::DuplicateId, "duplicate image id '" + d.image_id() + "' in index");
    }
    index.ids_.push_back(d.image_id());
    index.matrix_.insert(index.matrix_.end(), d.values().begin(), d.values().end());
  }
  return index;
}

RankedResult search(const DescriptorIndex& index, const GlobalDescriptor& query) {
  if (!index.empty() && query.dim() != index.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "query dim " + std::to_string(query.dim()) +
                                                  " differs from index dim " +
                                                  std::to_string(index.dim()));
  }
  const auto q = query.values();
  RankedResult result(index.size());
  for (std::size_t r = 0; r < index.size(); ++r) {
    const auto row = index.row(r);
    double dot = 0.0;
    for (std::size_t c = 0; c < row.size(); ++c) dot += row[c] * q[c];
    result[r] = {index.ids()[r], dot};
  }
  std::sort(result.begin(), result.end(), [](const ScoredId& a, const ScoredId& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.image_id < b.image_id;
  });
  return result;
}

std::string_view to_string(ApMode mode) noexcept {
  return mode == ApMode::Trapezoid ? "trapezoid" : "standard";
}

ApMode parse_ap_mode(std::string_view text) {
  if (text == "trapezoid") return ApMode::Trapezoid;
  if (text == "standard") return ApMode::Standard;
  throw Error(ErrorCode::InvalidArgument, "unknown AP mode '" + std::string(text) + "'");
}

double average_precision(std::span<const std::string> ranking, const QueryGroundTruth& gt,
                         ApMode mode) {
  if (gt.positives.empty()) {
    throw Error(ErrorCode::EmptyPositives, "query '" + gt.query_id + "' has no positives");
  }
  const double total = static_cast<double>(gt.positives.size());
  std::size_t hits = 0;
  std::size_t rank = 0;  // position in the junk-filtered ranking
  double ap = 0.0;
  double prev_recall = 0.0;
  double prev_precision = 1.0;

  for (const auto& id : ranking) {
    if (gt.junk.contains(id)) continue;
    ++rank;
    const bool positive = gt.positives.contains(id);
    if (positive) ++hits;
    const double precision = static_cast<double>(hits) / static_cast<double>(rank);
    if (mode == ApMode::Standard) {
      if (positive) ap += precision;
    } else {
      const double recall = static_cast<double>(hits) / total;
      ap += (recall - prev_recall) * ((prev_precision + precision) / 2.0);
      prev_recall = recall;
      prev_precision = precision;
    }
  }
  return mode == ApMode::Standard ? ap / total : ap;
}

double average_precision(const RankedResult& ranking, const QueryGroundTruth& gt, ApMode mode) {
  std::vector<std::string> ids;
  ids.reserve(ranking.size());
  for (const auto& r : ranking) ids.push_back(r.image_id);
  return average_precision(ids, gt, mode);
}

EvaluationReport evaluate(const DescriptorIndex& index, std::span<const QueryCase> queries,
                          ApMode mode) {
  if (queries.empty()) throw Error(ErrorCode::InvalidArgument, "evaluation needs >= 1 query");
  EvaluationReport report;
  report.per_query.resize(queries.size());
  std::vector<std::optional<Error>> errors(queries.size());
  parallel_for(queries.size(), [&](std::size_t q) {
    try {
      const auto ranking = search(index, queries[q].descriptor);
      report.per_query[q] = {queries[q].truth.query_id,
                             average_precision(ranking, queries[q].truth, mode)};
    } catch (const Error& e) {
      errors[q] = e;
    }
  });
  for (auto& e : errors) {
    if (e) throw *e;
  }
  double sum = 0.0;
  for (const auto& s : report.per_query) sum += s.ap;
  report.map = sum / static_cast<double>(queries.size());
  return report;
}

double mean_average_precision(const DescriptorIndex& index, std::span<const QueryCase> queries,
                              ApMode mode) {
  return evaluate(index, queries, mode).map;
}

std::vector<QueryCase> pair_queries(std::span<const GlobalDescriptor> descriptors,
                                    std::span<const QueryGroundTruth> truths) {
  std::unordered_map<std::string, const GlobalDescriptor*> by_id;
  for (const auto& d : descriptors) by_id.emplace(d.image_id(), &d);
  std::vector<QueryCase> cases;
  cases.reserve(truths.size());
  for (const auto& gt : truths) {
    auto it = by_id.find(gt.query_id);
    if (it == by_id.end()) it = by_id.find(gt.query_image);
    if (it == by_id.end()) {
      throw Error(ErrorCode::MalformedGroundTruth,
                  "no query descriptor for '" + gt.query_id + "' (image '" + gt.query_image + "')");
    }
    cases.push_back({*it->second, gt});
  }
  return cases;
}

namespace {

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::MalformedGroundTruth, "missing ground-truth file '" + path.string() + "'");
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

std::string strip_prefix(std::string name) {
  constexpr std::string_view kPrefix = "oxc1_";
  if (name.starts_with(kPrefix)) name.erase(0, kPrefix.size());
  return name;
}

void check_truth(const QueryGroundTruth& gt) {
  if (gt.positives.empty()) {
    throw Error(ErrorCode::MalformedGroundTruth, "query '" + gt.query_id + "' has no positives");
  }
  for (const auto& id : gt.positives) {
    if (gt.junk.contains(id)) {
      throw Error(ErrorCode::MalformedGroundTruth,
                  "query '" + gt.query_id + "' lists '" + id + "' as both positive and junk");
    }
  }
}

}  // namespace

std::vector<QueryGroundTruth> load_oxford_ground_truth(const std::filesystem::path& dir) {
  constexpr std::string_view kSuffix = "_query.txt";
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::MalformedGroundTruth, "'" + dir.string() + "' is not a directory");
  }
  std::vector<std::string> names;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const auto file = entry.path().filename().string();
    if (entry.is_regular_file() && file.size() > kSuffix.size() && file.ends_with(kSuffix)) {
      names.push_back(file.substr(0, file.size() - kSuffix.size()));
    }
  }
  std::sort(names.begin(), names.end());
  if (names.empty()) {
    throw Error(ErrorCode::MalformedGroundTruth, "no *_query.txt files in '" + dir.string() + "'");
  }

  std::vector<QueryGroundTruth> out;
  for (const auto& name : names) {
    QueryGroundTruth gt;
    gt.query_id = name;
    const auto query_lines = read_lines(dir / (name + "_query.txt"));
    if (query_lines.empty()) {
      throw Error(ErrorCode::MalformedGroundTruth, "empty query file for '" + name + "'");
    }
    std::istringstream qs(query_lines.front());
    std::string image;
    qs >> image;
    gt.query_image = strip_prefix(image);
    CropBox box;
    if (qs >> box.x1 >> box.y1 >> box.x2 >> box.y2) {
      gt.crop = box;
    } else if (!qs.eof()) {
      throw Error(ErrorCode::MalformedGroundTruth, "bad crop coordinates for '" + name + "'");
    }
    for (auto& id : read_lines(dir / (name + "_good.txt"))) gt.positives.insert(std::move(id));
    for (auto& id : read_lines(dir / (name + "_ok.txt"))) gt.positives.insert(std::move(id));
    for (auto& id : read_lines(dir / (name + "_junk.txt"))) gt.junk.insert(std::move(id));
    check_truth(gt);
    out.push_back(std::move(gt));
  }
  return out;
}

void save_oxford_ground_truth(std::span<const QueryGroundTruth> truths,
                              const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const std::string& file, const std::string& text) {
    detail::write_file(dir / file, std::span<const char>(text.data(), text.size()));
  };
  auto join = [](const std::set<std::string>& ids) {
    std::string text;
    for (const auto& id : ids) text += id + "\n";
    return text;
  };
  for (const auto& gt : truths) {
    std::ostringstream q;
    q << gt.query_image;
    if (gt.crop) q << ' ' << gt.crop->x1 << ' ' << gt.crop->y1 << ' ' << gt.crop->x2 << ' ' << gt.crop->y2;
    q << '\n';
    write(gt.query_id + "_query.txt", q.str());
    write(gt.query_id + "_good.txt", join(gt.positives));
    write(gt.query_id + "_ok.txt", "");
    write(gt.query_id + "_junk.txt", join(gt.junk));
  }
}

std::vector<QueryGroundTruth> load_list_ground_truth(const std::filesystem::path& path) {
  std::vector<QueryGroundTruth> out;
  for (const auto& line : read_lines(path)) {
    if (line.front() == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, '\t')) fields.push_back(field);
    if (fields.size() < 2 || fields.size() > 3 || fields[0].empty()) {
      throw Error(ErrorCode::MalformedGroundTruth, "bad ground-truth line '" + line + "'");
    }
    QueryGroundTruth gt;
    gt.query_id = fields[0];
    gt.query_image = fields[0];
    auto split = [](const std::string& text, std::set<std::string>& into) {
      std::istringstream is(text);
      std::string id;
      while (is >> id) into.insert(id);
    };
    split(fields[1], gt.positives);
    if (fields.size() == 3) split(fields[2], gt.junk);
    check_truth(gt);
    out.push_back(std::move(gt));
  }
  return out;
}

}  // namespace deepagg
