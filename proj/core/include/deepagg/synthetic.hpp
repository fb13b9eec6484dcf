#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "deepagg/retrieval.hpp"
#include "deepagg/types.hpp"

namespace deepagg {

/// Planted retrieval benchmark. Each class owns a few "signature" channels
/// that fire on a compact object blob at a random grid position; the
/// remaining channels form a shared pool. In the bursty variant every image
/// also fires one pool channel at nearly every cell, so unweighted sum
/// pooling is dominated by a channel unrelated to the class.
struct SyntheticOptions {
  std::size_t channels = 16;
  std::size_t height = 5;
  std::size_t width = 5;
  std::size_t classes = 3;
  std::size_t images_per_class = 10;
  std::size_t signature_channels = 3;
  bool bursty = true;
  /// Disjoint whitening set: landmarks draw signature channels at random.
  std::size_t whitening_landmarks = 40;
  std::size_t whitening_images_per_landmark = 3;
  std::uint64_t seed = 2018;
};

struct SyntheticDataset {
  std::vector<FeatureTensor> database;   // ids "c<class>_<n>"
  std::vector<FeatureTensor> whitening;  // ids "w<landmark>_<n>"
  /// Every database image is a query; its own image is junk, the rest of its
  /// class is good.
  std::vector<QueryGroundTruth> truths;
};

/// Throws InvalidArgument when the signature channels do not fit (bursty
/// variant needs at least one pool channel).
SyntheticDataset generate_synthetic(const SyntheticOptions& options);

/// Layout under dir: database/*.dft, whitening/*.dft, database.tsv,
/// queries.tsv (same files as the database), whitening.tsv, gt/.
void write_synthetic(const SyntheticDataset& dataset, const std::filesystem::path& dir);

}  // namespace deepagg
