#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "deepagg/types.hpp"

namespace deepagg {

/// Reads a DFT1 or NPY v1.0 tensor, chosen by the file's magic bytes.
/// The returned tensor's image_id is empty; callers attach one.
FeatureTensor load_tensor(const std::filesystem::path& path);

/// Writes DFT1: "DFT1", u32 K, u32 H, u32 W, then K*H*W f32, all little-endian.
void save_tensor(const FeatureTensor& tensor, const std::filesystem::path& path);

/// Decodes DFT1 bytes. Throws MalformedFile on a bad magic or short header
/// and DimensionMismatch when the payload length disagrees with the header.
FeatureTensor decode_dft1(std::span<const char> bytes);
std::vector<char> encode_dft1(const FeatureTensor& tensor);

/// Decodes an NPY v1.0 array of shape (K, H, W), C order, dtype <f4 / <f8
/// (f8 is narrowed to f32).
FeatureTensor decode_npy(std::span<const char> bytes);

enum class ManifestRole { Database, Query, Whitening };

struct ManifestEntry {
  std::string image_id;
  std::filesystem::path path;
  std::optional<ManifestRole> role;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;

  std::size_t size() const noexcept { return entries.size(); }
  bool empty() const noexcept { return entries.empty(); }
};

/// One "image_id<TAB>path[<TAB>role]" line per entry; '#' lines and blank
/// lines are skipped. Relative paths resolve against the manifest's
/// directory. Throws DuplicateId or MissingFile.
DatasetManifest load_manifest(const std::filesystem::path& path);

/// Writes entries with paths as given.
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

/// load_tensor(entry.path) with image_id set to entry.image_id.
FeatureTensor load_entry(const ManifestEntry& entry);

}  // namespace deepagg
