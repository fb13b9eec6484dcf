#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "deepagg/types.hpp"

namespace deepagg {

/// PCA whitening learned on a held-out set of raw-normalized descriptors.
///
/// `projection` is output_dim x input_dim, row-major. Row r is the r-th
/// principal direction (eigenvalues descending) divided by
/// sqrt(eigenvalue_r + eps_w); with plain PCA the rows are left unscaled.
/// Each direction's sign is fixed so its first nonzero component is positive.
struct WhiteningModel {
  std::size_t input_dim = 0;
  std::size_t output_dim = 0;
  double eps_w = 1e-8;
  std::vector<double> mean;
  std::vector<double> eigenvalues;
  std::vector<double> projection;

  friend bool operator==(const WhiteningModel&, const WhiteningModel&) = default;
};

struct WhiteningOptions {
  std::size_t output_dim = 0;  // 0 keeps all K dimensions
  double eps_w = 1e-8;
  bool scale = true;  // false: plain PCA rotation + truncation
};

struct WhiteningFit {
  WhiteningModel model;
  /// Non-fatal findings, e.g. retained eigenvalues below eps_w.
  std::vector<std::string> warnings;
};

/// Throws InsufficientSamples for fewer than two descriptors,
/// DimensionMismatch for mixed dims, InvalidArgument for a whitened input or
/// output_dim above K.
WhiteningFit fit_whitening(std::span<const GlobalDescriptor> descriptors,
                           const WhiteningOptions& options);

/// y = projection * (d - mean), renormalized. Throws ModelDimMismatch or
/// DegenerateDescriptor.
GlobalDescriptor apply_whitening(const WhiteningModel& model, const GlobalDescriptor& descriptor);

/// Un-normalized projection, exposed for covariance checks.
std::vector<double> project(const WhiteningModel& model, std::span<const double> values);

/// WHM1 layout: "WHM1", u32 version (1), u32 K, u32 K', f64 eps_w,
/// mean (K f64), eigenvalues (K' f64), projection (K'*K f64), little-endian.
std::vector<char> encode_model(const WhiteningModel& model);
WhiteningModel decode_model(std::span<const char> bytes);
void save_model(const WhiteningModel& model, const std::filesystem::path& path);
WhiteningModel load_model(const std::filesystem::path& path);

}  // namespace deepagg
