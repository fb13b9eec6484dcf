#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "deepagg/types.hpp"

namespace deepagg {

/// DSC1 layout: "DSC1", u32 count, u32 dim, then per record u16 id length,
/// UTF-8 id bytes, dim f32 values; all little-endian.
std::vector<char> encode_descriptors(std::span<const GlobalDescriptor> descriptors);

/// Values are widened to double and renormalized, so loaded descriptors
/// meet the unit-norm invariant again after the f32 round trip. The file
/// carries no stage tag; the caller states it. Throws MalformedFile.
std::vector<GlobalDescriptor> decode_descriptors(std::span<const char> bytes,
                                                 DescriptorStage stage);

void save_descriptors(std::span<const GlobalDescriptor> descriptors,
                      const std::filesystem::path& path);
std::vector<GlobalDescriptor> load_descriptors(
    const std::filesystem::path& path, DescriptorStage stage = DescriptorStage::RawNormalized);

}  // namespace deepagg
