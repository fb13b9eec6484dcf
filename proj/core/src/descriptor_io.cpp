#include "deepagg/descriptor_io.hpp"

#include <cmath>
#include <limits>

#include "binary_io.hpp"
#include "deepagg/error.hpp"

namespace deepagg {

namespace {
constexpr std::string_view kMagic = "DSC1";
}

std::vector<char> encode_descriptors(std::span<const GlobalDescriptor> descriptors) {
  const std::size_t dim = descriptors.empty() ? 0 : descriptors.front().dim();
  detail::ByteWriter w;
  w.bytes(kMagic);
  w.u32(static_cast<std::uint32_t>(descriptors.size()));
  w.u32(static_cast<std::uint32_t>(dim));
  for (const auto& d : descriptors) {
    if (d.dim() != dim) {
      throw Error(ErrorCode::DimensionMismatch, "descriptor '" + d.image_id() + "' has dim " +
                                                    std::to_string(d.dim()) + ", file dim is " +
                                                    std::to_string(dim));
    }
    if (d.image_id().size() > std::numeric_limits<std::uint16_t>::max()) {
      throw Error(ErrorCode::InvalidArgument, "image id longer than 65535 bytes");
    }
    w.u16(static_cast<std::uint16_t>(d.image_id().size()));
    w.bytes(d.image_id());
    for (double v : d.values()) w.f32(static_cast<float>(v));
  }
  return w.data();
}

std::vector<GlobalDescriptor> decode_descriptors(std::span<const char> bytes,
                                                 DescriptorStage stage) {
  detail::ByteReader r(bytes, "DSC1");
  if (r.remaining() < kMagic.size() || r.bytes(kMagic.size()) != kMagic) {
    throw Error(ErrorCode::MalformedFile, "missing DSC1 magic");
  }
  const std::uint32_t count = r.u32();
  const std::uint32_t dim = r.u32();
  std::vector<GlobalDescriptor> out;
  out.reserve(count);
  for (std::uint32_t n = 0; n < count; ++n) {
    const std::uint16_t len = r.u16();
    std::string id(r.bytes(len));
    std::vector<double> values(dim);
    for (auto& v : values) {
      v = r.f32();
      if (!std::isfinite(v)) throw Error(ErrorCode::MalformedFile, "non-finite descriptor value");
    }
    try {
      out.push_back(GlobalDescriptor::normalized(std::move(values), std::move(id), stage));
    } catch (const Error& e) {
      throw Error(ErrorCode::MalformedFile, e.what());
    }
  }
  if (r.remaining() != 0) throw Error(ErrorCode::MalformedFile, "trailing bytes after DSC1 records");
  return out;
}

void save_descriptors(std::span<const GlobalDescriptor> descriptors,
                      const std::filesystem::path& path) {
  detail::write_file(path, encode_descriptors(descriptors));
}

std::vector<GlobalDescriptor> load_descriptors(const std::filesystem::path& path,
                                               DescriptorStage stage) {
  return decode_descriptors(detail::read_file(path), stage);
}

}  // namespace deepagg
