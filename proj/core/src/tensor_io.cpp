#include "deepagg/tensor_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "binary_io.hpp"
#include "deepagg/error.hpp"

namespace deepagg {

namespace detail {

std::vector<char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, "cannot open '" + path.string() + "'");
  std::vector<char> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::IoFailure, "read failed for '" + path.string() + "'");
  return data;
}

void write_file(const std::filesystem::path& path, std::span<const char> data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open '" + path.string() + "' for writing");
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  out.flush();
  if (!out) throw Error(ErrorCode::IoFailure, "write failed for '" + path.string() + "'");
}

}  // namespace detail

namespace {

constexpr std::string_view kDftMagic = "DFT1";
constexpr std::string_view kNpyMagic = "\x93NUMPY";

// Extracts the value following 'key': in a python dict literal.
std::string npy_field(const std::string& header, const std::string& key) {
  const auto pos = header.find("'" + key + "'");
  if (pos == std::string::npos) {
    throw Error(ErrorCode::MalformedFile, "npy header lacks '" + key + "'");
  }
  auto colon = header.find(':', pos);
  if (colon == std::string::npos) throw Error(ErrorCode::MalformedFile, "npy header syntax");
  auto start = colon + 1;
  while (start < header.size() && std::isspace(static_cast<unsigned char>(header[start]))) ++start;
  if (start >= header.size()) throw Error(ErrorCode::MalformedFile, "npy header syntax");
  std::size_t end = start;
  if (header[start] == '\'') {
    end = header.find('\'', start + 1);
    if (end == std::string::npos) throw Error(ErrorCode::MalformedFile, "npy header syntax");
    return header.substr(start + 1, end - start - 1);
  }
  if (header[start] == '(') {
    end = header.find(')', start);
    if (end == std::string::npos) throw Error(ErrorCode::MalformedFile, "npy header syntax");
    return header.substr(start, end - start + 1);
  }
  end = header.find_first_of(",}", start);
  if (end == std::string::npos) throw Error(ErrorCode::MalformedFile, "npy header syntax");
  auto value = header.substr(start, end - start);
  while (!value.empty() && std::isspace(static_cast<unsigned char>(value.back()))) value.pop_back();
  return value;
}

std::vector<std::size_t> parse_shape(const std::string& tuple) {
  std::vector<std::size_t> shape;
  std::string inner = tuple.substr(1, tuple.size() - 2);
  std::stringstream ss(inner);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto first = item.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    auto last = item.find_last_not_of(" \t");
    item = item.substr(first, last - first + 1);
    if (item.empty() || !std::all_of(item.begin(), item.end(),
                                     [](unsigned char c) { return std::isdigit(c); })) {
      throw Error(ErrorCode::MalformedFile, "npy shape entry '" + item + "'");
    }
    shape.push_back(std::stoull(item));
  }
  return shape;
}

}  // namespace

std::vector<char> encode_dft1(const FeatureTensor& tensor) {
  detail::ByteWriter w;
  w.bytes(kDftMagic);
  w.u32(static_cast<std::uint32_t>(tensor.channels()));
  w.u32(static_cast<std::uint32_t>(tensor.height()));
  w.u32(static_cast<std::uint32_t>(tensor.width()));
  for (float v : tensor.values()) w.f32(v);
  return w.data();
}

FeatureTensor decode_dft1(std::span<const char> bytes) {
  detail::ByteReader r(bytes, "DFT1");
  if (r.remaining() < kDftMagic.size() || r.bytes(kDftMagic.size()) != kDftMagic) {
    throw Error(ErrorCode::MalformedFile, "missing DFT1 magic");
  }
  const std::uint64_t k = r.u32();
  const std::uint64_t h = r.u32();
  const std::uint64_t w = r.u32();
  if (k == 0 || h == 0 || w == 0) {
    throw Error(ErrorCode::MalformedFile, "DFT1 header has a zero extent");
  }
  const std::uint64_t count = k * h * w;
  if (r.remaining() != count * 4) {
    throw Error(ErrorCode::DimensionMismatch,
                "DFT1 header declares " + std::to_string(count) + " values but payload holds " +
                    std::to_string(r.remaining()) + " bytes");
  }
  std::vector<float> values(count);
  for (auto& v : values) v = r.f32();
  return FeatureTensor(k, h, w, std::move(values));
}

FeatureTensor decode_npy(std::span<const char> bytes) {
  detail::ByteReader r(bytes, "NPY");
  if (r.remaining() < kNpyMagic.size() || r.bytes(kNpyMagic.size()) != kNpyMagic) {
    throw Error(ErrorCode::MalformedFile, "missing NPY magic");
  }
  const auto major = static_cast<unsigned char>(r.bytes(1)[0]);
  r.bytes(1);  // minor
  std::size_t header_len = 0;
  if (major == 1) {
    header_len = r.u16();
  } else if (major == 2) {
    header_len = r.u32();
  } else {
    throw Error(ErrorCode::MalformedFile, "unsupported NPY version " + std::to_string(major));
  }
  const std::string header(r.bytes(header_len));

  const std::string descr = npy_field(header, "descr");
  if (npy_field(header, "fortran_order") != "False") {
    throw Error(ErrorCode::MalformedFile, "fortran-order NPY arrays are not supported");
  }
  const auto shape = parse_shape(npy_field(header, "shape"));
  if (shape.size() != 3) {
    throw Error(ErrorCode::MalformedFile, "NPY array must be 3-D (K, H, W)");
  }
  if (descr.size() != 3 || descr[1] != 'f' || (descr[2] != '4' && descr[2] != '8') ||
      (descr[0] != '<' && descr[0] != '>' && descr[0] != '|')) {
    throw Error(ErrorCode::MalformedFile, "NPY dtype '" + descr + "' is not floating point");
  }
  if (shape[0] == 0 || shape[1] == 0 || shape[2] == 0) {
    throw Error(ErrorCode::MalformedFile, "NPY array has a zero extent");
  }
  const bool big_endian = descr[0] == '>';
  const std::size_t width = descr[2] == '4' ? 4 : 8;
  const std::uint64_t count = shape[0] * shape[1] * shape[2];
  if (r.remaining() != count * width) {
    throw Error(ErrorCode::DimensionMismatch, "NPY payload size disagrees with its shape");
  }

  std::vector<float> values(count);
  for (auto& v : values) {
    auto raw = r.bytes(width);
    std::uint64_t bits = 0;
    for (std::size_t b = 0; b < width; ++b) {
      const std::size_t src = big_endian ? width - 1 - b : b;
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(raw[src])) << (8 * b);
    }
    v = width == 4 ? std::bit_cast<float>(static_cast<std::uint32_t>(bits))
                   : static_cast<float>(std::bit_cast<double>(bits));
  }
  return FeatureTensor(shape[0], shape[1], shape[2], std::move(values));
}

FeatureTensor load_tensor(const std::filesystem::path& path) {
  const auto bytes = detail::read_file(path);
  const std::string_view head(bytes.data(), std::min<std::size_t>(bytes.size(), 6));
  if (head.starts_with(kNpyMagic)) return decode_npy(bytes);
  return decode_dft1(bytes);
}

void save_tensor(const FeatureTensor& tensor, const std::filesystem::path& path) {
  detail::write_file(path, encode_dft1(tensor));
}

namespace {

std::optional<ManifestRole> parse_role(const std::string& s, const std::string& where) {
  if (s.empty()) return std::nullopt;
  if (s == "database") return ManifestRole::Database;
  if (s == "query") return ManifestRole::Query;
  if (s == "whitening") return ManifestRole::Whitening;
  throw Error(ErrorCode::MalformedFile, where + ": unknown role '" + s + "'");
}

std::string_view role_name(ManifestRole role) {
  switch (role) {
    case ManifestRole::Database: return "database";
    case ManifestRole::Query: return "query";
    case ManifestRole::Whitening: return "whitening";
  }
  return "";
}

}  // namespace

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, "cannot open manifest '" + path.string() + "'");
  const auto base = path.parent_path();

  DatasetManifest manifest;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);

    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, '\t')) fields.push_back(field);
    if (fields.size() < 2 || fields.size() > 3 || fields[0].empty() || fields[1].empty()) {
      throw Error(ErrorCode::MalformedFile, where + ": expected image_id<TAB>path[<TAB>role]");
    }

    ManifestEntry entry;
    entry.image_id = fields[0];
    entry.path = fields[1];
    if (entry.path.is_relative()) entry.path = base / entry.path;
    entry.role = parse_role(fields.size() == 3 ? fields[2] : std::string{}, where);

    if (!seen.insert(entry.image_id).second) {
      throw Error(ErrorCode::DuplicateId, where + ": duplicate image_id '" + entry.image_id + "'");
    }
    if (!std::filesystem::exists(entry.path)) {
      throw Error(ErrorCode::MissingFile, where + ": '" + entry.path.string() + "' does not exist");
    }
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  std::ostringstream out;
  for (const auto& e : manifest.entries) {
    out << e.image_id << '\t' << e.path.generic_string();
    if (e.role) out << '\t' << role_name(*e.role);
    out << '\n';
  }
  const auto text = out.str();
  detail::write_file(path, std::span<const char>(text.data(), text.size()));
}

FeatureTensor load_entry(const ManifestEntry& entry) {
  auto t = load_tensor(entry.path);
  t.set_image_id(entry.image_id);
  return t;
}

}  // namespace deepagg
