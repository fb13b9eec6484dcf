#include "deepagg/whitening.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "binary_io.hpp"
#include "deepagg/error.hpp"

namespace deepagg {

namespace {

constexpr std::string_view kMagic = "WHM1";
constexpr std::uint32_t kVersion = 1;

}  // namespace

WhiteningFit fit_whitening(std::span<const GlobalDescriptor> descriptors,
                           const WhiteningOptions& options) {
  if (descriptors.size() < 2) {
    throw Error(ErrorCode::InsufficientSamples,
                "whitening needs at least 2 descriptors, got " + std::to_string(descriptors.size()));
  }
  const std::size_t dim = descriptors.front().dim();
  const std::size_t out_dim = options.output_dim == 0 ? dim : options.output_dim;
  if (out_dim > dim) {
    throw Error(ErrorCode::InvalidArgument, "target dim " + std::to_string(out_dim) +
                                                " must lie in [1, " + std::to_string(dim) + "]");
  }
  if (!(options.eps_w > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps_w must be > 0");

  const auto n = static_cast<Eigen::Index>(descriptors.size());
  const auto d = static_cast<Eigen::Index>(dim);
  Eigen::MatrixXd data(n, d);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& desc = descriptors[static_cast<std::size_t>(r)];
    if (desc.dim() != dim) {
      throw Error(ErrorCode::DimensionMismatch, "descriptor '" + desc.image_id() + "' has dim " +
                                                    std::to_string(desc.dim()) + ", expected " +
                                                    std::to_string(dim));
    }
    if (desc.stage() != DescriptorStage::RawNormalized) {
      throw Error(ErrorCode::InvalidArgument, "whitening is fit on raw-normalized descriptors");
    }
    data.row(r) = Eigen::Map<const Eigen::RowVectorXd>(desc.values().data(), d);
  }

  const Eigen::RowVectorXd mean = data.colwise().mean();
  data.rowwise() -= mean;
  const Eigen::MatrixXd cov = (data.transpose() * data) / static_cast<double>(n);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::InvalidArgument, "covariance eigendecomposition failed");
  }
  // Eigen returns ascending eigenvalues.
  const Eigen::VectorXd& evals = solver.eigenvalues();
  const Eigen::MatrixXd& evecs = solver.eigenvectors();

  WhiteningFit fit;
  auto& model = fit.model;
  model.input_dim = dim;
  model.output_dim = out_dim;
  model.eps_w = options.eps_w;
  model.mean.assign(mean.data(), mean.data() + d);
  model.eigenvalues.resize(out_dim);
  model.projection.resize(out_dim * dim);

  std::size_t weak = 0;
  for (std::size_t r = 0; r < out_dim; ++r) {
    const Eigen::Index col = d - 1 - static_cast<Eigen::Index>(r);
    const double lambda = std::max(evals(col), 0.0);
    Eigen::VectorXd v = evecs.col(col);
    for (Eigen::Index c = 0; c < d; ++c) {
      if (v(c) != 0.0) {
        if (v(c) < 0.0) v = -v;
        break;
      }
    }
    const double scale = options.scale ? 1.0 / std::sqrt(lambda + options.eps_w) : 1.0;
    model.eigenvalues[r] = lambda;
    for (std::size_t c = 0; c < dim; ++c) {
      model.projection[r * dim + c] = v(static_cast<Eigen::Index>(c)) * scale;
    }
    if (lambda < options.eps_w) ++weak;
  }
  if (weak > 0) {
    fit.warnings.push_back("rank deficient: " + std::to_string(weak) +
                           " retained eigenvalue(s) below eps_w");
  }
  return fit;
}

std::vector<double> project(const WhiteningModel& model, std::span<const double> values) {
  if (values.size() != model.input_dim) {
    throw Error(ErrorCode::ModelDimMismatch, "model expects dim " +
                                                 std::to_string(model.input_dim) + ", got " +
                                                 std::to_string(values.size()));
  }
  std::vector<double> out(model.output_dim, 0.0);
  for (std::size_t r = 0; r < model.output_dim; ++r) {
    const double* row = model.projection.data() + r * model.input_dim;
    double acc = 0.0;
    for (std::size_t c = 0; c < model.input_dim; ++c) acc += row[c] * (values[c] - model.mean[c]);
    out[r] = acc;
  }
  return out;
}

GlobalDescriptor apply_whitening(const WhiteningModel& model, const GlobalDescriptor& descriptor) {
  return GlobalDescriptor::normalized(project(model, descriptor.values()),
                                      descriptor.image_id(), DescriptorStage::WhitenedNormalized);
}

std::vector<char> encode_model(const WhiteningModel& model) {
  detail::ByteWriter w;
  w.bytes(kMagic);
  w.u32(kVersion);
  w.u32(static_cast<std::uint32_t>(model.input_dim));
  w.u32(static_cast<std::uint32_t>(model.output_dim));
  w.f64(model.eps_w);
  for (double v : model.mean) w.f64(v);
  for (double v : model.eigenvalues) w.f64(v);
  for (double v : model.projection) w.f64(v);
  return w.data();
}

WhiteningModel decode_model(std::span<const char> bytes) {
  detail::ByteReader r(bytes, "WHM1");
  if (r.remaining() < kMagic.size() || r.bytes(kMagic.size()) != kMagic) {
    throw Error(ErrorCode::MalformedFile, "missing WHM1 magic");
  }
  if (const auto version = r.u32(); version != kVersion) {
    throw Error(ErrorCode::MalformedFile, "unsupported WHM1 version " + std::to_string(version));
  }
  WhiteningModel model;
  model.input_dim = r.u32();
  model.output_dim = r.u32();
  if (model.input_dim == 0 || model.output_dim == 0 || model.output_dim > model.input_dim) {
    throw Error(ErrorCode::MalformedFile, "WHM1 dimensions are inconsistent");
  }
  model.eps_w = r.f64();
  const std::size_t expected = 8 * (model.input_dim + model.output_dim +
                                    model.output_dim * model.input_dim);
  if (r.remaining() != expected) {
    throw Error(ErrorCode::MalformedFile, "WHM1 payload is " + std::to_string(r.remaining()) +
                                              " bytes, expected " + std::to_string(expected));
  }
  model.mean.resize(model.input_dim);
  model.eigenvalues.resize(model.output_dim);
  model.projection.resize(model.output_dim * model.input_dim);
  for (auto& v : model.mean) v = r.f64();
  for (auto& v : model.eigenvalues) v = r.f64();
  for (auto& v : model.projection) v = r.f64();
  return model;
}

void save_model(const WhiteningModel& model, const std::filesystem::path& path) {
  detail::write_file(path, encode_model(model));
}

WhiteningModel load_model(const std::filesystem::path& path) {
  return decode_model(detail::read_file(path));
}

}  // namespace deepagg
