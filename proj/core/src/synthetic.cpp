#include "deepagg/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "deepagg/error.hpp"
#include "deepagg/tensor_io.hpp"

namespace deepagg {

namespace {

// mt19937_64 output is fixed by the standard; the distributions are not, so
// they are derived by hand to keep datasets identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

 private:
  std::mt19937_64 engine_;
};

constexpr float kObjectAmplitude = 1.0f;
constexpr float kBurstAmplitude = 4.0f;
constexpr double kNoiseProbability = 0.2;
constexpr float kNoiseAmplitude = 0.01f;

struct Landmark {
  std::vector<std::size_t> channels;
  std::vector<float> pattern;
};

FeatureTensor render_image(const SyntheticOptions& o, const Landmark& landmark,
                           std::span<const std::size_t> pool, Rng& rng, std::string id) {
  FeatureTensor t(o.channels, o.height, o.width, std::move(id));

  for (std::size_t k = 0; k < o.channels; ++k) {
    for (std::size_t i = 0; i < o.height; ++i) {
      for (std::size_t j = 0; j < o.width; ++j) {
        if (rng.uniform() < kNoiseProbability) {
          t.at(k, i, j) = kNoiseAmplitude * static_cast<float>(rng.uniform());
        }
      }
    }
  }

  // Object: 3x3 blob (clipped at the border) around a random cell.
  const std::size_t ci = rng.below(o.height);
  const std::size_t cj = rng.below(o.width);
  for (std::size_t i = (ci > 0 ? ci - 1 : 0); i <= std::min(ci + 1, o.height - 1); ++i) {
    for (std::size_t j = (cj > 0 ? cj - 1 : 0); j <= std::min(cj + 1, o.width - 1); ++j) {
      const float falloff = (i == ci && j == cj) ? 1.0f : 0.6f;
      for (std::size_t s = 0; s < landmark.channels.size(); ++s) {
        const float jitter = 1.0f + 0.05f * static_cast<float>(rng.uniform() - 0.5);
        t.at(landmark.channels[s], i, j) +=
            kObjectAmplitude * landmark.pattern[s] * falloff * jitter;
      }
    }
  }

  if (o.bursty && !pool.empty()) {
    const std::size_t k = pool[rng.below(pool.size())];
    for (std::size_t i = 0; i < o.height; ++i) {
      for (std::size_t j = 0; j < o.width; ++j) {
        t.at(k, i, j) += kBurstAmplitude * static_cast<float>(0.95 + 0.1 * rng.uniform());
      }
    }
  }
  return t;
}

std::vector<float> draw_pattern(std::size_t n, Rng& rng) {
  std::vector<float> p(n);
  for (auto& v : p) v = static_cast<float>(0.4 + 0.6 * rng.uniform());
  return p;
}

}  // namespace

SyntheticDataset generate_synthetic(const SyntheticOptions& o) {
  const std::size_t signature_total = o.classes * o.signature_channels;
  if (o.classes == 0 || o.images_per_class < 2 || o.signature_channels == 0 ||
      o.height == 0 || o.width == 0) {
    throw Error(ErrorCode::InvalidArgument,
                "synthetic data needs >= 1 class, >= 2 images per class, >= 1 signature channel");
  }
  if (signature_total > o.channels || (o.bursty && signature_total == o.channels)) {
    throw Error(ErrorCode::InvalidArgument, "not enough channels for the signature layout");
  }

  Rng rng(o.seed);
  std::vector<std::size_t> pool(o.channels - signature_total);
  std::iota(pool.begin(), pool.end(), signature_total);

  SyntheticDataset ds;
  for (std::size_t c = 0; c < o.classes; ++c) {
    Landmark lm;
    for (std::size_t s = 0; s < o.signature_channels; ++s) {
      lm.channels.push_back(c * o.signature_channels + s);
    }
    lm.pattern = draw_pattern(o.signature_channels, rng);

    std::set<std::string> members;
    for (std::size_t n = 0; n < o.images_per_class; ++n) {
      members.insert("c" + std::to_string(c) + "_" + std::to_string(n));
    }
    for (std::size_t n = 0; n < o.images_per_class; ++n) {
      const std::string id = "c" + std::to_string(c) + "_" + std::to_string(n);
      ds.database.push_back(render_image(o, lm, pool, rng, id));

      QueryGroundTruth gt;
      gt.query_id = id;
      gt.query_image = id;
      gt.crop = CropBox{0, 0, static_cast<double>(o.width), static_cast<double>(o.height)};
      gt.positives = members;
      gt.positives.erase(id);
      gt.junk.insert(id);
      ds.truths.push_back(std::move(gt));
    }
  }

  // Whitening landmarks pick random subsets of all signature channels.
  std::vector<std::size_t> signature(signature_total);
  std::iota(signature.begin(), signature.end(), std::size_t{0});
  for (std::size_t l = 0; l < o.whitening_landmarks; ++l) {
    for (std::size_t s = 0; s < o.signature_channels; ++s) {
      std::swap(signature[s], signature[s + rng.below(signature_total - s)]);
    }
    Landmark lm;
    lm.channels.assign(signature.begin(),
                       signature.begin() + static_cast<std::ptrdiff_t>(o.signature_channels));
    lm.pattern = draw_pattern(o.signature_channels, rng);
    for (std::size_t n = 0; n < o.whitening_images_per_landmark; ++n) {
      ds.whitening.push_back(render_image(
          o, lm, pool, rng, "w" + std::to_string(l) + "_" + std::to_string(n)));
    }
  }
  return ds;
}

void write_synthetic(const SyntheticDataset& ds, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "database");
  fs::create_directories(dir / "whitening");

  DatasetManifest database;
  DatasetManifest queries;
  DatasetManifest whitening;
  for (const auto& t : ds.database) {
    const fs::path rel = fs::path("database") / (t.image_id() + ".dft");
    save_tensor(t, dir / rel);
    database.entries.push_back({t.image_id(), rel, ManifestRole::Database});
    queries.entries.push_back({t.image_id(), rel, ManifestRole::Query});
  }
  for (const auto& t : ds.whitening) {
    const fs::path rel = fs::path("whitening") / (t.image_id() + ".dft");
    save_tensor(t, dir / rel);
    whitening.entries.push_back({t.image_id(), rel, ManifestRole::Whitening});
  }
  save_manifest(database, dir / "database.tsv");
  save_manifest(queries, dir / "queries.tsv");
  save_manifest(whitening, dir / "whitening.tsv");
  save_oxford_ground_truth(ds.truths, dir / "gt");
}

}  // namespace deepagg
