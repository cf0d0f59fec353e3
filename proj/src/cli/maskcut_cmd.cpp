#include <algorithm>
#include <filesystem>
#include <ostream>

#include "vidcut/cli.hpp"
#include "vidcut/crf.hpp"
#include "vidcut/error.hpp"
#include "vidcut/manifest.hpp"
#include "vidcut/maskcut.hpp"
#include "vidcut/npy.hpp"
#include "vidcut/png_io.hpp"

namespace vidcut::cli {
namespace fs = std::filesystem;

namespace {

struct ImageJob {
  fs::path features;
  fs::path image;
  std::string stem;
};

struct ImageResult {
  int height = 0;
  int width = 0;
  MaskSet masks;  // pixel resolution, pairwise disjoint
};

ImageResult discover(const ImageJob& job, const MaskCutArgs& args) {
  const FeatureMap fm = load_feature_map(job.features);
  MaskCutOptions options;
  options.max_masks = args.t;
  options.tau = args.tau;
  const MaskSet patches = maskcut(fm, options);

  std::optional<RgbImage> image;
  if (!args.no_crf && !patches.empty()) {
    image = read_png_rgb(job.image);
    if (image->height != fm.image_height || image->width != fm.image_width) {
      throw MismatchError(job.image.string() + ": image size differs from feature sidecar");
    }
  }

  ImageResult res{fm.image_height, fm.image_width, {}};
  BinaryMask claimed(fm.image_height, fm.image_width);
  for (std::size_t k = 0; k < patches.size(); ++k) {
    BinaryMask m = upsample_mask(patches.masks[k], fm.patch_size, fm.image_height,
                                 fm.image_width);
    if (image) m = crf_refine(*image, m, args.crf);
    // CRF can grow masks into each other; earlier masks keep contested pixels.
    for (std::size_t i = 0; i < m.bits.size(); ++i) {
      if (claimed.bits[i]) m.bits[i] = 0;
      claimed.bits[i] |= m.bits[i];
    }
    if (m.empty()) continue;
    res.masks.masks.push_back(std::move(m));
    res.masks.scores.push_back(patches.scores[k]);
  }
  return res;
}

}  // namespace

void cmd_maskcut(const MaskCutArgs& args, std::ostream& out, std::ostream& err) {
  if (args.t < 1) throw ConfigError("t must be ≥ 1");
  if (!(args.tau >= 0.0 && args.tau < 1.0)) throw ConfigError("tau must lie in [0, 1)");
  if (!args.no_crf) args.crf.validate();
  if (!fs::is_directory(args.features)) {
    throw IoError("feature directory not found: " + args.features.string());
  }
  if (!fs::is_directory(args.images)) {
    throw IoError("image directory not found: " + args.images.string());
  }

  std::vector<ImageJob> jobs;
  for (const auto& entry : fs::directory_iterator(args.features)) {
    if (entry.is_regular_file() && entry.path().extension() == ".npy") {
      const std::string stem = entry.path().stem().string();
      jobs.push_back({entry.path(), args.images / (stem + ".png"), stem});
    }
  }
  std::sort(jobs.begin(), jobs.end(),
            [](const ImageJob& a, const ImageJob& b) { return a.stem < b.stem; });
  if (jobs.empty()) throw ConfigError("no .npy feature files in " + args.features.string());
  for (const ImageJob& job : jobs) {
    if (!fs::exists(sidecar_path(job.features))) {
      throw ConfigError("missing sidecar " + sidecar_path(job.features).string());
    }
    if (!fs::exists(job.image)) throw IoError("missing image " + job.image.string());
  }

  OutputGuard guard;
  if (!fs::exists(args.out)) {
    fs::create_directories(args.out);
    guard.add(args.out);
  }
  const fs::path mask_dir = args.out / "masks";
  if (!fs::exists(mask_dir)) {
    fs::create_directories(mask_dir);
    guard.add(mask_dir);
  }

  std::vector<ImageResult> results(jobs.size());
  parallel_for(jobs.size(), args.jobs,
               [&](std::size_t i) { results[i] = discover(jobs[i], args); });

  std::vector<VideoRecord> records;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const ImageResult& res = results[i];
    LabelMap labels = masks_to_labels(res.masks.masks);
    if (res.masks.empty()) {
      labels.height = res.height;
      labels.width = res.width;
      labels.labels.assign(static_cast<std::size_t>(res.height) * res.width, 0);
    }
    const fs::path png = mask_dir / (jobs[i].stem + ".png");
    fs::path tmp = png;
    tmp += ".tmp";
    guard.add(tmp);
    guard.add(png);
    write_png_labels(labels, tmp);
    fs::rename(tmp, png);

    VideoRecord rec;
    rec.video_id = jobs[i].stem;
    rec.frame_count = 1;
    rec.height = res.height;
    rec.width = res.width;
    rec.frame_paths = {jobs[i].image.generic_string()};
    for (std::size_t k = 0; k < res.masks.size(); ++k) {
      rec.trajectories.push_back(
          {static_cast<std::int64_t>(k + 1), {res.masks.masks[k]}, res.masks.scores[k]});
    }
    err << jobs[i].stem << ": " << res.masks.size() << " mask(s)\n";
    records.push_back(std::move(rec));
  }
  const fs::path manifest = args.out / "masks.json";
  guard.add(manifest);
  save_predictions(records, manifest);
  guard.commit();
  out << "wrote " << records.size() << " image(s) to " << manifest.generic_string() << "\n";
}

}  // namespace vidcut::cli
