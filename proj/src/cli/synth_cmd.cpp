#include <cstdio>
#include <filesystem>
#include <numeric>
#include <ostream>

#include "vidcut/cli.hpp"
#include "vidcut/error.hpp"
#include "vidcut/manifest.hpp"
#include "vidcut/png_io.hpp"
#include "vidcut/rng.hpp"
#include "vidcut/synthesis.hpp"

namespace vidcut::cli {
namespace fs = std::filesystem;

namespace {

struct Item {
  const VideoRecord* record;
  fs::path image;
};

MaskSet masks_of(const VideoRecord& rec) {
  MaskSet set;
  for (const Trajectory& t : rec.trajectories) {
    if (!t.frames.front() || t.frames.front()->empty()) continue;
    set.masks.push_back(*t.frames.front());
    set.scores.push_back(t.score);
  }
  return set;
}

std::string video_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "synth_%05zu", index);
  return buf;
}

}  // namespace

void cmd_synth(const SynthArgs& args, std::ostream& out, std::ostream& err) {
  if (!args.seed) throw ConfigError("--seed is required");
  if (args.frames < 2) throw ConfigError("frames must be ≥ 2");
  SynthConfig base;
  base.frames = args.frames;
  base.motion = args.motion;
  base.validate();
  if (!fs::is_directory(args.images)) {
    throw IoError("image directory not found: " + args.images.string());
  }
  const std::vector<VideoRecord> records = load_video_manifest(args.masks);

  std::vector<Item> items;
  for (const VideoRecord& rec : records) {
    if (rec.frame_count != 1) {
      throw MismatchError("mask manifest entry " + rec.video_id + " must have exactly one frame");
    }
    if (masks_of(rec).empty()) {
      err << "warning: skipping " << rec.video_id << ": no masks\n";
      continue;
    }
    const fs::path image = args.images / (rec.video_id + ".png");
    if (!fs::exists(image)) throw IoError("missing image " + image.string());
    items.push_back({&rec, image});
  }

  // Seeded shuffle, then each image is the target for its successor.
  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), 0);
  Rng shuffle_rng(mix_seed(*args.seed, 0));
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[shuffle_rng.below(i)]);
  }

  OutputGuard guard;
  if (!fs::exists(args.out)) {
    fs::create_directories(args.out);
    guard.add(args.out);
  }
  const fs::path video_root = args.out / "videos";
  if (!fs::exists(video_root)) {
    fs::create_directories(video_root);
    guard.add(video_root);
  }

  std::vector<std::optional<SyntheticVideo>> videos(items.size());
  parallel_for(items.size(), args.jobs, [&](std::size_t i) {
    const Item& target = items[order[i]];
    const Item& source = items[order[(i + 1) % order.size()]];
    const RgbImage target_img = read_png_rgb(target.image);
    const RgbImage source_img = read_png_rgb(source.image);
    if (target_img.height != target.record->height || target_img.width != target.record->width ||
        source_img.height != source.record->height || source_img.width != source.record->width) {
      throw MismatchError("image size differs from its masks");
    }
    SynthConfig cfg = base;
    cfg.seed = mix_seed(*args.seed, i + 1);
    try {
      videos[i] = synthesize(target_img, masks_of(*target.record), source_img,
                             masks_of(*source.record), cfg);
      videos[i]->record.video_id =
          video_name(i) + "_" + target.record->video_id + "_" + source.record->video_id;
    } catch (const MismatchError& e) {
      // Only "no usable trajectories" reaches here; sizes were checked above.
      videos[i].reset();
    }
  });

  std::vector<VideoRecord> out_records;
  for (std::size_t i = 0; i < videos.size(); ++i) {
    if (!videos[i]) {
      err << "warning: pair " << i << " produced no usable trajectories\n";
      continue;
    }
    SyntheticVideo& v = *videos[i];
    const fs::path dir = video_root / v.record.video_id;
    if (!fs::exists(dir)) {
      fs::create_directories(dir);
      guard.add(dir);
    }
    for (std::size_t f = 0; f < v.frames.size(); ++f) {
      char name[32];
      std::snprintf(name, sizeof name, "frame_%03zu.png", f);
      const fs::path png = dir / name;
      fs::path tmp = png;
      tmp += ".tmp";
      guard.add(tmp);
      guard.add(png);
      write_png_rgb(v.frames[f], tmp);
      fs::rename(tmp, png);
      v.record.frame_paths.push_back(fs::relative(png, args.out).generic_string());
    }
    out_records.push_back(std::move(v.record));
  }
  const fs::path manifest = args.out / "trajectories.json";
  guard.add(manifest);
  save_predictions(out_records, manifest);
  guard.commit();
  out << "wrote " << out_records.size() << " video(s) to " << manifest.generic_string() << "\n";
}

}  // namespace vidcut::cli
