#include "vidcut/manifest.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "vidcut/error.hpp"
#include "vidcut/rle.hpp"

namespace vidcut {
namespace {

using nlohmann::json;

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw MismatchError(where + ": missing field '" + key + "'");
  }
  return obj[key];
}

int require_int(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_number_integer()) {
    throw MismatchError(where + ": field '" + key + "' must be an integer");
  }
  return v.get<int>();
}

BinaryMask mask_from_json(const json& j, int height, int width,
                          const std::string& where) {
  const json& size = require(j, "size", where);
  const json& counts = require(j, "counts", where);
  if (!size.is_array() || size.size() != 2 || !counts.is_array()) {
    throw MismatchError(where + ": malformed RLE");
  }
  RleMask rle;
  rle.height = size[0].get<int>();
  rle.width = size[1].get<int>();
  if (rle.height != height || rle.width != width) {
    throw MismatchError(where + ": RLE size differs from video size");
  }
  rle.counts.reserve(counts.size());
  for (const json& c : counts) {
    if (!c.is_number_integer() || c.get<std::int64_t>() < 0) {
      throw MismatchError(where + ": RLE counts must be non-negative integers");
    }
    rle.counts.push_back(c.get<std::uint32_t>());
  }
  return rle_decode(rle);
}

json mask_to_json(const BinaryMask& mask) {
  const RleMask rle = rle_encode(mask);
  return {{"size", {rle.height, rle.width}}, {"counts", rle.counts}};
}

}  // namespace

double round_score(double score) { return std::round(score * 1e6) / 1e6; }

std::vector<VideoRecord> videos_from_json(const json& doc) {
  const json& videos = require(doc, "videos", "manifest");
  if (!videos.is_array()) throw MismatchError("manifest: 'videos' must be a list");
  std::vector<VideoRecord> out;
  std::set<std::string> seen;
  for (const json& v : videos) {
    VideoRecord rec;
    const json& id = require(v, "video_id", "video");
    rec.video_id = id.is_string() ? id.get<std::string>() : id.dump();
    const std::string where = "video " + rec.video_id;
    if (!seen.insert(rec.video_id).second) {
      throw MismatchError("duplicate video_id " + rec.video_id);
    }
    rec.height = require_int(v, "height", where);
    rec.width = require_int(v, "width", where);
    if (rec.height <= 0 || rec.width <= 0) {
      throw MismatchError(where + ": height and width must be positive");
    }
    if (v.contains("frames")) {
      for (const json& p : v["frames"]) rec.frame_paths.push_back(p.get<std::string>());
    }
    const json& trajs = require(v, "trajectories", where);
    if (!trajs.is_array()) throw MismatchError(where + ": 'trajectories' must be a list");
    int frame_count = static_cast<int>(rec.frame_paths.size());
    for (const json& t : trajs) {
      Trajectory traj;
      traj.instance_id = require(t, "instance_id", where).get<std::int64_t>();
      traj.score = require(t, "score", where).get<double>();
      const std::string twhere = where + " instance " + std::to_string(traj.instance_id);
      const json& frames = require(t, "frames", twhere);
      if (!frames.is_array()) throw MismatchError(twhere + ": 'frames' must be a list");
      for (const json& f : frames) {
        if (f.is_null()) {
          traj.frames.emplace_back(std::nullopt);
        } else {
          traj.frames.emplace_back(mask_from_json(f, rec.height, rec.width, twhere));
        }
      }
      if (frame_count == 0) frame_count = static_cast<int>(traj.frames.size());
      rec.trajectories.push_back(std::move(traj));
    }
    rec.frame_count = frame_count;
    if (rec.frame_count == 0 && rec.trajectories.empty()) {
      throw MismatchError(where + ": cannot determine frame count");
    }
    rec.validate();
    out.push_back(std::move(rec));
  }
  return out;
}

json videos_to_json(const std::vector<VideoRecord>& records) {
  json videos = json::array();
  for (const VideoRecord& rec : records) {
    json trajs = json::array();
    for (const Trajectory& t : rec.trajectories) {
      json frames = json::array();
      for (const auto& m : t.frames) {
        frames.push_back(m ? mask_to_json(*m) : json(nullptr));
      }
      trajs.push_back({{"instance_id", t.instance_id},
                       {"score", round_score(t.score)},
                       {"frames", std::move(frames)}});
    }
    videos.push_back({{"video_id", rec.video_id},
                      {"height", rec.height},
                      {"width", rec.width},
                      {"frames", rec.frame_paths},
                      {"trajectories", std::move(trajs)}});
  }
  return {{"videos", std::move(videos)}};
}

std::vector<VideoRecord> load_video_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  try {
    return videos_from_json(doc);
  } catch (const json::exception& e) {
    throw MismatchError(path.string() + ": " + e.what());
  } catch (const MismatchError& e) {
    throw MismatchError(path.string() + ": " + e.what());
  }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << text;
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
  }
}

void save_predictions(const std::vector<VideoRecord>& records,
                      const std::filesystem::path& path) {
  write_file_atomic(path, videos_to_json(records).dump(1) + "\n");
}

}  // namespace vidcut
