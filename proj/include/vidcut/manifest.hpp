#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "vidcut/types.hpp"

namespace vidcut {

// Manifest layout:
//   {"videos": [{"video_id": str, "height": int, "width": int,
//                "frames": [path, ...],
//                "trajectories": [{"instance_id": int, "score": real,
//                                  "frames": [{"size": [h, w],
//                                              "counts": [...]} | null]}]}]}
//
// "frames" may be empty (prediction files often omit paths); the frame
// count is then taken from the trajectories.

std::vector<VideoRecord> videos_from_json(const nlohmann::json& doc);
nlohmann::json videos_to_json(const std::vector<VideoRecord>& records);

std::vector<VideoRecord> load_video_manifest(const std::filesystem::path& path);

// Scores are written rounded to 6 decimal places. The file is written to a
// temporary sibling and renamed into place.
void save_predictions(const std::vector<VideoRecord>& records,
                      const std::filesystem::path& path);

// Writes `text` to `path` atomically (temp file + rename).
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& text);

double round_score(double score);

}  // namespace vidcut
