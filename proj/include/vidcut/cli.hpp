#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vidcut/crf.hpp"
#include "vidcut/synthesis.hpp"

namespace vidcut::cli {

// Stable exit codes for scripting.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitIo = 2,
  kExitConfig = 3,
  kExitMismatch = 4,
};

struct MaskCutArgs {
  std::filesystem::path features;
  std::filesystem::path images;
  std::filesystem::path out;
  int t = 3;
  double tau = 0.15;
  bool no_crf = false;
  CrfParams crf;
  int jobs = 1;
};

struct SynthArgs {
  std::filesystem::path images;
  std::filesystem::path masks;
  std::filesystem::path out;
  int frames = 2;
  std::optional<std::uint64_t> seed;
  MotionModel motion = MotionModel::kInterpolate;
  int jobs = 1;
};

struct EvalArgs {
  std::filesystem::path pred;
  std::filesystem::path gt;
  std::string protocol = "ytvis";
  std::filesystem::path out;
};

// Each command reports progress/warnings on `err`, results on `out`, and
// throws vidcut::Error subclasses on failure.
void cmd_maskcut(const MaskCutArgs& args, std::ostream& out, std::ostream& err);
void cmd_synth(const SynthArgs& args, std::ostream& out, std::ostream& err);
void cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err);

// Parses argv-style arguments (without the program name), dispatches and
// maps errors to ExitCode. VIDCUT_JOBS overrides --jobs.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Runs fn(0..count-1) on up to `jobs` threads. The exception of the lowest
// failing index is rethrown after all workers finish.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn);

// Removes every file registered so far unless commit() was called.
class OutputGuard {
 public:
  OutputGuard() = default;
  OutputGuard(const OutputGuard&) = delete;
  OutputGuard& operator=(const OutputGuard&) = delete;
  ~OutputGuard();

  void add(const std::filesystem::path& p);
  void commit() { committed_ = true; }

 private:
  std::vector<std::filesystem::path> paths_;
  bool committed_ = false;
};

}  // namespace vidcut::cli
