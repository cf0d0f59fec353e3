#include <CLI11.hpp>

#include <atomic>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <mutex>
#include <thread>

#include "vidcut/cli.hpp"
#include "vidcut/error.hpp"

namespace vidcut::cli {

OutputGuard::~OutputGuard() {
  if (committed_) return;
  std::error_code ec;
  for (auto it = paths_.rbegin(); it != paths_.rend(); ++it) std::filesystem::remove(*it, ec);
}

void OutputGuard::add(const std::filesystem::path& p) { paths_.push_back(p); }

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers =
      std::min<std::size_t>(count, static_cast<std::size_t>(std::max(jobs, 1)));
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

namespace {

int jobs_from_env(int fallback) {
  if (const char* env = std::getenv("VIDCUT_JOBS")) {
    try {
      const int v = std::stoi(env);
      if (v >= 1) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("VIDCUT_JOBS must be a positive integer");
  }
  return fallback;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Unsupervised multi-instance mask discovery, synthetic video generation "
               "and video instance segmentation evaluation"};
  app.require_subcommand(1);

  MaskCutArgs mc;
  auto* maskcut = app.add_subcommand("maskcut", "Discover instance masks from patch features");
  maskcut->add_option("--features", mc.features, "Directory of .npy feature files")->required();
  maskcut->add_option("--images", mc.images, "Directory of <stem>.png images")->required();
  maskcut->add_option("--out", mc.out, "Output directory")->required();
  maskcut->add_option("--t", mc.t, "Maximum masks per image");
  maskcut->add_option("--tau", mc.tau, "Affinity binarization threshold (0 keeps raw cosines)");
  maskcut->add_flag("--no-crf", mc.no_crf, "Skip CRF refinement");
  maskcut->add_option("--crf-iterations", mc.crf.iterations);
  maskcut->add_option("--crf-unary", mc.crf.unary_fg_prob);
  maskcut->add_option("--crf-radius", mc.crf.neighborhood_radius);
  maskcut->add_option("--jobs", mc.jobs, "Worker threads");

  SynthArgs sy;
  std::string motion = "interpolate";
  std::uint64_t seed = 0;
  auto* synth = app.add_subcommand("synth", "Turn image pairs into synthetic videos");
  synth->add_option("--images", sy.images, "Directory of <video_id>.png images")->required();
  synth->add_option("--masks", sy.masks, "Mask manifest written by maskcut")->required();
  synth->add_option("--out", sy.out, "Output directory")->required();
  synth->add_option("--frames", sy.frames, "Frames per video");
  auto* seed_opt = synth->add_option("--seed", seed, "Run seed")->required();
  synth->add_option("--motion", motion, "interpolate | independent");
  synth->add_option("--jobs", sy.jobs, "Worker threads");

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Score predictions against ground truth");
  eval->add_option("--pred", ev.pred, "Prediction manifest")->required();
  eval->add_option("--gt", ev.gt, "Ground-truth manifest")->required();
  eval->add_option("--protocol", ev.protocol, "ytvis | davis");
  eval->add_option("--out", ev.out, "Report JSON path")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (maskcut->parsed()) {
      mc.jobs = jobs_from_env(mc.jobs);
      cmd_maskcut(mc, out, err);
    } else if (synth->parsed()) {
      if (seed_opt->count()) sy.seed = seed;
      if (motion == "interpolate") {
        sy.motion = MotionModel::kInterpolate;
      } else if (motion == "independent") {
        sy.motion = MotionModel::kIndependent;
      } else {
        throw ConfigError("--motion must be interpolate or independent");
      }
      sy.jobs = jobs_from_env(sy.jobs);
      cmd_synth(sy, out, err);
    } else if (eval->parsed()) {
      cmd_eval(ev, out, err);
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const MismatchError& e) {
    err << "error: " << e.what() << "\n";
    return kExitMismatch;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << "\n";
    return kExitMismatch;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace vidcut::cli
