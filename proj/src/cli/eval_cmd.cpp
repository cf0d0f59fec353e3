#include <ostream>
#include <set>

#include "vidcut/cli.hpp"
#include "vidcut/error.hpp"
#include "vidcut/manifest.hpp"
#include "vidcut/metrics.hpp"
#include "vidcut/report.hpp"

namespace vidcut::cli {

void cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err) {
  if (args.protocol != "ytvis" && args.protocol != "davis") {
    throw ConfigError("--protocol must be ytvis or davis");
  }
  const auto preds = load_video_manifest(args.pred);
  const auto gts = load_video_manifest(args.gt);

  std::set<std::string> gt_ids, pred_ids;
  for (const auto& g : gts) gt_ids.insert(g.video_id);
  std::string offenders;
  for (const auto& p : preds) {
    pred_ids.insert(p.video_id);
    if (!gt_ids.count(p.video_id)) offenders += (offenders.empty() ? "" : ", ") + p.video_id;
  }
  if (!offenders.empty()) {
    throw MismatchError("predicted videos without ground truth: " + offenders);
  }
  for (const auto& g : gts) {
    if (!pred_ids.count(g.video_id)) {
      err << "warning: no predictions for video " << g.video_id << "; scored as all-miss\n";
    }
  }

  const EvalReport report =
      args.protocol == "ytvis" ? evaluate_ap(preds, gts) : evaluate_davis(preds, gts);
  out << format_report_table(report);
  nlohmann::json doc = report_to_json(report);
  doc["protocol"] = args.protocol;
  write_file_atomic(args.out, doc.dump(2) + "\n");
}

}  // namespace vidcut::cli
