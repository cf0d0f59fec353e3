#include "vidcut/report.hpp"

#include <cstdio>
#include <sstream>

namespace vidcut {
namespace {

nlohmann::json opt(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::string fmt(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", *v);
  return buf;
}

std::string threshold_key(double t) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.2f", t);
  return buf;
}

}  // namespace

nlohmann::json report_to_json(const EvalReport& r) {
  nlohmann::json per = nlohmann::json::object();
  for (const auto& [t, ap] : r.ap_per_threshold) per[threshold_key(t)] = ap;
  nlohmann::json ar = nlohmann::json::object();
  for (const auto& [k, v] : r.ar_at) ar[std::to_string(k)] = v;
  return {{"ap_per_threshold", per}, {"ap", opt(r.ap_mean)},   {"ap50", opt(r.ap50)},
          {"ap75", opt(r.ap75)},     {"ap_small", opt(r.ap_small)},
          {"ap_medium", opt(r.ap_medium)}, {"ap_large", opt(r.ap_large)},
          {"ar", ar},                {"j", opt(r.j_mean)},     {"f", opt(r.f_mean)},
          {"jf", opt(r.jf_mean)}};
}

std::string format_report_table(const EvalReport& r) {
  std::ostringstream out;
  char line[96];
  auto row = [&](const std::string& name, const std::optional<double>& v) {
    std::snprintf(line, sizeof line, "%-14s %8s\n", name.c_str(), fmt(v).c_str());
    out << line;
  };
  out << "metric            value\n";
  out << "----------------------\n";
  const bool ytvis = r.ap_mean || !r.ap_per_threshold.empty() || !r.ar_at.empty();
  if (ytvis) {
    for (const auto& [t, ap] : r.ap_per_threshold) row("AP@" + threshold_key(t), ap);
    row("AP", r.ap_mean);
    row("AP50", r.ap50);
    row("AP75", r.ap75);
    row("AP_S", r.ap_small);
    row("AP_M", r.ap_medium);
    row("AP_L", r.ap_large);
    for (const auto& [k, v] : r.ar_at) row("AR@" + std::to_string(k), v);
  }
  if (r.j_mean || r.f_mean || r.jf_mean || !ytvis) {
    row("J&F", r.jf_mean);
    row("J", r.j_mean);
    row("F", r.f_mean);
  }
  return out.str();
}

}  // namespace vidcut
