#pragma once

#include <string>

#include <json.hpp>

#include "vidcut/metrics.hpp"

namespace vidcut {

// Absent values serialize as null.
nlohmann::json report_to_json(const EvalReport& report);

// Fixed-width text table; absent values print as "-".
std::string format_report_table(const EvalReport& report);

}  // namespace vidcut
