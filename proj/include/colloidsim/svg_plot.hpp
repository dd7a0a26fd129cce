#pragma once

#include <string>
#include <vector>

#include "colloidsim/csv_io.hpp"
#include "colloidsim/protocol.hpp"

namespace colloidsim {

/// Self-contained 800x500 line plot of R_B versus cycle, log-scaled
/// resistance axis, after-bell and after-food series with a legend.
std::string cycles_svg(const std::vector<CycleRecord>& records, const RunMetadata& meta);

}  // namespace colloidsim
