#pragma once

#include <iosfwd>
#include <string>

#include "dynpanel/experiment.hpp"
#include "dynpanel/panel_model.hpp"

namespace dynpanel {

/// Long format, header `i,t,y,x1,...,x{p_x}` (x columns matched by name, any order).
/// Rows with t <= 0 carry the initial lags y_{i,0}, ..., y_{i,1-L}; their x cells may be empty.
/// Throws InputError naming the offending row or (unit, period).
PanelData load_panel_csv(std::istream& in);
PanelData load_panel_csv(const std::string& path);

/// Writes every value with 17 significant digits, so load(save(p)) == p.
void save_panel_csv(const PanelData& panel, std::ostream& out);
void save_panel_csv(const PanelData& panel, const std::string& path);

/// One row per method: rmse, coverage, length, size, power and their MC half-widths.
/// Inapplicable methods get empty cells.
void save_report_csv(const ExperimentReport& report, std::ostream& out);

}  // namespace dynpanel
