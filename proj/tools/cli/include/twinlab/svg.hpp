#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace twinlab {

struct Series {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

// Static line plot; nonpositive values are dropped when log_y is set.
void write_line_plot(std::ostream& os, const std::string& title, const std::string& x_label,
                     const std::string& y_label, const std::vector<Series>& series, bool log_y);

}  // namespace twinlab
