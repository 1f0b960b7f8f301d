// Minimal self-contained SVG rendering for the experiment harness: line
// plots, box plots, and histograms, written as pure functions of the data
// passed in.  No external plotting dependency is used.
#pragma once

#include <limits>
#include <string>
#include <vector>

namespace inlapf::svg {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#d62728";
    bool dashed = false;
};

struct BoxStats {
    std::string label;
    double q1 = 0.0, median = 0.0, q3 = 0.0;
    double whisker_lo = 0.0, whisker_hi = 0.0;
    std::string color = "#1f77b4";
};

// Quartile/whisker summary of a sample (Tukey 1.5 IQR whiskers clipped to
// the data range).
BoxStats box_stats(const std::string& label, std::vector<double> values);

std::string line_plot(const std::string& title, const std::string& xlabel,
                      const std::string& ylabel, const std::vector<Series>& series);

std::string box_plot(const std::string& title, const std::string& ylabel,
                     const std::vector<BoxStats>& boxes);

std::string histogram(const std::string& title, const std::string& xlabel,
                      const std::vector<double>& edges, const std::vector<double>& mass,
                      double mark = std::numeric_limits<double>::quiet_NaN());

void write_svg(const std::string& path, const std::string& content);

} // namespace inlapf::svg
