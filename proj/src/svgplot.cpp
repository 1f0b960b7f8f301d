#include "inlapf/svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "inlapf/errors.hpp"

namespace inlapf::svg {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0, kRight = 20.0, kTop = 40.0, kBottom = 50.0;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct Range {
    double lo = 0.0, hi = 1.0;
    void expand(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void finalize() {
        if (hi <= lo) hi = lo + 1.0;
        const double pad = 0.05 * (hi - lo);
        lo -= pad;
        hi += pad;
    }
};

double map_x(double v, const Range& r) {
    return kLeft + (v - r.lo) / (r.hi - r.lo) * (kWidth - kLeft - kRight);
}
double map_y(double v, const Range& r) {
    return kHeight - kBottom - (v - r.lo) / (r.hi - r.lo) * (kHeight - kTop - kBottom);
}

// Round tick spacing to 1/2/5 x 10^k.
std::vector<double> ticks(const Range& r, int target = 6) {
    const double span = r.hi - r.lo;
    double step = std::pow(10.0, std::floor(std::log10(span / target)));
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (span / (step * m) <= target) {
            step *= m;
            break;
        }
    }
    std::vector<double> out;
    for (double v = std::ceil(r.lo / step) * step; v <= r.hi + 1e-12 * span; v += step)
        out.push_back(std::fabs(v) < 1e-12 * span ? 0.0 : v);
    return out;
}

void open_svg(std::ostringstream& s, const std::string& title) {
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"15\">" << title << "</text>\n";
}

void axes(std::ostringstream& s, const Range& xr, const Range& yr, const std::string& xlabel,
          const std::string& ylabel, bool x_ticks = true) {
    s << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kWidth - kLeft - kRight
      << "\" height=\"" << kHeight - kTop - kBottom
      << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";
    if (x_ticks)
        for (double t : ticks(xr)) {
            const double px = map_x(t, xr);
            s << "<line x1=\"" << px << "\" y1=\"" << kHeight - kBottom << "\" x2=\"" << px
              << "\" y2=\"" << kHeight - kBottom + 5 << "\" stroke=\"#444\"/>\n"
              << "<text x=\"" << px << "\" y=\"" << kHeight - kBottom + 18
              << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(t)
              << "</text>\n";
        }
    for (double t : ticks(yr)) {
        const double py = map_y(t, yr);
        s << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << py << "\" x2=\"" << kLeft << "\" y2=\""
          << py << "\" stroke=\"#444\"/>\n"
          << "<text x=\"" << kLeft - 8 << "\" y=\"" << py + 4
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(t)
          << "</text>\n";
    }
    s << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << xlabel
      << "</text>\n"
      << "<text x=\"16\" y=\"" << (kTop + kHeight - kBottom) / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
      << "transform=\"rotate(-90 16 " << (kTop + kHeight - kBottom) / 2 << ")\">" << ylabel
      << "</text>\n";
}

} // namespace

BoxStats box_stats(const std::string& label, std::vector<double> values) {
    if (values.empty()) throw InvalidParams("box_stats: empty sample");
    std::sort(values.begin(), values.end());
    auto quantile = [&](double p) {
        const double pos = p * (static_cast<double>(values.size()) - 1.0);
        const std::size_t i = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(i);
        if (i + 1 >= values.size()) return values.back();
        return values[i] * (1.0 - frac) + values[i + 1] * frac;
    };
    BoxStats b;
    b.label = label;
    b.q1 = quantile(0.25);
    b.median = quantile(0.5);
    b.q3 = quantile(0.75);
    const double iqr = b.q3 - b.q1;
    b.whisker_lo = std::max(values.front(), b.q1 - 1.5 * iqr);
    b.whisker_hi = std::min(values.back(), b.q3 + 1.5 * iqr);
    return b;
}

std::string line_plot(const std::string& title, const std::string& xlabel,
                      const std::string& ylabel, const std::vector<Series>& series) {
    Range xr, yr;
    bool first = true;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (first) {
                xr.lo = xr.hi = s.x[i];
                yr.lo = yr.hi = s.y[i];
                first = false;
            }
            xr.expand(s.x[i]);
            yr.expand(s.y[i]);
        }
    xr.finalize();
    yr.finalize();

    std::ostringstream out;
    open_svg(out, title);
    axes(out, xr, yr, xlabel, ylabel);
    double legend_y = kTop + 14;
    for (const auto& s : series) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"";
        if (s.dashed) out << " stroke-dasharray=\"6 4\"";
        out << " points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            out << map_x(s.x[i], xr) << ',' << map_y(s.y[i], yr) << ' ';
        out << "\"/>\n";
        out << "<line x1=\"" << kWidth - kRight - 150 << "\" y1=\"" << legend_y - 4 << "\" x2=\""
            << kWidth - kRight - 126 << "\" y2=\"" << legend_y - 4 << "\" stroke=\"" << s.color
            << "\" stroke-width=\"2\"" << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n"
            << "<text x=\"" << kWidth - kRight - 120 << "\" y=\"" << legend_y
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label << "</text>\n";
        legend_y += 16;
    }
    out << "</svg>\n";
    return out.str();
}

std::string box_plot(const std::string& title, const std::string& ylabel,
                     const std::vector<BoxStats>& boxes) {
    Range yr;
    bool first = true;
    for (const auto& b : boxes) {
        if (first) {
            yr.lo = b.whisker_lo;
            yr.hi = b.whisker_hi;
            first = false;
        }
        yr.expand(b.whisker_lo);
        yr.expand(b.whisker_hi);
    }
    yr.finalize();

    std::ostringstream out;
    open_svg(out, title);
    Range xr{0.0, static_cast<double>(boxes.size())};
    axes(out, xr, yr, "", ylabel, /*x_ticks=*/false);
    const double slot = (kWidth - kLeft - kRight) / static_cast<double>(boxes.size());
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        const auto& b = boxes[i];
        const double cx = kLeft + slot * (static_cast<double>(i) + 0.5);
        const double half = std::min(30.0, 0.3 * slot);
        const double yq1 = map_y(b.q1, yr), yq3 = map_y(b.q3, yr), ymed = map_y(b.median, yr);
        const double ylo = map_y(b.whisker_lo, yr), yhi = map_y(b.whisker_hi, yr);
        out << "<line x1=\"" << cx << "\" y1=\"" << ylo << "\" x2=\"" << cx << "\" y2=\"" << yq1
            << "\" stroke=\"#444\"/>\n"
            << "<line x1=\"" << cx << "\" y1=\"" << yhi << "\" x2=\"" << cx << "\" y2=\"" << yq3
            << "\" stroke=\"#444\"/>\n"
            << "<line x1=\"" << cx - half * 0.6 << "\" y1=\"" << ylo << "\" x2=\""
            << cx + half * 0.6 << "\" y2=\"" << ylo << "\" stroke=\"#444\"/>\n"
            << "<line x1=\"" << cx - half * 0.6 << "\" y1=\"" << yhi << "\" x2=\""
            << cx + half * 0.6 << "\" y2=\"" << yhi << "\" stroke=\"#444\"/>\n"
            << "<rect x=\"" << cx - half << "\" y=\"" << yq3 << "\" width=\"" << 2 * half
            << "\" height=\"" << yq1 - yq3 << "\" fill=\"" << b.color
            << "\" fill-opacity=\"0.35\" stroke=\"" << b.color << "\"/>\n"
            << "<line x1=\"" << cx - half << "\" y1=\"" << ymed << "\" x2=\"" << cx + half
            << "\" y2=\"" << ymed << "\" stroke=\"" << b.color << "\" stroke-width=\"2\"/>\n"
            << "<text x=\"" << cx << "\" y=\"" << kHeight - kBottom + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << b.label
            << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

std::string histogram(const std::string& title, const std::string& xlabel,
                      const std::vector<double>& edges, const std::vector<double>& mass,
                      double mark) {
    if (edges.size() != mass.size() + 1 || mass.empty())
        throw InvalidParams("histogram: need edges.size() == mass.size() + 1");
    Range xr{edges.front(), edges.back()};
    Range yr{0.0, 0.0};
    // Plot density (mass / width) so uneven bins remain comparable.
    std::vector<double> density(mass.size());
    for (std::size_t i = 0; i < mass.size(); ++i) {
        const double w = edges[i + 1] - edges[i];
        density[i] = w > 0.0 ? mass[i] / w : 0.0;
        yr.expand(density[i]);
    }
    if (std::isfinite(mark)) xr.expand(mark);
    xr.finalize();
    yr.finalize();
    yr.lo = 0.0;

    std::ostringstream out;
    open_svg(out, title);
    axes(out, xr, yr, xlabel, "density");
    for (std::size_t i = 0; i < mass.size(); ++i) {
        const double x0 = map_x(edges[i], xr), x1 = map_x(edges[i + 1], xr);
        const double y = map_y(density[i], yr);
        out << "<rect x=\"" << x0 << "\" y=\"" << y << "\" width=\"" << x1 - x0 << "\" height=\""
            << kHeight - kBottom - y << "\" fill=\"#1f77b4\" fill-opacity=\"0.55\" "
            << "stroke=\"#1f77b4\"/>\n";
    }
    if (std::isfinite(mark)) {
        const double px = map_x(mark, xr);
        out << "<line x1=\"" << px << "\" y1=\"" << kTop << "\" x2=\"" << px << "\" y2=\""
            << kHeight - kBottom << "\" stroke=\"#222\" stroke-width=\"2\"/>\n";
    }
    out << "</svg>\n";
    return out.str();
}

void write_svg(const std::string& path, const std::string& content) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open for writing: " + path);
    f << content;
    if (!f) throw IoError("write failed: " + path);
}

} // namespace inlapf::svg
