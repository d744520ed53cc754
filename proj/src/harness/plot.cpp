#include "prunelab/harness/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "prunelab/errors.hpp"

namespace prunelab::harness {
namespace {

constexpr int kWidth = 800;
constexpr int kHeight = 600;
constexpr double kLeft = 80.0, kRight = 170.0, kTop = 50.0, kBottom = 70.0;
constexpr const char* kPalette[8] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                     "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

struct Point {
    double x, y;
    bool overlay;
};

struct Series {
    std::string label;
    std::vector<Point> points;
};

std::string esc(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

// Numeric series labels are shortened; others are kept verbatim.
std::string legend_label(const std::string& raw) {
    char* end = nullptr;
    const double v = std::strtod(raw.c_str(), &end);
    if (raw.empty() || end != raw.c_str() + raw.size()) return raw;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", std::abs(v) < 1e-14 ? 0.0 : v);
    return buf;
}

struct Axis {
    double lo, hi;
    bool log;
    double pixel_lo, pixel_hi;

    double map(double v) const {
        const double a = log ? std::log10(lo) : lo;
        const double b = log ? std::log10(hi) : hi;
        const double t = ((log ? std::log10(v) : v) - a) / (b - a);
        return pixel_lo + t * (pixel_hi - pixel_lo);
    }

    std::vector<double> ticks() const {
        std::vector<double> out;
        if (log) {
            const int e0 = static_cast<int>(std::floor(std::log10(lo) + 1e-12));
            const int e1 = static_cast<int>(std::ceil(std::log10(hi) - 1e-12));
            const bool fine = e1 - e0 <= 2;
            for (int e = e0; e <= e1; ++e) {
                for (double m : {1.0, 2.0, 5.0}) {
                    if (m != 1.0 && !fine) continue;
                    const double v = m * std::pow(10.0, e);
                    if (v >= lo * (1 - 1e-12) && v <= hi * (1 + 1e-12)) out.push_back(v);
                }
            }
            return out;
        }
        const double raw = (hi - lo) / 6.0;
        const double mag = std::pow(10.0, std::floor(std::log10(raw)));
        double step = mag;
        for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
            step = m * mag;
            if (step >= raw) break;
        }
        for (double v = std::ceil(lo / step - 1e-9) * step; v <= hi + step * 1e-9; v += step)
            out.push_back(v);
        return out;
    }
};

Axis make_axis(double lo, double hi, bool log, double p0, double p1) {
    if (log) {
        if (lo == hi) {
            lo /= 2.0;
            hi *= 2.0;
        } else {
            const double pad = std::pow(hi / lo, 0.04);
            lo /= pad;
            hi *= pad;
        }
    } else {
        if (lo == hi) {
            const double w = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
            lo -= w;
            hi += w;
        } else {
            const double pad = 0.04 * (hi - lo);
            lo -= pad;
            hi += pad;
        }
    }
    return {lo, hi, log, p0, p1};
}

}  // namespace

std::string emit_plot(const Table& table, const PlotSpec& spec) {
    const std::vector<std::string> series_cols =
        spec.series.empty() ? std::vector<std::string>{} : split_list(spec.series);
    std::vector<std::string> needed = {spec.x, spec.y};
    needed.insert(needed.end(), series_cols.begin(), series_cols.end());
    if (!spec.overlay.empty()) needed.push_back(spec.overlay);
    std::string missing;
    for (const auto& c : needed)
        if (table.column(c) < 0) missing += (missing.empty() ? "" : ", ") + c;
    if (!missing.empty()) throw InvalidArgument("plot: missing columns: " + missing);

    const int cx = table.column(spec.x);
    const int cy = table.column(spec.y);
    std::vector<int> cs;
    for (const auto& c : series_cols) cs.push_back(table.column(c));
    auto label_of = [&](const std::vector<std::string>& row) {
        if (cs.empty()) return spec.y;
        std::string label;
        for (std::size_t k = 0; k < cs.size(); ++k) {
            const std::string v = legend_label(row[static_cast<std::size_t>(cs[k])]);
            label += cs.size() == 1 ? v : (k ? ", " : "") + series_cols[k] + "=" + v;
        }
        return label;
    };
    const int co = spec.overlay.empty() ? -1 : table.column(spec.overlay);

    std::vector<Series> series;
    auto series_for = [&](const std::string& label) -> Series& {
        for (auto& s : series)
            if (s.label == label) return s;
        series.push_back({label, {}});
        return series.back();
    };
    auto value = [&](const std::string& cell, const std::string& col, bool is_y) {
        double v = parse_real(cell, col);
        if (is_y && spec.accuracy) v = 1.0 - v;
        return v;
    };
    auto usable = [&](double v, bool log) { return std::isfinite(v) && (!log || v > 0.0); };

    for (const auto& row : table.rows) {
        const std::string& xs = row[static_cast<std::size_t>(cx)];
        if (xs.empty()) continue;
        const double x = parse_real(xs, spec.x);
        if (!usable(x, spec.log_x)) continue;
        Series& s = series_for(label_of(row));
        const std::string& ys = row[static_cast<std::size_t>(cy)];
        if (!ys.empty()) {
            const double y = value(ys, spec.y, true);
            if (usable(y, spec.log_y)) s.points.push_back({x, y, false});
        }
        if (co >= 0) {
            const std::string& os = row[static_cast<std::size_t>(co)];
            if (!os.empty()) {
                const double y = value(os, spec.overlay, true);
                if (usable(y, spec.log_y)) s.points.push_back({x, y, true});
            }
        }
    }
    std::erase_if(series, [](const Series& s) { return s.points.empty(); });
    if (series.empty()) throw InvalidArgument("plot: no plottable rows");
    for (auto& s : series)
        std::stable_sort(s.points.begin(), s.points.end(),
                         [](const Point& a, const Point& b) { return a.x < b.x; });

    double xlo = series[0].points[0].x, xhi = xlo, ylo = series[0].points[0].y, yhi = ylo;
    for (const auto& s : series) {
        for (const auto& p : s.points) {
            xlo = std::min(xlo, p.x);
            xhi = std::max(xhi, p.x);
            ylo = std::min(ylo, p.y);
            yhi = std::max(yhi, p.y);
        }
    }
    const Axis ax = make_axis(xlo, xhi, spec.log_x, kLeft, kWidth - kRight);
    const Axis ay = make_axis(ylo, yhi, spec.log_y, kHeight - kBottom, kTop);

    std::ostringstream o;
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!spec.title.empty())
        o << "<text x=\"" << num((kLeft + kWidth - kRight) / 2) << "\" y=\"28\" text-anchor=\"middle\" "
          << "font-size=\"15\">" << esc(spec.title) << "</text>\n";

    const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
    o << "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
    for (double t : ax.ticks())
        o << "<line x1=\"" << num(ax.map(t)) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(ax.map(t))
          << "\" y2=\"" << num(y1) << "\"/>\n";
    for (double t : ay.ticks())
        o << "<line x1=\"" << num(x0) << "\" y1=\"" << num(ay.map(t)) << "\" x2=\"" << num(x1)
          << "\" y2=\"" << num(ay.map(t)) << "\"/>\n";
    o << "</g>\n";
    o << "<rect x=\"" << num(x0) << "\" y=\"" << num(y1) << "\" width=\"" << num(x1 - x0)
      << "\" height=\"" << num(y0 - y1) << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double t : ax.ticks())
        o << "<text x=\"" << num(ax.map(t)) << "\" y=\"" << num(y0 + 18)
          << "\" text-anchor=\"middle\">" << tick_label(t) << "</text>\n";
    for (double t : ay.ticks())
        o << "<text x=\"" << num(x0 - 6) << "\" y=\"" << num(ay.map(t) + 4)
          << "\" text-anchor=\"end\">" << tick_label(t) << "</text>\n";

    const std::string ylabel = spec.accuracy ? "1 - " + spec.y : spec.y;
    o << "<text x=\"" << num((x0 + x1) / 2) << "\" y=\"" << num(kHeight - 25.0)
      << "\" text-anchor=\"middle\">" << esc(spec.x) << (spec.log_x ? " (log)" : "") << "</text>\n";
    o << "<text transform=\"translate(22," << num((y0 + y1) / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">" << esc(ylabel) << (spec.log_y ? " (log)" : "")
      << "</text>\n";

    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = kPalette[i % 8];
        const auto& s = series[i];
        std::string line;
        int on_line = 0;
        for (const auto& p : s.points) {
            if (p.overlay) continue;
            line += (on_line++ ? " " : "") + num(ax.map(p.x)) + "," + num(ay.map(p.y));
        }
        if (on_line > 1)
            o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\""
              << line << "\"/>\n";
        for (const auto& p : s.points) {
            if (p.overlay)
                o << "<circle cx=\"" << num(ax.map(p.x)) << "\" cy=\"" << num(ay.map(p.y))
                  << "\" r=\"4\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
            else
                o << "<circle cx=\"" << num(ax.map(p.x)) << "\" cy=\"" << num(ay.map(p.y))
                  << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        }
    }

    const double lx = x1 + 14;
    double ly = y1 + 10;
    const std::string prefix = series_cols.size() == 1 ? series_cols[0] + " = " : "";
    for (std::size_t i = 0; i < series.size(); ++i, ly += 20) {
        o << "<rect class=\"legend\" x=\"" << num(lx) << "\" y=\"" << num(ly) << "\" width=\"14\" "
          << "height=\"10\" fill=\"" << kPalette[i % 8] << "\"/>\n"
          << "<text x=\"" << num(lx + 20) << "\" y=\"" << num(ly + 10) << "\">"
          << esc(prefix + series[i].label) << "</text>\n";
    }
    if (co >= 0)
        o << "<text x=\"" << num(lx) << "\" y=\"" << num(ly + 14) << "\">o " << esc(spec.overlay)
          << "</text>\n";
    o << "</svg>\n";
    return o.str();
}

PlotSpec default_plot(const SweepSpec& spec) {
    auto has = [&](const char* name) {
        return std::any_of(spec.axes.begin(), spec.axes.end(),
                           [&](const SweepAxis& a) { return a.name == name; });
    };
    PlotSpec p;
    p.title = spec.name;
    p.x = "n";
    p.series = "";
    if (has("kept") && has("ratio")) {
        p.x = "ratio";
        p.log_x = true;
        p.accuracy = true;
    } else if (has("kept")) {
        p.x = "kept";
        p.log_x = true;
        p.accuracy = true;
    }
    std::vector<std::string> cols;
    for (const auto& a : spec.axes) {
        if (a.values.size() < 2 || a.name == "n" || a.name == "kept" || a.name == p.x) continue;
        cols.push_back(a.name == "ratio" ? "p" : a.name);
    }
    p.series = join_list(cols);
    if (spec.empirics) p.overlay = "empirical_mean";
    return p;
}

}  // namespace prunelab::harness
