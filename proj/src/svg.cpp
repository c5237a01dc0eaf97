#include <hankelmc/svg.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <hankelmc/errors.hpp>

namespace hankelmc
{

namespace
{

constexpr double kWidth   = 640.0;
constexpr double kHeight  = 420.0;
constexpr double kLeft    = 70.0;
constexpr double kRight   = 150.0;
constexpr double kTop     = 40.0;
constexpr double kBottom  = 55.0;

const char* const kPalette[] = {"#000000", "#d62728", "#1f77b4", "#2ca02c",
                                "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string escape(const std::string& text)
{
    std::string out;
    for (char c : text) {
        switch (c) {
        case '&':
            out += "&amp;";
            break;
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        case '"':
            out += "&quot;";
            break;
        default:
            out += c;
        }
    }
    return out;
}

void open_document(std::ostringstream& os, const std::string& title)
{
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
       << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
       << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << fmt(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\""
       << " font-size=\"14\">" << escape(title) << "</text>\n";
}

void axis_labels(std::ostringstream& os, const std::string& x_label,
                 const std::string& y_label)
{
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    os << "<text x=\"" << fmt(kLeft + plot_w / 2) << "\" y=\""
       << fmt(kHeight - 12) << "\" text-anchor=\"middle\">" << escape(x_label)
       << "</text>\n";
    os << "<text x=\"16\" y=\"" << fmt(kTop + plot_h / 2)
       << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
       << fmt(kTop + plot_h / 2) << ")\">" << escape(y_label) << "</text>\n";
}

} // namespace

std::string render_svg(const LinePlot& plot)
{
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;

    auto ty = [&](double y) { return plot.log_y ? std::log10(y) : y; };

    double x_lo = std::numeric_limits<double>::infinity();
    double x_hi = -x_lo;
    double y_lo = x_lo;
    double y_hi = -x_lo;
    for (const auto& s : plot.series) {
        for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
            if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k]) ||
                (plot.log_y && s.y[k] <= 0.0)) {
                continue;
            }
            x_lo = std::min(x_lo, s.x[k]);
            x_hi = std::max(x_hi, s.x[k]);
            y_lo = std::min(y_lo, ty(s.y[k]));
            y_hi = std::max(y_hi, ty(s.y[k]));
        }
    }
    if (!std::isfinite(x_lo)) {
        x_lo = 0.0;
        x_hi = 1.0;
        y_lo = 0.0;
        y_hi = 1.0;
    }
    if (plot.log_y) {
        y_lo = std::floor(y_lo);
        y_hi = std::ceil(y_hi);
    }
    if (x_hi <= x_lo) {
        x_hi = x_lo + 1.0;
    }
    if (y_hi <= y_lo) {
        y_hi = y_lo + 1.0;
    }

    auto px = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * plot_w; };
    auto py = [&](double y) {
        return kTop + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h;
    };

    std::ostringstream os;
    open_document(os, plot.title);
    os << "<rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kTop) << "\" width=\""
       << fmt(plot_w) << "\" height=\"" << fmt(plot_h)
       << "\" fill=\"none\" stroke=\"black\"/>\n";

    for (int t = 0; t <= 5; ++t) {
        const double xv = x_lo + (x_hi - x_lo) * t / 5.0;
        os << "<text x=\"" << fmt(px(xv)) << "\" y=\"" << fmt(kTop + plot_h + 16)
           << "\" text-anchor=\"middle\">" << tick_label(xv) << "</text>\n";
    }
    if (plot.log_y) {
        for (double e = y_lo; e <= y_hi + 0.5; e += 1.0) {
            os << "<line x1=\"" << fmt(kLeft) << "\" x2=\"" << fmt(kLeft + plot_w)
               << "\" y1=\"" << fmt(py(e)) << "\" y2=\"" << fmt(py(e))
               << "\" stroke=\"#dddddd\"/>\n";
            os << "<text x=\"" << fmt(kLeft - 6) << "\" y=\"" << fmt(py(e) + 4)
               << "\" text-anchor=\"end\">1e" << static_cast<int>(e)
               << "</text>\n";
        }
    } else {
        for (int t = 0; t <= 5; ++t) {
            const double yv = y_lo + (y_hi - y_lo) * t / 5.0;
            os << "<text x=\"" << fmt(kLeft - 6) << "\" y=\"" << fmt(py(yv) + 4)
               << "\" text-anchor=\"end\">" << tick_label(yv) << "</text>\n";
        }
    }

    std::size_t idx = 0;
    for (const auto& s : plot.series) {
        const char* colour = kPalette[idx % std::size(kPalette)];
        os << "<polyline fill=\"none\" stroke=\"" << colour
           << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
            if (!std::isfinite(s.y[k]) || (plot.log_y && s.y[k] <= 0.0)) {
                continue;
            }
            os << fmt(px(s.x[k])) << ',' << fmt(py(ty(s.y[k]))) << ' ';
        }
        os << "\"/>\n";
        const double ly = kTop + 14 + 18.0 * static_cast<double>(idx);
        os << "<line x1=\"" << fmt(kWidth - kRight + 10) << "\" x2=\""
           << fmt(kWidth - kRight + 30) << "\" y1=\"" << fmt(ly - 4)
           << "\" y2=\"" << fmt(ly - 4) << "\" stroke=\"" << colour
           << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << fmt(kWidth - kRight + 36) << "\" y=\"" << fmt(ly)
           << "\">" << escape(s.label) << "</text>\n";
        ++idx;
    }
    axis_labels(os, plot.x_label, plot.y_label);
    os << "</svg>\n";
    return os.str();
}

std::string render_svg(const Heatmap& map)
{
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    const auto rows     = map.values.rows();
    const auto cols     = map.values.cols();

    std::ostringstream os;
    open_document(os, map.title);
    if (rows > 0 && cols > 0) {
        const double cw = plot_w / static_cast<double>(cols);
        const double ch = plot_h / static_cast<double>(rows);
        const double span = map.vmax > map.vmin ? map.vmax - map.vmin : 1.0;
        for (Eigen::Index i = 0; i < rows; ++i) {
            for (Eigen::Index j = 0; j < cols; ++j) {
                double t = (map.values(i, j) - map.vmin) / span;
                if (!std::isfinite(t)) {
                    t = 0.0;
                }
                t = std::clamp(t, 0.0, 1.0);
                const int g = static_cast<int>(std::lround(255.0 * t));
                const double x = kLeft + cw * static_cast<double>(j);
                const double y = kTop + plot_h - ch * static_cast<double>(i + 1);
                os << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y)
                   << "\" width=\"" << fmt(cw) << "\" height=\"" << fmt(ch)
                   << "\" fill=\"rgb(" << g << ',' << g << ',' << g
                   << ")\"><title>" << tick_label(map.values(i, j))
                   << "</title></rect>\n";
            }
        }
        for (Eigen::Index j = 0;
             j < cols && j < static_cast<Eigen::Index>(map.x_ticks.size()); ++j) {
            os << "<text x=\"" << fmt(kLeft + cw * (static_cast<double>(j) + 0.5))
               << "\" y=\"" << fmt(kTop + plot_h + 16)
               << "\" text-anchor=\"middle\">" << escape(map.x_ticks[j])
               << "</text>\n";
        }
        for (Eigen::Index i = 0;
             i < rows && i < static_cast<Eigen::Index>(map.y_ticks.size()); ++i) {
            os << "<text x=\"" << fmt(kLeft - 6) << "\" y=\""
               << fmt(kTop + plot_h - ch * (static_cast<double>(i) + 0.5) + 4)
               << "\" text-anchor=\"end\">" << escape(map.y_ticks[i])
               << "</text>\n";
        }
    }
    os << "<rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kTop) << "\" width=\""
       << fmt(plot_w) << "\" height=\"" << fmt(plot_h)
       << "\" fill=\"none\" stroke=\"black\"/>\n";

    // Colour bar.
    const double bx = kWidth - kRight + 30;
    for (int k = 0; k < 10; ++k) {
        const int g = static_cast<int>(std::lround(255.0 * k / 9.0));
        os << "<rect x=\"" << fmt(bx) << "\" y=\""
           << fmt(kTop + plot_h - plot_h * (k + 1) / 10.0) << "\" width=\"20\""
           << " height=\"" << fmt(plot_h / 10.0) << "\" fill=\"rgb(" << g
           << ',' << g << ',' << g << ")\"/>\n";
    }
    os << "<rect x=\"" << fmt(bx) << "\" y=\"" << fmt(kTop)
       << "\" width=\"20\" height=\"" << fmt(plot_h)
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    os << "<text x=\"" << fmt(bx + 26) << "\" y=\"" << fmt(kTop + 10) << "\">"
       << tick_label(map.vmax) << "</text>\n";
    os << "<text x=\"" << fmt(bx + 26) << "\" y=\"" << fmt(kTop + plot_h) << "\">"
       << tick_label(map.vmin) << "</text>\n";

    axis_labels(os, map.x_label, map.y_label);
    os << "</svg>\n";
    return os.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ValidationError("cannot write '" + path.string() + "'");
    }
    out << text;
}

} // namespace hankelmc
