#include "adaudit/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "adaudit/errors.hpp"

namespace adaudit::report {

namespace {

std::string fmt(double v, const char* spec = "%.6f") {
    char buf[48];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
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

// x position for a fraction in [0,1]
double fx(double frac) { return 70.0 + frac * 500.0; }

void fraction_row(std::ostringstream& svg, const char* campaign, double y, double s,
                  const stats::Interval& ci, std::uint64_t n, const char* color) {
    svg << "  <line class=\"ci\" data-campaign=\"" << campaign << "\" data-lo=\"" << fmt(ci.lo)
        << "\" data-hi=\"" << fmt(ci.hi) << "\" x1=\"" << fmt(fx(ci.lo), "%.2f") << "\" y1=\""
        << fmt(y, "%.1f") << "\" x2=\"" << fmt(fx(ci.hi), "%.2f") << "\" y2=\"" << fmt(y, "%.1f")
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "  <circle class=\"frac\" data-campaign=\"" << campaign << "\" data-s=\"" << fmt(s)
        << "\" data-n=\"" << n << "\" cx=\"" << fmt(fx(s), "%.2f") << "\" cy=\"" << fmt(y, "%.1f")
        << "\" r=\"5\" fill=\"" << color << "\"/>\n";
}

}  // namespace

std::string fraction_plot_svg(const ExperimentRow& row) {
    const auto& r = row.result;
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"200\" "
           "class=\"fraction-plot\" data-experiment=\""
        << xml_escape(row.experiment_id) << "\" data-audience=\"" << xml_escape(row.audience)
        << "\" data-d=\"" << fmt(r.d) << "\" data-z=\"" << fmt(r.z, "%.4f") << "\" data-p=\""
        << fmt(r.p_value, "%.6g") << "\" data-significant=\"" << (r.significant ? 1 : 0)
        << "\">\n";
    svg << "  <title>" << xml_escape(row.experiment_id) << "</title>\n";
    svg << "  <line x1=\"70\" y1=\"150\" x2=\"570\" y2=\"150\" stroke=\"#999\"/>\n";
    for (int tick = 0; tick <= 4; ++tick) {
        const double f = tick * 0.25;
        svg << "  <text x=\"" << fmt(fx(f), "%.1f")
            << "\" y=\"168\" font-size=\"11\" text-anchor=\"middle\">" << fmt(f, "%.2f")
            << "</text>\n";
    }
    svg << "  <text x=\"10\" y=\"64\" font-size=\"12\">for-profit</text>\n";
    svg << "  <text x=\"10\" y=\"114\" font-size=\"12\">public</text>\n";
    fraction_row(svg, "skewed", 60.0, r.s_f_b, r.ci_f, r.n_f, "#1f77b4");
    fraction_row(svg, "public", 110.0, r.s_p_b, r.ci_p, r.n_p, "#ff7f0e");
    svg << "  <text x=\"70\" y=\"24\" font-size=\"12\">" << xml_escape(row.experiment_id)
        << ": D=" << fmt(r.d, "%.3f") << " Z=" << fmt(r.z, "%.2f") << " n_f=" << r.n_f
        << " n_p=" << r.n_p << (r.significant ? " (significant)" : "") << "</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

std::string z_chart_svg(const std::vector<ExperimentRow>& rows, double z_critical) {
    const double width = 120.0 + 90.0 * static_cast<double>(rows.size());
    double z_max = z_critical;
    for (const auto& r : rows) z_max = std::max(z_max, r.result.z);
    z_max = std::max(z_max * 1.15, 2.0);

    auto y_of = [&](double z) { return 240.0 - std::max(0.0, z) / z_max * 200.0; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width, "%.0f")
        << "\" height=\"280\" class=\"z-chart\" data-z-critical=\"" << fmt(z_critical, "%.4f")
        << "\">\n";
    svg << "  <line x1=\"50\" y1=\"240\" x2=\"" << fmt(width - 20.0, "%.0f")
        << "\" y2=\"240\" stroke=\"#333\"/>\n";
    svg << "  <line class=\"threshold\" x1=\"50\" y1=\"" << fmt(y_of(z_critical), "%.2f")
        << "\" x2=\"" << fmt(width - 20.0, "%.0f") << "\" y2=\"" << fmt(y_of(z_critical), "%.2f")
        << "\" stroke=\"#d62728\" stroke-dasharray=\"6,4\"/>\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        const double x = 60.0 + 90.0 * static_cast<double>(i);
        const double top = y_of(r.result.z);
        svg << "  <rect class=\"zbar\" data-experiment=\"" << xml_escape(r.experiment_id)
            << "\" data-z=\"" << fmt(r.result.z, "%.4f") << "\" data-significant=\""
            << (r.result.significant ? 1 : 0) << "\" x=\"" << fmt(x, "%.1f") << "\" y=\""
            << fmt(top, "%.2f") << "\" width=\"60\" height=\"" << fmt(240.0 - top, "%.2f")
            << "\" fill=\"" << (r.result.significant ? "#1f77b4" : "#aec7e8") << "\"/>\n";
        svg << "  <text x=\"" << fmt(x + 30.0, "%.1f")
            << "\" y=\"262\" font-size=\"10\" text-anchor=\"middle\">"
            << xml_escape(r.experiment_id) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

std::string pairs_table_svg(const std::vector<catalog::SchoolPair>& pairs) {
    std::ostringstream svg;
    const double height = 60.0 + 28.0 * static_cast<double>(pairs.size());
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"760\" height=\""
        << fmt(height, "%.0f") << "\" class=\"pairs-table\">\n";
    svg << "  <text x=\"20\" y=\"26\" font-size=\"13\" font-weight=\"bold\">School pairs"
        << "</text>\n";
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& p = pairs[i];
        const double y = 56.0 + 28.0 * static_cast<double>(i);
        svg << "  <text class=\"pair\" data-pair-id=\"" << xml_escape(p.pair_id)
            << "\" data-skewed=\"" << xml_escape(p.skewed_school.name) << "\" data-public=\""
            << xml_escape(p.public_school.name) << "\" x=\"20\" y=\"" << fmt(y, "%.1f")
            << "\" font-size=\"12\">" << xml_escape(p.pair_id) << ": "
            << xml_escape(p.skewed_school.name) << " (B=" << fmt(p.skewed_school.pct_black, "%.0f")
            << "%, W=" << fmt(p.skewed_school.pct_white, "%.0f") << "%) vs "
            << xml_escape(p.public_school.name) << " (B=" << fmt(p.public_school.pct_black, "%.0f")
            << "%, W=" << fmt(p.public_school.pct_white, "%.0f") << "%)</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << content;
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace adaudit::report
