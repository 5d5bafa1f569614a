#include "pgc/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pgc/error.hpp"

namespace pgc {

std::string format_number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

namespace {

constexpr const char* kPalette[] = {"#c0392b", "#2471a3", "#1e8449", "#7d3c98", "#b9770e"};

} // namespace

std::string roc_svg(std::string_view title, const std::vector<NamedCurve>& curves) {
    constexpr double size = 360.0, margin = 48.0;
    auto px = [&](double pfa) { return margin + pfa * size; };
    auto py = [&](double pd) { return margin + (1.0 - pd) * size; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size + 2 * margin + 120
       << "\" height=\"" << size + 2 * margin << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << margin << "\" y=\"" << margin / 2 << "\">" << title << "</text>\n";
    os << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << size << "\" height=\"" << size
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(1) << "\" y2=\"" << py(1)
       << "\" stroke=\"#999\" stroke-dasharray=\"4 4\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double t = k / 4.0;
        os << "<text x=\"" << px(t) - 8 << "\" y=\"" << margin + size + 16 << "\">" << t << "</text>\n";
        os << "<text x=\"" << margin - 30 << "\" y=\"" << py(t) + 4 << "\">" << t << "</text>\n";
    }
    os << "<text x=\"" << margin + size / 2 - 10 << "\" y=\"" << margin + size + 36 << "\">Pfa</text>\n";
    os << "<text x=\"" << 8 << "\" y=\"" << margin + size / 2 << "\">Pd</text>\n";

    for (std::size_t c = 0; c < curves.size(); ++c) {
        const char* color = kPalette[c % std::size(kPalette)];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (const auto& p : curves[c].curve->points) os << px(p.pfa) << ',' << py(p.pd) << ' ';
        os << "\"/>\n";
        os << "<text x=\"" << margin + size + 12 << "\" y=\"" << margin + 16 + 18 * static_cast<double>(c)
           << "\" fill=\"" << color << "\">" << curves[c].label << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    os.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!os) throw IoError("write failed for " + path.string());
}

} // namespace pgc
