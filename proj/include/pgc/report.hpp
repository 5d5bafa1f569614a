#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "pgc/detector.hpp"

namespace pgc {

/// Shortest round-trippable text for CSV cells; infinities as "inf"/"-inf".
std::string format_number(double v);

struct NamedCurve {
    std::string label;
    const RocCurve* curve;
};

/// Line plot of pd against pfa, one polyline per curve.
std::string roc_svg(std::string_view title, const std::vector<NamedCurve>& curves);

void write_text_file(const std::filesystem::path& path, std::string_view contents);

} // namespace pgc
