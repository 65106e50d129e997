// io.hpp: CSV writers with self-describing '#key=value' headers

#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "wqed/map2d.hpp"

namespace wqed::harness {

using Metadata = std::vector<std::pair<std::string, std::string>>;

// Shortest round-trip decimal representation.
std::string format_number(double v);

// Columns of equal length with a header row of names.
void write_columns(const std::filesystem::path& path, const Metadata& meta,
                   const std::vector<std::string>& names,
                   const std::vector<std::vector<double>>& columns);

// Writes <stem>_re.csv and <stem>_im.csv; returns both paths.
std::vector<std::filesystem::path> write_map(const std::filesystem::path& dir,
                                             const std::string& stem, const ComplexMap2D& map,
                                             Metadata meta);

struct CsvTable {
    Metadata meta;
    std::vector<std::string> names;
    std::vector<std::vector<double>> rows;
};
CsvTable read_csv(const std::filesystem::path& path);

} // namespace wqed::harness
