#include "wqed/harness/io.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "wqed/errors.hpp"

namespace wqed::harness {
namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

void write_meta(std::ostream& out, const Metadata& meta) {
    for (const auto& [k, v] : meta) out << '#' << k << '=' << v << '\n';
}

std::string axis_text(const Axis& a) {
    return fmt::format("{},{},{},{}", a.label, format_number(a.start), format_number(a.step), a.size);
}

} // namespace

std::string format_number(double v) { return fmt::format("{}", v); }

void write_columns(const std::filesystem::path& path, const Metadata& meta,
                   const std::vector<std::string>& names,
                   const std::vector<std::vector<double>>& columns) {
    if (names.size() != columns.size()) throw ShapeMismatch("column names and data differ in count");
    const std::size_t rows = columns.empty() ? 0 : columns.front().size();
    for (const auto& c : columns)
        if (c.size() != rows) throw ShapeMismatch("columns of unequal length in " + path.string());
    auto out = open_out(path);
    write_meta(out, meta);
    for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
    out << '\n';
    std::string row;
    for (std::size_t r = 0; r < rows; ++r) {
        row.clear();
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (c) row += ',';
            row += format_number(columns[c][r]);
        }
        out << row << '\n';
    }
}

std::vector<std::filesystem::path> write_map(const std::filesystem::path& dir,
                                             const std::string& stem, const ComplexMap2D& map,
                                             Metadata meta) {
    map.validate();
    meta.emplace_back("axis1", axis_text(map.axis1));
    meta.emplace_back("axis2", axis_text(map.axis2));
    meta.emplace_back("layout", "row i = axis1 sample i; column j = axis2 sample j");
    std::vector<std::filesystem::path> paths;
    for (const char* part : {"re", "im"}) {
        const auto path = dir / fmt::format("{}_{}.csv", stem, part);
        auto out = open_out(path);
        write_meta(out, meta);
        out << "#part=" << part << '\n';
        const bool re = part[0] == 'r';
        std::string row;
        for (Eigen::Index i = 0; i < map.values.rows(); ++i) {
            row.clear();
            for (Eigen::Index j = 0; j < map.values.cols(); ++j) {
                if (j) row += ',';
                const auto v = map.values(i, j);
                row += format_number(re ? v.real() : v.imag());
            }
            out << row << '\n';
        }
        paths.push_back(path);
    }
    return paths;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    CsvTable t;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq != std::string::npos) t.meta.emplace_back(line.substr(1, eq - 1), line.substr(eq + 1));
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        char* end = nullptr;
        const double first = cells.empty() ? 0.0 : std::strtod(cells[0].c_str(), &end);
        (void)first;
        if (t.names.empty() && t.rows.empty() && end == cells[0].c_str()) {
            t.names = cells;
            continue;
        }
        std::vector<double> row;
        for (const auto& c : cells) row.push_back(std::stod(c));
        t.rows.push_back(std::move(row));
    }
    return t;
}

} // namespace wqed::harness
