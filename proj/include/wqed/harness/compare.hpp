// compare.hpp: Discrepancy metrics between the two engines

#pragma once

#include <string>
#include <vector>

#include "wqed/map2d.hpp"

namespace wqed::harness {

enum class Resample { None, Linear };

struct CompareEntry {
    std::string name;
    double linf{0.0}; // max|a - b| / max(max|a|, max|b|, 1e-12)
    double l2{0.0};   // ||a - b||_2 / max(||a||_2, ||b||_2, 1e-12)
    double tolerance{0.02};
    bool pass{true};
    std::string grid; // short description of the common axis
};

struct CompareReport {
    std::vector<CompareEntry> entries;
    std::vector<std::string> diagnostics;

    bool all_pass() const;
    std::string to_text() const;
};

// Series on a uniform axis. Without a resample rule the axes must match
// (AxisMismatch); with Resample::Linear `b` is interpolated onto `a`'s axis
// over their overlap.
CompareEntry compare_series(const std::string& name, const Axis& axis_a,
                            const std::vector<double>& a, const Axis& axis_b,
                            const std::vector<double>& b, double tolerance,
                            Resample rule = Resample::None);

// Complex maps compared entrywise (use `modulus` to compare |a| with |b|).
CompareEntry compare_maps(const std::string& name, const ComplexMap2D& a, const ComplexMap2D& b,
                          double tolerance, Resample rule = Resample::None,
                          bool modulus = false);

} // namespace wqed::harness
