#include "wqed/harness/compare.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include <fmt/format.h>

#include "wqed/errors.hpp"

namespace wqed::harness {
namespace {

constexpr double kFloor = 1e-12;

std::string describe(const Axis& a) {
    return fmt::format("{}[{:.6g}:{:.6g}:{}]", a.label, a.start, a.step, a.size);
}

// Linear interpolation weight of `x` on `axis`; nullopt outside its span.
struct Bracket {
    std::size_t i;
    double w; // weight of i + 1
};
std::optional<Bracket> bracket(const Axis& axis, double x) {
    if (axis.size == 0) return std::nullopt;
    const double u = (x - axis.start) / axis.step;
    const double last = static_cast<double>(axis.size - 1);
    if (u < -1e-9 || u > last + 1e-9) return std::nullopt;
    const double uc = std::clamp(u, 0.0, last);
    auto i = static_cast<std::size_t>(std::floor(uc));
    if (i + 1 >= axis.size) i = axis.size >= 2 ? axis.size - 2 : 0;
    return Bracket{i, axis.size >= 2 ? uc - static_cast<double>(i) : 0.0};
}

template <class T>
CompareEntry finish(const std::string& name, const std::vector<T>& a, const std::vector<T>& b,
                    double tolerance, std::string grid) {
    double max_diff = 0.0, max_a = 0.0, max_b = 0.0, sd = 0.0, sa = 0.0, sb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = std::abs(a[i] - b[i]);
        max_diff = std::max(max_diff, d);
        max_a = std::max(max_a, std::abs(a[i]));
        max_b = std::max(max_b, std::abs(b[i]));
        sd += d * d;
        sa += std::norm(a[i]);
        sb += std::norm(b[i]);
    }
    CompareEntry e;
    e.name = name;
    e.linf = max_diff / std::max({max_a, max_b, kFloor});
    e.l2 = std::sqrt(sd) / std::max({std::sqrt(sa), std::sqrt(sb), kFloor});
    e.tolerance = tolerance;
    e.pass = e.linf <= tolerance;
    e.grid = std::move(grid);
    return e;
}

} // namespace

bool CompareReport::all_pass() const {
    return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.pass; });
}

std::string CompareReport::to_text() const {
    std::string out;
    for (const auto& e : entries)
        out += fmt::format("{:<28} linf={:.6e} l2={:.6e} tol={:.3g} {} grid={}\n", e.name, e.linf,
                           e.l2, e.tolerance, e.pass ? "PASS" : "FAIL", e.grid);
    for (const auto& d : diagnostics) out += "# " + d + "\n";
    return out;
}

CompareEntry compare_series(const std::string& name, const Axis& axis_a,
                            const std::vector<double>& a, const Axis& axis_b,
                            const std::vector<double>& b, double tolerance, Resample rule) {
    if (a.size() != axis_a.size || b.size() != axis_b.size)
        throw ShapeMismatch(name + ": series length differs from its axis");
    if (axis_a.same_as(axis_b, 1e-9)) return finish(name, a, b, tolerance, describe(axis_a));
    if (rule == Resample::None)
        throw AxisMismatch(fmt::format("{}: axes {} and {} differ and no resample rule was given",
                                       name, describe(axis_a), describe(axis_b)));
    std::vector<double> ra, rb;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto br = bracket(axis_b, axis_a.at(i));
        if (!br) continue;
        const double hi = br->i + 1 < b.size() ? b[br->i + 1] : b[br->i];
        ra.push_back(a[i]);
        rb.push_back((1.0 - br->w) * b[br->i] + br->w * hi);
    }
    if (ra.empty()) throw AxisMismatch(name + ": axes do not overlap");
    return finish(name, ra, rb, tolerance, describe(axis_a) + " (linear resample)");
}

CompareEntry compare_maps(const std::string& name, const ComplexMap2D& a, const ComplexMap2D& b,
                          double tolerance, Resample rule, bool modulus) {
    a.validate();
    b.validate();
    auto value = [&](const ComplexMap2D& m, Eigen::Index i, Eigen::Index j) -> std::complex<double> {
        return modulus ? std::complex<double>(std::abs(m.values(i, j))) : m.values(i, j);
    };
    std::vector<std::complex<double>> va, vb;
    std::string grid = describe(a.axis1) + "x" + describe(a.axis2);
    if (a.axis1.same_as(b.axis1, 1e-9) && a.axis2.same_as(b.axis2, 1e-9)) {
        va.reserve(static_cast<std::size_t>(a.values.size()));
        vb.reserve(va.capacity());
        for (Eigen::Index j = 0; j < a.values.cols(); ++j)
            for (Eigen::Index i = 0; i < a.values.rows(); ++i) {
                va.push_back(value(a, i, j));
                vb.push_back(value(b, i, j));
            }
    } else {
        if (rule == Resample::None)
            throw AxisMismatch(fmt::format("{}: map axes {} and {} differ and no resample rule was given",
                                           name, grid, describe(b.axis1) + "x" + describe(b.axis2)));
        for (Eigen::Index j = 0; j < a.values.cols(); ++j) {
            const auto bj = bracket(b.axis2, a.axis2.at(static_cast<std::size_t>(j)));
            if (!bj) continue;
            for (Eigen::Index i = 0; i < a.values.rows(); ++i) {
                const auto bi = bracket(b.axis1, a.axis1.at(static_cast<std::size_t>(i)));
                if (!bi) continue;
                const auto i0 = static_cast<Eigen::Index>(bi->i), j0 = static_cast<Eigen::Index>(bj->i);
                const auto i1 = std::min<Eigen::Index>(i0 + 1, b.values.rows() - 1);
                const auto j1 = std::min<Eigen::Index>(j0 + 1, b.values.cols() - 1);
                const auto v = (1 - bi->w) * (1 - bj->w) * value(b, i0, j0) +
                               bi->w * (1 - bj->w) * value(b, i1, j0) +
                               (1 - bi->w) * bj->w * value(b, i0, j1) + bi->w * bj->w * value(b, i1, j1);
                va.push_back(value(a, i, j));
                vb.push_back(v);
            }
        }
        if (va.empty()) throw AxisMismatch(name + ": map axes do not overlap");
        grid += " (bilinear resample)";
    }
    return finish(name, va, vb, tolerance, grid);
}

} // namespace wqed::harness
