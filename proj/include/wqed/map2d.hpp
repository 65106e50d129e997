// map2d.hpp: Dense complex map over two labelled uniform axes

#pragma once

#include <cstddef>
#include <map>
#include <string>

#include <Eigen/Dense>

#include "wqed/system.hpp"

namespace wqed {

struct Axis {
    std::string label;
    double start{0.0};
    double step{1.0};
    std::size_t size{0};

    double at(std::size_t i) const { return start + static_cast<double>(i) * step; }
    bool same_as(const Axis& other, double tol = 1e-12) const;
};

// values(i, j) is the sample at (axis1.at(i), axis2.at(j)).
struct ComplexMap2D {
    Axis axis1;
    Axis axis2;
    Eigen::MatrixXcd values;

    ComplexMap2D() = default;
    ComplexMap2D(Axis a1, Axis a2);
    ComplexMap2D(Axis a1, Axis a2, Eigen::MatrixXcd v);

    // Throws ShapeMismatch if axis lengths disagree with the matrix extents.
    void validate() const;

    double max_abs() const { return values.size() ? values.cwiseAbs().maxCoeff() : 0.0; }
};

using PairMaps = std::map<ChannelPair, ComplexMap2D>;

} // namespace wqed
