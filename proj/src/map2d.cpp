#include "wqed/map2d.hpp"

#include <cmath>
#include <utility>

#include <fmt/format.h>

#include "wqed/errors.hpp"

namespace wqed {

bool Axis::same_as(const Axis& other, double tol) const {
    const double scale = std::max(1.0, std::abs(step));
    return size == other.size && std::abs(start - other.start) <= tol * scale &&
           std::abs(step - other.step) <= tol * scale;
}

ComplexMap2D::ComplexMap2D(Axis a1, Axis a2)
    : axis1(std::move(a1)), axis2(std::move(a2)),
      values(Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(axis1.size),
                                    static_cast<Eigen::Index>(axis2.size))) {}

ComplexMap2D::ComplexMap2D(Axis a1, Axis a2, Eigen::MatrixXcd v)
    : axis1(std::move(a1)), axis2(std::move(a2)), values(std::move(v)) {
    validate();
}

void ComplexMap2D::validate() const {
    if (static_cast<std::size_t>(values.rows()) != axis1.size ||
        static_cast<std::size_t>(values.cols()) != axis2.size)
        throw ShapeMismatch(fmt::format("map is {}x{} but axes have {} and {} points",
                                        values.rows(), values.cols(), axis1.size, axis2.size));
}

} // namespace wqed
