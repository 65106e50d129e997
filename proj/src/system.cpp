#include "wqed/system.hpp"

#include <cmath>

#include <fmt/format.h>

#include "wqed/errors.hpp"

namespace wqed {

std::string to_string(Coupling mode) {
    return mode == Coupling::Symmetric ? "symmetric" : "chiral";
}

std::string to_string(Channel ch) { return ch == Channel::R ? "R" : "L"; }

std::string to_string(ChannelPair pair) { return to_string(pair.first) + to_string(pair.second); }

SystemParams SystemParams::symmetric(double gamma) {
    return {0.5 * gamma, 0.5 * gamma, 0.0, Coupling::Symmetric};
}

SystemParams SystemParams::chiral(double gamma, double delta) {
    return {gamma, 0.0, delta, Coupling::ChiralRight};
}

void SystemParams::validate() const {
    if (!std::isfinite(gamma_R) || !std::isfinite(gamma_L) || !std::isfinite(delta))
        throw InvalidParams("rates and detuning must be finite");
    if (gamma_R < 0.0 || gamma_L < 0.0)
        throw InvalidParams(fmt::format("negative coupling rate (gamma_R={}, gamma_L={})",
                                        gamma_R, gamma_L));
    if (mode == Coupling::ChiralRight && gamma_L != 0.0)
        throw InvalidParams(fmt::format("chiral coupling needs gamma_L = 0, got {}", gamma_L));
    if (mode == Coupling::Symmetric && std::abs(gamma_R - gamma_L) > 1e-12 * (gamma_R + gamma_L))
        throw InvalidParams(fmt::format("symmetric coupling needs gamma_R = gamma_L, got {} and {}",
                                        gamma_R, gamma_L));
}

} // namespace wqed
