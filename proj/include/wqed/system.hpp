// system.hpp: Emitter/waveguide coupling parameters

#pragma once

#include <string>

namespace wqed {

enum class Coupling { Symmetric, ChiralRight };

enum class Channel { R = 0, L = 1 };

struct ChannelPair {
    Channel first{Channel::R};
    Channel second{Channel::R};

    friend auto operator<=>(const ChannelPair&, const ChannelPair&) = default;
};

std::string to_string(Coupling mode);
std::string to_string(Channel ch);
std::string to_string(ChannelPair pair); // "RR", "RL", ...

// Rates in units where the total decay rate is the natural scale.
// delta is the emitter detuning from the pulse carrier (rotating frame).
struct SystemParams {
    double gamma_R{0.5};
    double gamma_L{0.5};
    double delta{0.0};
    Coupling mode{Coupling::Symmetric};

    double gamma() const { return gamma_R + gamma_L; }

    static SystemParams symmetric(double gamma = 1.0);
    static SystemParams chiral(double gamma = 1.0, double delta = 0.0);

    // Non-negative rates; ChiralRight requires gamma_L == 0; Symmetric
    // requires gamma_R == gamma_L. Throws InvalidParams.
    void validate() const;
};

} // namespace wqed
