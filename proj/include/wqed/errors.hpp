// errors.hpp: Exception types raised by the simulator

#pragma once

#include <stdexcept>
#include <string>

namespace wqed {

// Root of every error thrown by the library. `kind()` is the stable name
// used in CLI diagnostics.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what);
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define WQED_DECLARE_ERROR(Name)                                   \
    class Name : public Error {                                    \
    public:                                                        \
        explicit Name(const std::string& what) : Error(#Name, what) {} \
    };

// pulse / grid
WQED_DECLARE_ERROR(GridTooNarrow)
WQED_DECLARE_ERROR(GridMismatch)
WQED_DECLARE_ERROR(InvalidArgument)
// scattering engines
WQED_DECLARE_ERROR(UnsupportedDetuning)
WQED_DECLARE_ERROR(InvalidParams)
WQED_DECLARE_ERROR(QuadratureNotConverged)
WQED_DECLARE_ERROR(NormalizationDrift)
WQED_DECLARE_ERROR(ConservationViolation)
// tensor core
WQED_DECLARE_ERROR(ShapeMismatch)
WQED_DECLARE_ERROR(SvdFailure)
WQED_DECLARE_ERROR(NonUnitaryGate)
WQED_DECLARE_ERROR(SiteOutOfRange)
WQED_DECLARE_ERROR(CheckpointError)
// time-bin engine
WQED_DECLARE_ERROR(OccupationCapTooLow)
WQED_DECLARE_ERROR(StepTooLarge)
WQED_DECLARE_ERROR(TruncationBudgetExceeded)
WQED_DECLARE_ERROR(BinStillInteracting)
// harness
WQED_DECLARE_ERROR(ConfigError)
WQED_DECLARE_ERROR(AxisMismatch)
WQED_DECLARE_ERROR(IoError)

#undef WQED_DECLARE_ERROR

} // namespace wqed
