#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dcgrid {

enum class ErrorKind {
    InvalidGraph,
    InvalidConfig,
    InvalidInput,
    NumericalFailure,
    Pole,
    NoVoltageRecovery,
    LoadInfeasible,
    SingularModel,
    HypothesisViolated,
    DegenerateSpectrum,
    BoundUndefined,
    InternalInconsistency,
    Schema,
};

[[nodiscard]] std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace dcgrid
