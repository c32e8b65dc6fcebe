#include "dcgrid/error.hpp"

namespace dcgrid {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidGraph: return "invalid-graph";
        case ErrorKind::InvalidConfig: return "invalid-config";
        case ErrorKind::InvalidInput: return "invalid-input";
        case ErrorKind::NumericalFailure: return "numerical-failure";
        case ErrorKind::Pole: return "pole";
        case ErrorKind::NoVoltageRecovery: return "no-voltage-recovery";
        case ErrorKind::LoadInfeasible: return "load-infeasible";
        case ErrorKind::SingularModel: return "singular-model";
        case ErrorKind::HypothesisViolated: return "hypothesis-violated";
        case ErrorKind::DegenerateSpectrum: return "degenerate-spectrum";
        case ErrorKind::BoundUndefined: return "bound-undefined";
        case ErrorKind::InternalInconsistency: return "internal-inconsistency";
        case ErrorKind::Schema: return "schema";
    }
    return "unknown";
}

}  // namespace dcgrid
