#include "locus/error.hpp"

namespace locus {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::CoordRange: return "COORD_RANGE";
        case ErrorCode::ParseError: return "PARSE_ERROR";
        case ErrorCode::UnknownField: return "UNKNOWN_FIELD";
        case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
        case ErrorCode::Cycle: return "CYCLE";
        case ErrorCode::Unsatisfiable: return "UNSATISFIABLE";
        case ErrorCode::CapExceeded: return "CAP_EXCEEDED";
        case ErrorCode::NoResponses: return "NO_RESPONSES";
        case ErrorCode::ProgressRegression: return "PROGRESS_REGRESSION";
        case ErrorCode::UnknownEntity: return "UNKNOWN_ENTITY";
        case ErrorCode::UnknownActivity: return "UNKNOWN_ACTIVITY";
        case ErrorCode::UnknownSession: return "UNKNOWN_SESSION";
        case ErrorCode::ScopeViolation: return "SCOPE_VIOLATION";
        case ErrorCode::InvalidPlan: return "INVALID_PLAN";
        case ErrorCode::InvalidEvent: return "INVALID_EVENT";
        case ErrorCode::CorruptSnapshot: return "CORRUPT_SNAPSHOT";
        case ErrorCode::Io: return "IO_ERROR";
    }
    return "UNKNOWN";
}

}  // namespace locus
