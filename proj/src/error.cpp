#include "ebm/error.hpp"

namespace ebm {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::disconnected_matching_graph: return "DisconnectedMatchingGraph";
    case ErrorCode::isolated_arrival_vertex: return "IsolatedArrivalVertex";
    case ErrorCode::out_of_range_edge: return "OutOfRangeEdge";
    case ErrorCode::too_large: return "TooLarge";
    case ErrorCode::incompatible_coexistence: return "IncompatibleCoexistence";
    case ErrorCode::position_out_of_range: return "PositionOutOfRange";
    case ErrorCode::alphabet_mismatch: return "AlphabetMismatch";
    case ErrorCode::arrival_not_in_f: return "ArrivalNotInF";
    case ErrorCode::not_class_admissible: return "NotClassAdmissible";
    case ErrorCode::profile_length_mismatch: return "ProfileLengthMismatch";
    case ErrorCode::not_admissible_input: return "NotAdmissibleInput";
    case ErrorCode::invalid_preference: return "InvalidPreference";
    case ErrorCode::invalid_distribution: return "InvalidDistribution";
    case ErrorCode::stationarity_violation: return "StationarityViolation";
    case ErrorCode::no_construction_points: return "NoConstructionPoints";
    case ErrorCode::imperfect_segment: return "ImperfectSegment";
    case ErrorCode::search_exhausted: return "SearchExhausted";
    case ErrorCode::parse_error: return "ParseError";
    case ErrorCode::validation_error: return "ValidationError";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code)
{
}

}  // namespace ebm
