#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ebm {

enum class ErrorCode {
    disconnected_matching_graph,
    isolated_arrival_vertex,
    out_of_range_edge,
    too_large,
    incompatible_coexistence,
    position_out_of_range,
    alphabet_mismatch,
    arrival_not_in_f,
    not_class_admissible,
    profile_length_mismatch,
    not_admissible_input,
    invalid_preference,
    invalid_distribution,
    stationarity_violation,
    no_construction_points,
    imperfect_segment,
    search_exhausted,
    parse_error,
    validation_error,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries a machine-checkable code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace ebm
