#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "ebm/engine.hpp"
#include "ebm/erasing.hpp"

namespace ebm {

/// One realisation of a periodic input; the shift moves the origin by one event.
/// Time t refers to the event events[(origin + t) mod p].
struct PeriodicSample {
    std::vector<ArrivalQuadruple> events;
    int origin = 0;

    int period() const { return static_cast<int>(events.size()); }
    const ArrivalQuadruple& at(long long t) const;

    /// Every event must be a pair of F with valid preference lists.
    void validate(const MatchingStructure& st) const;
};

/// values[k] is the buffer detail just before the arrival at time k.
struct StationarySolution {
    std::vector<BufferDetail> values;
    int coupling_depth = 0;  // backward periods needed before the values stopped moving
};

inline constexpr int default_max_backsteps = 10'000;

/// Starts empty at time k - n p for n = 1, 2, ... and reads the buffer at time k, for every
/// shift k. None when the values have not settled after max_backsteps periods.
std::optional<StationarySolution> backward_coupling(const MatchingStructure& st,
                                                    const Policy& policy,
                                                    const PeriodicSample& sample,
                                                    int max_backsteps = default_max_backsteps,
                                                    int threads = 1);

/// min over shifts of the buffer length after n = 1..periods backward periods.
std::vector<std::size_t> backward_min_lengths(const MatchingStructure& st, const Policy& policy,
                                              const PeriodicSample& sample, int periods);

/// True when every shift sees, at some time l <= window, an empty buffer for all starting
/// times at or before 0, immediately followed by the concatenated couples.
bool check_renovation(const MatchingStructure& st, const Policy& policy,
                      const PeriodicSample& sample, const std::vector<ErasingCouple>& couples,
                      int window);

std::vector<int> construction_points(const StationarySolution& solution);

/// Indices of matches are times modulo the period.
struct PeriodicMatching {
    int period = 0;
    std::vector<int> construction_points;
    std::vector<Match> matches;  // sorted by customer time
};

PeriodicMatching biinfinite_matching(const MatchingStructure& st, const Policy& policy,
                                     const PeriodicSample& sample,
                                     const StationarySolution& solution);

/// First time at which the trajectory from `initial` meets the stationary one and follows it
/// for a full period; none if this does not happen within max_steps.
std::optional<long long> forward_coupling_check(const MatchingStructure& st, const Policy& policy,
                                                const PeriodicSample& sample,
                                                const StationarySolution& solution,
                                                const BufferDetail& initial, long long max_steps);

}  // namespace ebm
