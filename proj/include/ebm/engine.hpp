#pragma once

#include <span>
#include <string>
#include <vector>

#include "ebm/model.hpp"
#include "ebm/policy.hpp"
#include "ebm/state.hpp"

namespace ebm {

/// Customers and servers are indexed in two separate arrival streams. Items of the initial
/// buffer carry negative indices (-|w|..-1, oldest first).
struct Match {
    long long customer_index = 0;
    long long server_index = 0;
    int customer_class = 0;
    int server_class = 0;
    long long step = 0;  // index of the arrival event that created the match

    bool operator==(const Match&) const = default;
};

struct TaggedItem {
    int cls = 0;
    long long index = 0;
    bool operator==(const TaggedItem&) const = default;
};

struct MatchingTrace {
    BufferDetail initial;
    std::vector<Match> matches;
    std::vector<TaggedItem> customers;  // final buffer, with arrival indices
    std::vector<TaggedItem> servers;
    std::vector<BufferDetail> steps;  // buffer after each arrival
    long long first_step = 0;

    BufferDetail final_buffer() const;
};

MatchingTrace run(const MatchingStructure& st, const Policy& policy, const BufferDetail& initial,
                  std::span<const ArrivalQuadruple> input, long long first_index = 0);
MatchingTrace run(const MatchingStructure& st, const Policy& policy, const BufferDetail& initial,
                  std::span<const Arrival> input, long long first_index = 0);

/// Untraced fold, for enumerations.
BufferDetail advance(const MatchingStructure& st, const Policy& policy, BufferDetail b,
                     std::span<const Arrival> input);

/// Unequal-length convention: the first ||c|-|s|| items of the longer word enter alone, the
/// rest enter in pairs aligned at the end. `prefs` is empty or has max(|c|,|s|) entries.
std::vector<ArrivalQuadruple> word_arrivals(const Word& c, const Word& s,
                                            std::span<const PreferenceProfile> prefs = {});

MatchingTrace match_words(const MatchingStructure& st, const Policy& policy, const Word& c,
                          const Word& s, std::span<const PreferenceProfile> prefs = {},
                          const BufferDetail& initial = {});

bool is_perfect(const MatchingTrace& trace);

/// Line-oriented export: "t<idx> match c@i s@j" and "t<idx> buffer w|z".
std::string format_trace(const MatchingTrace& trace);

}  // namespace ebm
