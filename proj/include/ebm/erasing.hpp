#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ebm/analysis.hpp"

namespace ebm {

enum class CoupleStrength { erasing, strong };

struct ErasingCouple {
    Word c;
    Word s;
    CoupleStrength strength = CoupleStrength::erasing;
    std::optional<BufferDetail> target;  // set for plain erasing couples
    std::string construction;            // which rule produced it
    std::vector<std::size_t> residuals;  // |Q| after each construction round
};

/// Q(c,s) and Q(wc,zs) are empty for every preference word the policy can draw.
bool verify_erasing_couple(const MatchingStructure& st, const Policy& policy,
                           const BufferDetail& target, const Word& c, const Word& s);

/// All equal-length suffixes match perfectly, and any single incompatible pair (i,j) placed in
/// front is erased, for every preference word.
bool verify_strong_erasing_couple(const MatchingStructure& st, const Policy& policy, const Word& c,
                                  const Word& s);

struct StrongSearchOptions {
    bool use_paths = true;        // alternating-path cases
    bool use_bi_separable = true; // three maximal parts with F-couples
    int search_length = 10;       // suffix-closed search when both rules fail; 0 disables
    std::size_t search_frontier = 200'000;
};

std::optional<ErasingCouple> construct_strong_erasing_couple(const MatchingStructure& st,
                                                             const Policy& policy,
                                                             const StrongSearchOptions& opt = {});

/// Couple built on an alternating E-path from i to j; none when no such path has its
/// (i_l, j_l) pairs in F.
std::optional<ErasingCouple> path_couple(const MatchingStructure& st, int i, int j);

struct ErasingSearchOptions {
    int search_depth = 6;
    StrongSearchOptions strong;
};

/// Builds an erasing couple of `target` round by round, each round erasing the most recent
/// unmatched pair of the current residual. Throws SearchExhausted when no couple is found.
ErasingCouple construct_erasing_couple(const MatchingStructure& st, const Policy& policy,
                                       const BufferDetail& target,
                                       const ErasingSearchOptions& opt = {});

}  // namespace ebm
