#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ebm/engine.hpp"
#include "ebm/model.hpp"
#include "ebm/policy.hpp"
#include "ebm/state.hpp"

namespace ebm {

enum class CheckStatus { clean, violated, budget_exhausted };

const char* to_string(CheckStatus s);

/// Every arrival the enumerations range over. Preference lists are enumerated only when the
/// policy reads them and does not pin them; otherwise each F-edge appears once.
class ArrivalAlphabet {
public:
    ArrivalAlphabet(const MatchingStructure& st, const Policy& policy);

    const std::vector<Arrival>& choices() const { return choices_; }
    /// Variants of one entering pair; either class may be 0 for a lone arrival.
    std::vector<Arrival> variants(int c, int s) const;
    ArrivalQuadruple quadruple(const Arrival& a) const;
    bool enumerates_preferences() const { return enumerate_; }

private:
    const MatchingStructure* st_;
    std::shared_ptr<const PermutationTable> perms_;
    bool enumerate_ = false;
    std::vector<Arrival> choices_;
};

struct Budget {
    std::uint64_t max_steps = 200'000'000;  // single policy steps
};

struct SubadditiveOptions {
    int max_len_first = 3;
    int max_len_second = 3;
    Budget budget;
};

struct SubadditiveEvaluation {
    BufferDetail combined, first, second;

    bool customers_ok() const { return combined.w.size() <= first.w.size() + second.w.size(); }
    bool servers_ok() const { return combined.z.size() <= first.z.size() + second.z.size(); }
    bool holds() const { return customers_ok() && servers_ok(); }
};

struct SubadditiveCounterexample {
    std::vector<ArrivalQuadruple> first, second;
    SubadditiveEvaluation evaluation;
};

struct SubadditiveResult {
    CheckStatus status = CheckStatus::clean;
    std::optional<SubadditiveCounterexample> counterexample;
    std::uint64_t steps = 0;
    std::uint64_t residual_states = 0;
};

SubadditiveEvaluation evaluate_subadditive_pair(const MatchingStructure& st, const Policy& policy,
                                                const std::vector<ArrivalQuadruple>& first,
                                                const std::vector<ArrivalQuadruple>& second);

/// Exhaustive over piece pairs of equal-length words and all preference words of the
/// policy's alphabet. Budget exhaustion is a status, not an exception.
SubadditiveResult check_subadditive(const MatchingStructure& st, const Policy& policy,
                                    const SubadditiveOptions& opt = {});

/// All class details with every entry at most `max_count`.
std::vector<ClassDetail> enumerate_details(const MatchingStructure& st, int max_count);

struct NonexpansiveCounterexample {
    ClassDetail a, b;
    ArrivalQuadruple arrival;
    ClassDetail a_next, b_next;
    int before = 0;
    int after = 0;
};

struct NonexpansiveResult {
    CheckStatus status = CheckStatus::clean;
    std::optional<NonexpansiveCounterexample> counterexample;
    std::uint64_t pairs = 0;
};

NonexpansiveResult check_nonexpansive(const MatchingStructure& st, const Policy& policy,
                                      int max_count, const Budget& budget = {});

/// A pair of queue-length vectors on which the selection of an entering item differs although
/// both selections were available in both systems.
struct ConsistencyViolation {
    Side side = Side::customer;
    int entering = 0;
    std::vector<int> prefs;
    std::vector<int> counts_a, counts_b;
    int choice_a = 0;
    int choice_b = 0;
};

std::optional<ConsistencyViolation> find_consistency_violation(const MatchingStructure& st,
                                                               const Policy& policy,
                                                               int max_count);

std::string format_arrivals(const std::vector<ArrivalQuadruple>& input);

}  // namespace ebm
