#pragma once

#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ebm/model.hpp"
#include "ebm/state.hpp"

namespace ebm {

enum class PolicyKind { fcfs, lcfs, rand, ml, ms };

// deterministic: one fixed profile (a strict priority when kind is rand);
// uniform: the input carries uniformly drawn lists; per_arrival: the input carries them as given.
enum class PreferenceMode { deterministic, uniform, per_arrival };

struct Policy {
    PolicyKind kind = PolicyKind::fcfs;
    PreferenceMode mode = PreferenceMode::per_arrival;
    PreferenceProfile profile;  // used in deterministic mode; empty means ascending

    bool class_admissible() const
    {
        return kind == PolicyKind::rand || kind == PolicyKind::ml || kind == PolicyKind::ms;
    }
    bool uses_preferences() const { return class_admissible(); }
    bool fixed_preferences() const { return mode == PreferenceMode::deterministic; }

    static Policy fcfs() { return {PolicyKind::fcfs, PreferenceMode::per_arrival, {}}; }
    static Policy lcfs() { return {PolicyKind::lcfs, PreferenceMode::per_arrival, {}}; }
    static Policy priority(PreferenceProfile p)
    {
        return {PolicyKind::rand, PreferenceMode::deterministic, std::move(p)};
    }
    static Policy uniform(PolicyKind k) { return {k, PreferenceMode::uniform, {}}; }
    static Policy fixed(PolicyKind k, PreferenceProfile p)
    {
        return {k, PreferenceMode::deterministic, std::move(p)};
    }
};

const char* to_string(PolicyKind k);
const char* to_string(PreferenceMode m);
PolicyKind parse_policy_kind(std::string_view name);
std::string describe(const Policy& p);

/// Lightweight view of one arrival: only the lists of the entering classes matter.
/// Empty spans fall back to the policy profile, then to ascending order.
struct Arrival {
    int customer = 0;  // 0 when no customer enters
    int server = 0;    // 0 when no server enters
    std::span<const int> customer_prefs;
    std::span<const int> server_prefs;
};

Arrival view(const ArrivalQuadruple& q);

enum class Side { customer, server };

/// p_phi / q_phi: the class chosen by an entering item, or 0 when no compatible queue is
/// populated. `counts` are the opposite side's queue lengths.
int select_match(const MatchingStructure& st, const Policy& policy, const std::vector<int>& counts,
                 Side side, int entering, std::span<const int> prefs);

/// Positions are 0-based into w / z; -1 means no buffered partner.
struct StepDecision {
    int customer_pos = -1;  // buffered customer taken by the entering server
    int server_pos = -1;    // buffered server taken by the entering customer
    bool together = false;  // the entering pair matched with each other
};

StepDecision decide(const MatchingStructure& st, const Policy& policy, const Word& w, const Word& z,
                    const Arrival& a);

BufferDetail step_buffer(const MatchingStructure& st, const Policy& policy, const BufferDetail& b,
                         const Arrival& a);
BufferDetail step_buffer(const MatchingStructure& st, const Policy& policy, const BufferDetail& b,
                         const ArrivalQuadruple& q);

ClassDetail step_class(const MatchingStructure& st, const Policy& policy, const ClassDetail& d,
                       const Arrival& a);

/// All permutations of each neighbor list, in lexicographic order.
struct PermutationTable {
    std::vector<std::vector<std::vector<int>>> sigma;  // [c-1][k]
    std::vector<std::vector<std::vector<int>>> gamma;  // [s-1][k]

    static PermutationTable build(const MatchingStructure& st);
};

std::vector<int> uniform_permutation(const std::vector<int>& items, std::mt19937_64& rng);
PreferenceProfile draw_uniform_profile(const MatchingStructure& st, std::mt19937_64& rng);

}  // namespace ebm
