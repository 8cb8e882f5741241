#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ebm/model.hpp"
#include "ebm/policy.hpp"
#include "ebm/rational.hpp"
#include "ebm/state.hpp"

namespace ebm {

/// The F-marginal mu of the input, with exact weights.
class ArrivalDistribution {
public:
    /// Weights must be positive on every F-edge, vanish elsewhere and sum to exactly 1.
    static ArrivalDistribution make(const MatchingStructure& st,
                                    const std::vector<std::pair<Edge, Rational>>& weights);
    /// Same, but edges of F may be left at weight 0.
    static ArrivalDistribution partial(const MatchingStructure& st,
                                       const std::vector<std::pair<Edge, Rational>>& weights);
    static ArrivalDistribution uniform(const MatchingStructure& st);

    const Rational& weight(int c, int s) const { return w_[(c - 1) * m_ + (s - 1)]; }
    Rational customers(Mask a) const;     // mu_C(A)
    Rational servers(Mask b) const;       // mu_S(B)
    Rational mass(Mask a, Mask b) const;  // mu(A x B)
    Rational mass_on_e(const MatchingStructure& st, Mask a, Mask b) const;  // mu(E n (A x B))
    bool full_support() const { return full_support_; }
    std::vector<std::pair<Edge, Rational>> support() const;

private:
    static ArrivalDistribution assemble(const MatchingStructure& st,
                                        const std::vector<std::pair<Edge, Rational>>& weights,
                                        bool require_full);
    int n_ = 0, m_ = 0;
    std::vector<Rational> w_;
    bool full_support_ = false;
};

struct ConditionResult {
    bool holds = true;
    Mask a = 0;  // witness customer set, if any
    Mask b = 0;  // witness server set, if any
    int part = -1;  // witness part index for partition conditions
    Rational lhs, rhs;
    std::string witness;  // empty when the condition holds
};

/// For every proper non-empty A of C: mu_C(A) < mu_S(S(A)); likewise for B of S.
ConditionResult check_ncond(const MatchingStructure& st, const ArrivalDistribution& mu,
                            int cap = default_enumeration_cap);

/// Sufficient condition over independent sets with both sides non-empty.
ConditionResult check_scond(const MatchingStructure& st, const ArrivalDistribution& mu,
                            int cap = default_enumeration_cap);

/// mu(A_i x B_i) < 1/2 for every part.
ConditionResult check_biseparable_cond(const BiSeparablePartition& part,
                                       const ArrivalDistribution& mu);

/// mu(A_i x B_i) < mu(C(B_i) x S(A_i)) for every two-sided part.
ConditionResult check_scond_monotone(const MatchingStructure& st, const BiSeparablePartition& part,
                                     const ArrivalDistribution& mu);

/// Exact sampler of IID inputs: the pair is drawn from mu, then lists of preferences
/// independently when the policy draws them.
class IidSource {
public:
    IidSource(const MatchingStructure& st, const ArrivalDistribution& mu);
    Edge draw(std::mt19937_64& rng) const;

private:
    std::vector<Edge> edges_;
    std::vector<BigInt> cumulative_;
    BigInt total_;
    bool narrow_ = false;  // total fits in 64 bits
    std::vector<std::uint64_t> cumulative64_;
};

std::mt19937_64 derived_rng(std::uint64_t seed, std::uint64_t stream);

struct Tau1Stats {
    std::size_t runs = 0;
    std::size_t censored = 0;
    double mean = 0;  // over uncensored runs
    long long median = 0;
    long long p90 = 0;
    long long max = 0;
    double censored_fraction() const { return runs ? double(censored) / double(runs) : 0.0; }
    std::vector<long long> samples;  // -1 when censored; indexed by run
};

Tau1Stats estimate_tau1(const MatchingStructure& st, const Policy& policy,
                        const ArrivalDistribution& mu, const BufferDetail& initial, std::size_t runs,
                        long long horizon, std::uint64_t seed, int threads = 1);

struct H2Report {
    bool strongly_connected = false;
    ModelKind kind = ModelKind::ebm;
    ConditionResult ncond, scond;
    std::optional<ConditionResult> scond_monotone;  // only for bi-separable graphs
    std::vector<bool> cases;  // the six sufficient cases, in order
    std::optional<int> certificate;  // first certifying case, 1-based
    std::string summary() const;
};

H2Report h2_advisor(const MatchingStructure& st, const Policy& policy,
                    const ArrivalDistribution& mu);

}  // namespace ebm
