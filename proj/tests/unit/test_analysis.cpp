#include <doctest.h>

#include "ebm/analysis.hpp"
#include "ebm/error.hpp"
#include "fixtures.hpp"

using namespace ebm;
using fixtures::bd;
using fixtures::nn;
using fixtures::nnbis;

namespace {

PreferenceProfile ex1_profile()
{
    PreferenceProfile p;
    p.sigma = {{1, 2}, {2, 3}, {3}};
    p.gamma = {{1}, {1, 2}, {2, 3}};
    return p;
}

}  // namespace

TEST_CASE("the MS pieces of the example violate sub-additivity")
{
    auto st = nn();
    auto ms = Policy::fixed(PolicyKind::ms, ex1_profile());
    auto ev = evaluate_subadditive_pair(st, ms, pair_arrivals({3, 3}, {1, 1}),
                                        pair_arrivals({3, 3, 1, 2}, {1, 2, 3, 1}));
    CHECK(ev.combined == bd("3332", "s1s1s1s1"));
    CHECK(ev.first == bd("33", "s1s1"));
    CHECK(ev.second == bd("3", "s1"));
    CHECK_FALSE(ev.customers_ok());
    CHECK_FALSE(ev.servers_ok());
}

TEST_CASE("exhaustive search finds an MS counterexample that replays")
{
    auto st = nn();
    auto ms = Policy::fixed(PolicyKind::ms, ex1_profile());
    SubadditiveOptions opt;
    opt.max_len_first = 2;
    opt.max_len_second = 4;
    auto res = check_subadditive(st, ms, opt);
    REQUIRE(res.status == CheckStatus::violated);
    REQUIRE(res.counterexample);
    auto again = evaluate_subadditive_pair(st, ms, res.counterexample->first, res.counterexample->second);
    CHECK_FALSE(again.holds());
    CHECK(again.combined == res.counterexample->evaluation.combined);
}

TEST_CASE("sub-additive policies at small scale")
{
    SubadditiveOptions opt;
    opt.max_len_first = 2;
    opt.max_len_second = 2;
    for (const auto& st : {nn(), nnbis()}) {
        auto asc = PreferenceProfile::ascending(st);
        for (const auto& p : {Policy::fcfs(), Policy::lcfs(), Policy::priority(asc),
                              Policy::uniform(PolicyKind::rand), Policy::uniform(PolicyKind::ml)}) {
            auto res = check_subadditive(st, p, opt);
            CHECK(res.status == CheckStatus::clean);
            CHECK(res.steps > 0);
        }
    }
}

TEST_CASE("an empty piece gives equality")
{
    auto st = nn();
    auto input = pair_arrivals({3, 1, 2}, {1, 3, 1});
    for (const auto& p : {Policy::fcfs(), Policy::uniform(PolicyKind::ms)}) {
        auto left = evaluate_subadditive_pair(st, p, {}, input);
        CHECK(left.combined == left.second);
        CHECK(left.first.empty());
        auto right = evaluate_subadditive_pair(st, p, input, {});
        CHECK(right.combined == right.first);
    }
}

TEST_CASE("budget exhaustion is reported, not thrown")
{
    SubadditiveOptions opt;
    opt.budget.max_steps = 10;
    auto res = check_subadditive(nn(), Policy::fcfs(), opt);
    CHECK(res.status == CheckStatus::budget_exhausted);
    auto ne = check_nonexpansive(nn(), Policy::uniform(PolicyKind::rand), 2, Budget{10});
    CHECK(ne.status == CheckStatus::budget_exhausted);
}

TEST_CASE("arrival alphabet sizes")
{
    auto st = nn();
    CHECK(ArrivalAlphabet(st, Policy::fcfs()).choices().size() == 9);
    // sum over (c,s) of |S(c)|! |C(s)|!: customer lists 2,2,1 and server lists 1,2,2
    CHECK(ArrivalAlphabet(st, Policy::uniform(PolicyKind::ml)).choices().size() == 5 * 5);
    CHECK(ArrivalAlphabet(st, Policy::fixed(PolicyKind::ml, PreferenceProfile::ascending(st))).choices().size() == 9);
}

TEST_CASE("detail enumeration stays inside the admissible set")
{
    auto st = nn();
    auto all = enumerate_details(st, 2);
    std::size_t brute = 0;
    for (int code = 0; code < 729; ++code) {
        ClassDetail d{{code % 3, (code / 3) % 3, (code / 9) % 3}, {(code / 27) % 3, (code / 81) % 3, (code / 243) % 3}};
        brute += is_admissible_detail(st, d);
    }
    CHECK(all.size() == brute);
    for (const auto& d : all) CHECK(is_admissible_detail(st, d));
}

TEST_CASE("non-expansiveness of RAND and ML at queue cap 1")
{
    for (const auto& st : {nn(), nnbis()}) {
        for (auto k : {PolicyKind::rand, PolicyKind::ml}) {
            auto res = check_nonexpansive(st, Policy::uniform(k), 1);
            CHECK(res.status == CheckStatus::clean);
            CHECK(res.pairs > 0);
        }
    }
    CHECK_THROWS_AS(check_nonexpansive(nn(), Policy::fcfs(), 1), Error);
}

TEST_CASE("identical details stay at distance zero")
{
    auto st = nn();
    auto p = Policy::uniform(PolicyKind::ml);
    for (const auto& d : enumerate_details(st, 1))
        for (auto [c, s] : st.arrival_edges()) {
            Arrival a{c, s, {}, {}};
            CHECK(l1_distance(step_class(st, p, d, a), step_class(st, p, d, a)) == 0);
        }
}

TEST_CASE("consistency holds for RAND and fails for ML")
{
    auto st = nn();
    CHECK_FALSE(find_consistency_violation(st, Policy::uniform(PolicyKind::rand), 2));
    auto v = find_consistency_violation(st, Policy::uniform(PolicyKind::ml), 2);
    REQUIRE(v);
    CHECK(v->choice_a != v->choice_b);
    // both choices were populated in both systems
    auto counts = [&](const std::vector<int>& c, int k) { return c[k - 1]; };
    CHECK(counts(v->counts_a, v->choice_b) > 0);
    CHECK(counts(v->counts_b, v->choice_a) > 0);
}

TEST_CASE("non-expansive implies sub-additive at the same scale")
{
    SubadditiveOptions opt;
    opt.max_len_first = 2;
    opt.max_len_second = 2;
    for (const auto& st : {nn(), nnbis()})
        for (auto k : {PolicyKind::rand, PolicyKind::ml, PolicyKind::ms}) {
            auto p = Policy::uniform(k);
            auto ne = check_nonexpansive(st, p, 1);
            if (ne.status == CheckStatus::clean) CHECK(check_subadditive(st, p, opt).status == CheckStatus::clean);
        }
}
