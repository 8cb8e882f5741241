#include <doctest.h>

#include <algorithm>
#include <set>

#include "ebm/engine.hpp"
#include "ebm/error.hpp"
#include "ebm/loynes.hpp"
#include "fixtures.hpp"
#include "reference.hpp"

using namespace ebm;
using fixtures::bd;
using fixtures::nnbis;
using fixtures::om;

namespace {

// Start empty far in the past and read the buffer at time k, with the naive matcher.
BufferDetail backward_oracle(const MatchingStructure& st, PolicyKind kind, const PeriodicSample& sample,
                             int k, int periods)
{
    reference::System sys;
    const int p = sample.period();
    for (long long t = static_cast<long long>(k) - static_cast<long long>(periods) * p; t < k; ++t) {
        const auto& ev = sample.at(t);
        reference::step(st, kind, sys, ev.c, ev.s, st.server_list(ev.c), st.customer_list(ev.s));
    }
    return sys.buffer();
}

ErasingCouple strong_couple(const Word& c, const Word& s)
{
    return ErasingCouple{c, s, CoupleStrength::strong, std::nullopt, "given", {}};
}

PeriodicSample sample_of(const std::vector<Edge>& pairs)
{
    PeriodicSample out;
    for (auto [c, s] : pairs) out.events.push_back({c, s, {}});
    return out;
}

}  // namespace

TEST_CASE("stationary FCFS buffers of the period-9 sample")
{
    auto st = nnbis();
    auto sol = backward_coupling(st, Policy::fcfs(), om());
    REQUIRE(sol);
    std::vector<BufferDetail> expected = {bd("33", "s1s2"), bd("33", "s2s2"), bd("33", "s2s1"),
                                          bd("33", "s1s2"), bd("3", "s1"),    bd("3", "s2"),
                                          bd("", ""),       bd("", ""),       bd("3", "s1")};
    CHECK(sol->values == expected);
    CHECK(sol->coupling_depth >= 1);
    CHECK(sol->coupling_depth <= 5);
    CHECK(construction_points(*sol) == std::vector<int>{6, 7});
}

TEST_CASE("stationary LCFS buffers of the period-9 sample")
{
    auto st = nnbis();
    auto sol = backward_coupling(st, Policy::lcfs(), om());
    REQUIRE(sol);
    std::vector<BufferDetail> expected = {bd("33", "s1s2"), bd("33", "s1s2"), bd("33", "s1s1"),
                                          bd("33", "s1s2"), bd("3", "s1"),    bd("3", "s2"),
                                          bd("", ""),       bd("", ""),       bd("3", "s1")};
    CHECK(sol->values == expected);
    CHECK(construction_points(*sol) == std::vector<int>{6, 7});
}

TEST_CASE("backward values agree with a long naive run")
{
    auto st = nnbis();
    for (auto kind : {PolicyKind::fcfs, PolicyKind::lcfs}) {
        Policy pol{kind, PreferenceMode::per_arrival, {}};
        auto sol = backward_coupling(st, pol, om());
        REQUIRE(sol);
        for (int k = 0; k < 9; ++k) {
            CHECK(backward_oracle(st, kind, om(), k, 40) == sol->values[k]);
            CHECK(backward_oracle(st, kind, om(), k, 41) == sol->values[k]);
        }
    }
}

TEST_CASE("stationary values are carried into each other by the dynamics")
{
    auto st = nnbis();
    for (const auto& pol : {Policy::fcfs(), Policy::lcfs()}) {
        auto sample = om();
        for (int origin = 0; origin < 9; origin += 4) {
            sample.origin = origin;
            auto sol = backward_coupling(st, pol, sample);
            REQUIRE(sol);
            const int p = sample.period();
            for (int k = 0; k < p; ++k)
                CHECK(step_buffer(st, pol, sol->values[k], sample.at(k)) == sol->values[(k + 1) % p]);
        }
    }
}

TEST_CASE("shifting the origin rotates the values")
{
    auto st = nnbis();
    auto base = backward_coupling(st, Policy::fcfs(), om());
    auto sample = om();
    sample.origin = 3;
    auto shifted = backward_coupling(st, Policy::fcfs(), sample);
    REQUIRE(base);
    REQUIRE(shifted);
    for (int k = 0; k < 9; ++k) CHECK(shifted->values[k] == base->values[(k + 3) % 9]);
}

TEST_CASE("threads do not change the solution")
{
    auto st = nnbis();
    auto a = backward_coupling(st, Policy::fcfs(), om(), default_max_backsteps, 1);
    auto b = backward_coupling(st, Policy::fcfs(), om(), default_max_backsteps, 3);
    REQUIRE(a);
    REQUIRE(b);
    CHECK(a->values == b->values);
    CHECK(a->coupling_depth == b->coupling_depth);
}

TEST_CASE("the bi-infinite matching is a periodic perfect matching")
{
    auto st = nnbis();
    auto sample = om();
    for (const auto& pol : {Policy::fcfs(), Policy::lcfs()}) {
        auto sol = backward_coupling(st, pol, sample);
        REQUIRE(sol);
        auto m = biinfinite_matching(st, pol, sample, *sol);
        CHECK(m.period == 9);
        CHECK(m.construction_points == std::vector<int>{6, 7});
        REQUIRE(m.matches.size() == 9);
        std::set<long long> cs, ss;
        for (const auto& x : m.matches) {
            cs.insert(x.customer_index);
            ss.insert(x.server_index);
            CHECK(st.in_e(x.customer_class, x.server_class));
            CHECK(sample.at(x.customer_index).c == x.customer_class);
            CHECK(sample.at(x.server_index).s == x.server_class);
        }
        CHECK(cs.size() == 9);
        CHECK(ss.size() == 9);
        CHECK(*cs.begin() == 0);
        CHECK(*cs.rbegin() == 8);
        CHECK(std::is_sorted(m.matches.begin(), m.matches.end(),
                             [](const Match& a, const Match& b) { return a.customer_index < b.customer_index; }));
    }
}

TEST_CASE("the bi-infinite matching is what a long forward run settles on")
{
    auto st = nnbis();
    auto sample = om();
    const int p = sample.period();
    for (const auto& pol : {Policy::fcfs(), Policy::lcfs()}) {
        auto sol = backward_coupling(st, pol, sample);
        REQUIRE(sol);
        auto m = biinfinite_matching(st, pol, sample, *sol);
        std::vector<ArrivalQuadruple> input;
        for (int t = 0; t < 12 * p; ++t) input.push_back(sample.at(t));
        auto trace = run(st, pol, {}, input);
        std::set<std::pair<long long, long long>> window, stationary;
        for (const auto& x : trace.matches)
            if (x.customer_index >= 6 * p && x.customer_index < 7 * p)
                window.insert({x.customer_index % p, x.server_index % p});
        for (const auto& x : m.matches) stationary.insert({x.customer_index, x.server_index});
        CHECK(window == stationary);
    }
}

TEST_CASE("FCFS and LCFS settle on different matchings")
{
    auto st = nnbis();
    auto f = backward_coupling(st, Policy::fcfs(), om());
    auto l = backward_coupling(st, Policy::lcfs(), om());
    REQUIRE(f);
    REQUIRE(l);
    CHECK(biinfinite_matching(st, Policy::fcfs(), om(), *f).matches !=
          biinfinite_matching(st, Policy::lcfs(), om(), *l).matches);
}

TEST_CASE("a period of one matched pair")
{
    auto st = nnbis();
    auto sample = sample_of({{1, 2}});
    auto sol = backward_coupling(st, Policy::fcfs(), sample);
    REQUIRE(sol);
    CHECK(sol->values == std::vector<BufferDetail>{BufferDetail{}});
    CHECK(sol->coupling_depth == 1);
    auto m = biinfinite_matching(st, Policy::fcfs(), sample, *sol);
    REQUIRE(m.matches.size() == 1);
    CHECK(m.matches[0].customer_index == 0);
    CHECK(m.matches[0].server_index == 0);
}

TEST_CASE("no construction point means no matching")
{
    StationarySolution sol;
    sol.values = {bd("3", "s1"), bd("3", "s1")};
    CHECK_THROWS_AS(construction_points(sol), Error);
    auto st = nnbis();
    CHECK_THROWS_AS(biinfinite_matching(st, Policy::fcfs(), sample_of({{3, 1}, {1, 2}}), sol), Error);
}

TEST_CASE("renovation of the period-9 sample")
{
    auto st = nnbis();
    std::vector<ErasingCouple> fcfs = {strong_couple(fixtures::fcfs_couple_c, fixtures::fcfs_couple_s)};
    CHECK(check_renovation(st, Policy::fcfs(), om(), fcfs, 18));
    std::vector<ErasingCouple> lcfs = {strong_couple(fixtures::doubled(fixtures::fcfs_couple_c),
                                                     fixtures::doubled(fixtures::fcfs_couple_s))};
    CHECK(check_renovation(st, Policy::lcfs(), om(), lcfs, 18));
    // (1, s1) never arrives, so the block cannot be read
    std::vector<ErasingCouple> absent = {strong_couple({1}, {1})};
    CHECK_FALSE(check_renovation(st, Policy::fcfs(), om(), absent, 18));
}

TEST_CASE("an overloaded sample does not couple")
{
    auto st = fixtures::nn();
    auto sample = sample_of({{3, 1}, {3, 1}, {1, 2}, {2, 3}});
    CHECK_FALSE(backward_coupling(st, Policy::fcfs(), sample, 50));
    auto lengths = backward_min_lengths(st, Policy::fcfs(), sample, 30);
    REQUIRE(lengths.size() == 30);
    CHECK(std::is_sorted(lengths.begin(), lengths.end()));
    CHECK(lengths.back() > lengths.front());
}

TEST_CASE("forward coupling from the stationary start and from elsewhere")
{
    auto st = nnbis();
    auto sol = backward_coupling(st, Policy::fcfs(), om());
    REQUIRE(sol);
    CHECK(forward_coupling_check(st, Policy::fcfs(), om(), *sol, sol->values[0], 100) == 0);
    long long worst = 0;
    for (const auto& b : fixtures::admissible_buffers(st, 2)) {
        auto t = forward_coupling_check(st, Policy::fcfs(), om(), *sol, b, 10'000);
        REQUIRE(t);
        worst = std::max(worst, *t);
    }
    CHECK(worst < 10'000);
    CHECK_THROWS_AS(forward_coupling_check(st, Policy::fcfs(), om(), *sol, bd("1", "s2"), 10), Error);
}

TEST_CASE("sample validation")
{
    auto st = nnbis();
    CHECK_NOTHROW(om().validate(st));
    CHECK_THROWS_AS(sample_of({{1, 1}}).validate(st), Error);  // not an arrival couple
    CHECK_THROWS_AS(sample_of({}).validate(st), Error);
    CHECK(om().at(-1).c == 3);
    CHECK(om().at(9).c == 1);
}
