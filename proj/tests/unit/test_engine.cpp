#include <doctest.h>

#include <random>
#include <set>

#include "ebm/engine.hpp"
#include "ebm/error.hpp"
#include "fixtures.hpp"
#include "reference.hpp"

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

std::vector<ArrivalQuadruple> random_pairs(const MatchingStructure& st, int n, std::mt19937_64& rng)
{
    const auto& f = st.arrival_edges();
    std::uniform_int_distribution<std::size_t> pick(0, f.size() - 1);
    std::vector<ArrivalQuadruple> out;
    for (int k = 0; k < n; ++k) {
        auto [c, s] = f[pick(rng)];
        out.push_back({c, s, {}});
    }
    return out;
}

}  // namespace

TEST_CASE("empty input leaves the initial buffer")
{
    auto tr = run(nn(), Policy::fcfs(), bd("33", "s1s2"), std::span<const ArrivalQuadruple>{});
    CHECK(tr.final_buffer() == bd("33", "s1s2"));
    CHECK(tr.matches.empty());
    CHECK(is_perfect(run(nn(), Policy::fcfs(), {}, std::span<const ArrivalQuadruple>{})));
}

TEST_CASE("match-the-shortest on the NN graph")
{
    auto st = nn();
    auto ms = Policy::fixed(PolicyKind::ms, ex1_profile());
    auto combined = match_words(st, ms, {3, 3, 3, 3, 1, 2}, {1, 1, 1, 2, 3, 1});
    CHECK(combined.final_buffer() == bd("3332", "s1s1s1s1"));
    CHECK_FALSE(is_perfect(combined));
    CHECK(combined.final_buffer().size() == 8);
    CHECK(match_words(st, ms, {3, 3}, {1, 1}).final_buffer() == bd("33", "s1s1"));
    CHECK(match_words(st, ms, {3, 3, 1, 2}, {1, 2, 3, 1}).final_buffer() == bd("3", "s1"));
}

TEST_CASE("hand-traceable run on the periodic structure")
{
    auto tr = match_words(nnbis(), Policy::fcfs(), {3, 1, 2}, {1, 2, 3});
    CHECK(is_perfect(tr));
    REQUIRE(tr.matches.size() == 3);
    REQUIRE(tr.steps.size() == 3);
    CHECK(tr.steps[0] == bd("3", "s1"));
    // 1 takes the buffered s1 while s2 waits; then 2 takes s2 and s3 takes 3
    CHECK(tr.matches[0] == Match{1, 0, 1, 1, 1});
    CHECK(tr.steps[1] == bd("3", "s2"));
    CHECK(tr.steps[2].empty());
}

TEST_CASE("unequal lengths: the longer word starts alone")
{
    auto st = nn();
    CHECK(match_words(st, Policy::fcfs(), {2}, {}).final_buffer() == bd("2", ""));
    auto q = word_arrivals({1, 2, 3}, {3});
    REQUIRE(q.size() == 3);
    CHECK((q[0].c == 1 && q[0].s == 0));
    CHECK((q[2].c == 3 && q[2].s == 3));
    auto tr = match_words(st, Policy::fcfs(), {1, 2, 3}, {3});
    // s3 takes the buffered 2 first, so the entering 3 stays
    CHECK(tr.final_buffer() == bd("13", ""));
    std::vector<PreferenceProfile> two(2);
    CHECK_THROWS_AS(word_arrivals({1, 2, 3}, {3}, two), Error);
}

TEST_CASE("trace invariants on random inputs")
{
    std::mt19937_64 rng(17);
    for (const auto& st : {nn(), nnbis()}) {
        for (auto p : {Policy::fcfs(), Policy::lcfs(), Policy::uniform(PolicyKind::ml)}) {
            for (int trial = 0; trial < 50; ++trial) {
                auto input = random_pairs(st, 12, rng);
                auto tr = run(st, p, {}, std::span<const ArrivalQuadruple>(input));
                std::set<long long> cs, ss;
                for (const auto& m : tr.matches) {
                    CHECK(st.in_e(m.customer_class, m.server_class));
                    CHECK(cs.insert(m.customer_index).second);
                    CHECK(ss.insert(m.server_index).second);
                    CHECK(input[m.customer_index].c == m.customer_class);
                    CHECK(input[m.server_index].s == m.server_class);
                }
                // unmatched items are the final buffer, in arrival order
                Word w, z;
                for (long long k = 0; k < 12; ++k) {
                    if (!cs.count(k)) w.push_back(input[k].c);
                    if (!ss.count(k)) z.push_back(input[k].s);
                }
                CHECK(tr.final_buffer() == BufferDetail{w, z});
                CHECK(w.size() == z.size());
                auto again = run(st, p, {}, std::span<const ArrivalQuadruple>(input));
                CHECK(again.matches == tr.matches);
            }
        }
    }
}

TEST_CASE("prefix consistency: matches of a prefix survive in the whole run")
{
    std::mt19937_64 rng(23);
    auto st = nn();
    auto asc = PreferenceProfile::ascending(st);
    for (const auto& p : {Policy::fcfs(), Policy::lcfs(), Policy::priority(asc),
                          Policy::fixed(PolicyKind::ml, asc), Policy::fixed(PolicyKind::ms, asc)}) {
        for (int trial = 0; trial < 300; ++trial) {
            auto a = random_pairs(st, 1 + trial % 3, rng);
            auto b = random_pairs(st, 1 + (trial / 3) % 3, rng);
            auto whole = a;
            whole.insert(whole.end(), b.begin(), b.end());
            auto head = run(st, p, {}, std::span<const ArrivalQuadruple>(a));
            auto full = run(st, p, {}, std::span<const ArrivalQuadruple>(whole));
            for (const auto& m : head.matches)
                CHECK(std::find(full.matches.begin(), full.matches.end(), m) != full.matches.end());
            long long cc = 0, sc = 0;
            for (const auto& q : whole) {
                cc += q.c != 0;
                sc += q.s != 0;
            }
            CHECK(static_cast<long long>(full.customers.size()) - static_cast<long long>(full.servers.size()) == cc - sc);
        }
    }
}

TEST_CASE("restarting from the residual words equals continuing the run")
{
    std::mt19937_64 rng(29);
    auto st = nn();
    for (const auto& p : {Policy::fcfs(), Policy::lcfs()}) {
        for (int trial = 0; trial < 200; ++trial) {
            auto a = random_pairs(st, 4, rng);
            auto b = random_pairs(st, 3, rng);
            auto whole = a;
            whole.insert(whole.end(), b.begin(), b.end());
            auto q = run(st, p, {}, std::span<const ArrivalQuadruple>(a)).final_buffer();
            Word c = q.w, s = q.z;
            for (const auto& x : b) {
                c.push_back(x.c);
                s.push_back(x.s);
            }
            CHECK(match_words(st, p, c, s).final_buffer() ==
                  run(st, p, {}, std::span<const ArrivalQuadruple>(whole)).final_buffer());
        }
    }
}

TEST_CASE("runs agree with the reference matcher")
{
    std::mt19937_64 rng(31);
    auto st = nnbis();
    for (auto kind : {PolicyKind::fcfs, PolicyKind::lcfs}) {
        Policy p{kind, PreferenceMode::per_arrival, {}};
        for (int trial = 0; trial < 100; ++trial) {
            auto input = random_pairs(st, 15, rng);
            auto init = bd("33", "s1s2");
            auto sys = reference::load(init);
            for (const auto& q : input)
                reference::step(st, kind, sys, q.c, q.s, st.server_list(q.c), st.customer_list(q.s));
            CHECK(run(st, p, init, std::span<const ArrivalQuadruple>(input)).final_buffer() == sys.buffer());
        }
    }
}

TEST_CASE("initial items carry negative indices")
{
    auto tr = run(nn(), Policy::fcfs(), bd("3", "s1"), std::span<const ArrivalQuadruple>(pair_arrivals({1}, {3})));
    REQUIRE(tr.matches.size() == 2);
    for (const auto& m : tr.matches) CHECK((m.customer_index == -1 || m.server_index == -1));
    CHECK(format_trace(tr).find("t0 match") != std::string::npos);
}
