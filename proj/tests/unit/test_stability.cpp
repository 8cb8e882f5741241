#include <doctest.h>

#include <map>
#include <random>

#include "ebm/error.hpp"
#include "ebm/stability.hpp"
#include "fixtures.hpp"
#include "generators.hpp"

using namespace ebm;
using fixtures::nnbis;

namespace {

ArrivalDistribution nnbis_mu(const MatchingStructure& st)
{
    return ArrivalDistribution::make(st, {{{1, 2}, Rational(1, 3)},
                                          {{2, 3}, Rational(1, 3)},
                                          {{2, 1}, Rational(1, 9)},
                                          {{3, 1}, Rational(1, 9)},
                                          {{3, 2}, Rational(1, 9)}});
}

// Ncond by definition over all proper subsets, independent of the library loop.
bool ncond_oracle(const MatchingStructure& st, const ArrivalDistribution& mu)
{
    for (Mask a = 1; a < st.all_customers(); ++a) {
        Rational l = 0, r = 0;
        for (int c = 1; c <= st.customers(); ++c)
            for (int s = 1; s <= st.servers(); ++s) {
                if (has(a, c)) l += mu.weight(c, s);
                if (has(st.server_nbrs_of(a), s)) r += mu.weight(c, s);
            }
        if (!(l < r)) return false;
    }
    for (Mask b = 1; b < st.all_servers(); ++b) {
        Rational l = 0, r = 0;
        for (int c = 1; c <= st.customers(); ++c)
            for (int s = 1; s <= st.servers(); ++s) {
                if (has(b, s)) l += mu.weight(c, s);
                if (has(st.customer_nbrs_of(b), c)) r += mu.weight(c, s);
            }
        if (!(l < r)) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("marginals of the periodic example's distribution")
{
    auto st = nnbis();
    auto mu = nnbis_mu(st);
    CHECK(mu.customers(bit(1)) == Rational(1, 3));
    CHECK(mu.customers(bit(2)) == Rational(4, 9));
    CHECK(mu.customers(bit(3)) == Rational(2, 9));
    CHECK(mu.servers(bit(1)) == Rational(2, 9));
    CHECK(mu.servers(bit(2)) == Rational(4, 9));
    CHECK(mu.servers(bit(3)) == Rational(1, 3));
    CHECK(mu.mass(st.all_customers(), st.all_servers()) == 1);
    CHECK(mu.full_support());
}

TEST_CASE("N-cond holds and S-cond fails on the periodic example")
{
    auto st = nnbis();
    auto mu = nnbis_mu(st);
    auto n = check_ncond(st, mu);
    CHECK(n.holds);
    CHECK(n.witness.empty());
    CHECK(ncond_oracle(st, mu));

    auto s = check_scond(st, mu);
    REQUIRE_FALSE(s.holds);
    CHECK(s.a == bit(3));
    CHECK(s.b == bit(1));
    CHECK(s.lhs == Rational(2, 3));
    CHECK(s.rhs == 1);
    CHECK_FALSE(s.witness.empty());
}

TEST_CASE("N-cond agrees with the definition on random structures")
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 40; ++trial) {
        int n = 2 + trial % 3, m = 2 + (trial / 3) % 3;
        auto e = fixtures::random_connected_bipartite(n, m, 0.15, rng);
        auto st = MatchingStructure::build(n, m, e, fixtures::complete(n, m));
        auto mu = ArrivalDistribution::make(st, fixtures::random_mu(st.arrival_edges(), rng));
        CHECK(check_ncond(st, mu).holds == ncond_oracle(st, mu));
    }
}

TEST_CASE("invalid distributions are rejected")
{
    auto st = nnbis();
    try {
        ArrivalDistribution::make(st, {{{1, 2}, Rational(9, 10)}});
        FAIL("accepted weights summing to 9/10");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("weights must sum to 1") != std::string::npos);
    }
    CHECK_THROWS_AS(ArrivalDistribution::make(st, {{{1, 1}, Rational(1)}}), Error);  // not in F
    CHECK_THROWS_AS(ArrivalDistribution::make(st, {{{1, 2}, Rational(1)}}), Error);  // partial support
    auto partial = ArrivalDistribution::partial(st, {{{1, 2}, Rational(1)}});
    CHECK_FALSE(partial.full_support());
    CHECK(ArrivalDistribution::uniform(st).weight(3, 2) == Rational(1, 5));
}

TEST_CASE("exact weights are parsed as fractions")
{
    CHECK(parse_rational("1/3") == Rational(1, 3));
    CHECK(parse_rational("2/6") == Rational(1, 3));
    CHECK(parse_rational("1") == 1);
    CHECK(to_string(Rational(4, 9)) == "4/9");
    CHECK_THROWS_AS(parse_rational("0.5"), Error);
    CHECK_THROWS_AS(parse_rational("1/0"), Error);
    CHECK_THROWS_AS(parse_rational("x/2"), Error);
}

TEST_CASE("the bi-separable condition on the first figure")
{
    auto st = fixtures::fig4_first();
    auto part = check_bi_separable(st);
    REQUIRE(part);
    auto uniform = ArrivalDistribution::uniform(st);
    auto bis = check_biseparable_cond(*part, uniform);
    // mu(A_i x B_i) < 1/2 checked by hand on each part
    bool expected = true;
    for (const auto& p : part->parts) expected = expected && uniform.mass(p.a, p.b) < Rational(1, 2);
    CHECK(bis.holds == expected);
    auto mono = check_scond_monotone(st, *part, uniform);
    CHECK(mono.holds == check_scond_monotone(st, *part, uniform).holds);
}

TEST_CASE("the sampler reproduces mu")
{
    auto st = nnbis();
    auto mu = nnbis_mu(st);
    IidSource src(st, mu);
    auto rng = derived_rng(3, 0);
    std::map<Edge, int> hits;
    const int draws = 90'000;
    for (int k = 0; k < draws; ++k) ++hits[src.draw(rng)];
    for (auto [e, w] : mu.support()) {
        double expected = static_cast<double>(w) * draws;
        // five standard deviations
        double sd = std::sqrt(expected * (1 - static_cast<double>(w)));
        CHECK(std::abs(hits[e] - expected) < 5 * sd);
    }
    CHECK(hits.size() == 5);
}

TEST_CASE("tau1 estimates do not depend on the thread count")
{
    auto st = nnbis();
    auto mu = nnbis_mu(st);
    auto one = estimate_tau1(st, Policy::fcfs(), mu, fixtures::bd("3", "s1"), 64, 2000, 9, 1);
    auto four = estimate_tau1(st, Policy::fcfs(), mu, fixtures::bd("3", "s1"), 64, 2000, 9, 4);
    CHECK(one.samples == four.samples);
    CHECK(one.median == four.median);
    CHECK(one.runs == 64);
    CHECK(one.censored + 0 <= one.runs);
    if (one.censored < one.runs) {
        CHECK(one.median <= one.p90);
        CHECK(one.p90 <= one.max);
        CHECK(one.median >= 1);
    }
}

TEST_CASE("a horizon that is too short censors every run")
{
    auto st = nnbis();
    auto stats = estimate_tau1(st, Policy::fcfs(), nnbis_mu(st), fixtures::bd("33", "s1s2"), 10, 1, 1);
    CHECK(stats.censored == 10);
    CHECK(stats.censored_fraction() == doctest::Approx(1.0));
}

TEST_CASE("advisor on the periodic example")
{
    auto st = nnbis();
    auto rep = h2_advisor(st, Policy::fcfs(), nnbis_mu(st));
    CHECK(rep.strongly_connected);
    CHECK(rep.ncond.holds);
    CHECK_FALSE(rep.scond.holds);
    CHECK(rep.cases.size() == 6);
    if (rep.certificate) {
        CHECK(rep.cases[*rep.certificate - 1]);
        CHECK(rep.summary().find("certified") == 0);
    } else {
        CHECK(rep.summary() == "inconclusive");
    }
}

TEST_CASE("advisor without N-cond certifies nothing")
{
    auto st = nnbis();
    auto mu = ArrivalDistribution::make(st, {{{1, 2}, Rational(1, 20)},
                                             {{2, 3}, Rational(1, 20)},
                                             {{2, 1}, Rational(1, 20)},
                                             {{3, 1}, Rational(16, 20)},
                                             {{3, 2}, Rational(1, 20)}});
    for (const auto& p : {Policy::fcfs(), Policy::uniform(PolicyKind::ml)}) {
        auto rep = h2_advisor(st, p, mu);
        CHECK_FALSE(rep.ncond.holds);
        CHECK_FALSE(rep.certificate);
        CHECK(rep.summary() == "inconclusive");
    }
}
