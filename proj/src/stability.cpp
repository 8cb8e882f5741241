#include "ebm/stability.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include "ebm/engine.hpp"
#include "ebm/error.hpp"

namespace ebm {

ArrivalDistribution ArrivalDistribution::assemble(
    const MatchingStructure& st, const std::vector<std::pair<Edge, Rational>>& weights,
    bool require_full)
{
    ArrivalDistribution mu;
    mu.n_ = st.customers();
    mu.m_ = st.servers();
    mu.w_.assign(static_cast<std::size_t>(mu.n_ * mu.m_), Rational(0));
    Rational total = 0;
    for (const auto& [e, p] : weights) {
        auto [c, s] = e;
        if (c < 1 || c > mu.n_ || s < 1 || s > mu.m_)
            throw Error(ErrorCode::out_of_range_edge, "weight on an edge outside C x S");
        if (!st.in_f(c, s))
            throw Error(ErrorCode::invalid_distribution,
                        "weight on (" + format_customer(c) + "," + format_server(s) +
                            ") which is not an arrival edge");
        if (p < 0) throw Error(ErrorCode::invalid_distribution, "negative weight");
        mu.w_[(c - 1) * mu.m_ + (s - 1)] += p;
        total += p;
    }
    if (total != 1)
        throw Error(ErrorCode::validation_error,
                    "weights must sum to 1 (they sum to " + to_string(total) + ")");
    mu.full_support_ = true;
    for (auto [c, s] : st.arrival_edges())
        if (mu.weight(c, s) == 0) mu.full_support_ = false;
    if (require_full && !mu.full_support_)
        throw Error(ErrorCode::invalid_distribution, "mu must charge every edge of F");
    return mu;
}

ArrivalDistribution ArrivalDistribution::make(const MatchingStructure& st,
                                              const std::vector<std::pair<Edge, Rational>>& weights)
{
    return assemble(st, weights, true);
}

ArrivalDistribution ArrivalDistribution::partial(
    const MatchingStructure& st, const std::vector<std::pair<Edge, Rational>>& weights)
{
    return assemble(st, weights, false);
}

ArrivalDistribution ArrivalDistribution::uniform(const MatchingStructure& st)
{
    std::vector<std::pair<Edge, Rational>> w;
    Rational p(1, static_cast<int>(st.arrival_edges().size()));
    for (const auto& e : st.arrival_edges()) w.emplace_back(e, p);
    return make(st, w);
}

Rational ArrivalDistribution::customers(Mask a) const { return mass(a, full_mask(m_)); }
Rational ArrivalDistribution::servers(Mask b) const { return mass(full_mask(n_), b); }

Rational ArrivalDistribution::mass(Mask a, Mask b) const
{
    Rational out = 0;
    for (int c : members(a))
        for (int s : members(b)) out += weight(c, s);
    return out;
}

Rational ArrivalDistribution::mass_on_e(const MatchingStructure& st, Mask a, Mask b) const
{
    Rational out = 0;
    for (int c : members(a))
        for (int s : members(b))
            if (st.in_e(c, s)) out += weight(c, s);
    return out;
}

std::vector<std::pair<Edge, Rational>> ArrivalDistribution::support() const
{
    std::vector<std::pair<Edge, Rational>> out;
    for (int c = 1; c <= n_; ++c)
        for (int s = 1; s <= m_; ++s)
            if (weight(c, s) != 0) out.push_back({{c, s}, weight(c, s)});
    return out;
}

namespace {

std::string set_label(Mask a, Mask b)
{
    std::string out = "{" + format_mask(a, false) + "}";
    if (b) out += "u{" + format_mask(b, true) + "}";
    return out;
}

// Keeps the witness with the largest violation margin; ties go to the first one met.
void record_failure(ConditionResult& res, Rational& worst, const Rational& margin, Mask a, Mask b,
                    int part, const Rational& lhs, const Rational& rhs, std::string label)
{
    if (res.holds || margin > worst) {
        res.holds = false;
        worst = margin;
        res.a = a;
        res.b = b;
        res.part = part;
        res.lhs = lhs;
        res.rhs = rhs;
        res.witness = std::move(label);
    }
}

}  // namespace

ConditionResult check_ncond(const MatchingStructure& st, const ArrivalDistribution& mu, int cap)
{
    if (st.customers() > cap || st.servers() > cap)
        throw Error(ErrorCode::too_large, "subset enumeration is capped at " + std::to_string(cap));
    ConditionResult res;
    Rational worst;
    for (Mask a = 1; a < st.all_customers(); ++a) {
        Rational lhs = mu.customers(a), rhs = mu.servers(st.server_nbrs_of(a));
        if (!(lhs < rhs)) record_failure(res, worst, lhs - rhs, a, 0, -1, lhs, rhs, "A=" + set_label(a, 0));
    }
    for (Mask b = 1; b < st.all_servers(); ++b) {
        Rational lhs = mu.servers(b), rhs = mu.customers(st.customer_nbrs_of(b));
        if (!(lhs < rhs))
            record_failure(res, worst, lhs - rhs, 0, b, -1, lhs, rhs, "B={" + format_mask(b, true) + "}");
    }
    return res;
}

ConditionResult check_scond(const MatchingStructure& st, const ArrivalDistribution& mu, int cap)
{
    ConditionResult res;
    Rational worst;
    for (const auto& is : enumerate_independent_sets(st, cap)) {
        if (!is.two_sided()) continue;
        Rational lhs = mu.customers(st.customer_nbrs_of(is.b)) + mu.servers(st.server_nbrs_of(is.a));
        Rational rhs = 1 - mu.mass_on_e(st, is.c_circ, is.s_circ);
        if (!(lhs > rhs))
            record_failure(res, worst, rhs - lhs, is.a, is.b, -1, lhs, rhs, set_label(is.a, is.b));
    }
    return res;
}

ConditionResult check_biseparable_cond(const BiSeparablePartition& part,
                                       const ArrivalDistribution& mu)
{
    ConditionResult res;
    Rational worst, half(1, 2);
    for (int i = 0; i < part.order(); ++i) {
        const auto& p = part.parts[i];
        Rational lhs = mu.mass(p.a, p.b);
        if (!(lhs < half))
            record_failure(res, worst, lhs - half, p.a, p.b, i, lhs, half,
                           "part " + std::to_string(i + 1) + " " + set_label(p.a, p.b));
    }
    return res;
}

ConditionResult check_scond_monotone(const MatchingStructure& st, const BiSeparablePartition& part,
                                     const ArrivalDistribution& mu)
{
    ConditionResult res;
    Rational worst;
    for (int i = 0; i < part.order(); ++i) {
        const auto& p = part.parts[i];
        if (!p.two_sided()) continue;
        Rational lhs = mu.mass(p.a, p.b);
        Rational rhs = mu.mass(st.customer_nbrs_of(p.b), st.server_nbrs_of(p.a));
        if (!(lhs < rhs))
            record_failure(res, worst, lhs - rhs, p.a, p.b, i, lhs, rhs,
                           "part " + std::to_string(i + 1) + " " + set_label(p.a, p.b));
    }
    return res;
}

IidSource::IidSource(const MatchingStructure& st, const ArrivalDistribution& mu)
{
    BigInt lcm = 1;
    auto sup = mu.support();
    for (const auto& [e, p] : sup) {
        BigInt d = boost::multiprecision::denominator(p);
        lcm = lcm / boost::multiprecision::gcd(lcm, d) * d;
    }
    total_ = 0;
    for (const auto& [e, p] : sup) {
        edges_.push_back(e);
        total_ += boost::multiprecision::numerator(p) * (lcm / boost::multiprecision::denominator(p));
        cumulative_.push_back(total_);
    }
    (void)st;
    narrow_ = total_ <= BigInt(std::numeric_limits<std::uint64_t>::max());
    if (!narrow_)
        throw Error(ErrorCode::too_large, "common denominator of mu exceeds 64 bits");
    for (const auto& c : cumulative_) cumulative64_.push_back(static_cast<std::uint64_t>(c));
}

Edge IidSource::draw(std::mt19937_64& rng) const
{
    std::uint64_t total = cumulative64_.back();
    std::uniform_int_distribution<std::uint64_t> u(0, total - 1);
    std::uint64_t x = u(rng);
    auto it = std::upper_bound(cumulative64_.begin(), cumulative64_.end(), x);
    return edges_[static_cast<std::size_t>(it - cumulative64_.begin())];
}

std::mt19937_64 derived_rng(std::uint64_t seed, std::uint64_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

Tau1Stats estimate_tau1(const MatchingStructure& st, const Policy& policy,
                        const ArrivalDistribution& mu, const BufferDetail& initial, std::size_t runs,
                        long long horizon, std::uint64_t seed, int threads)
{
    validate_buffer(st, initial.w, initial.z);
    IidSource source(st, mu);
    bool draw_prefs = policy.uses_preferences() && !policy.fixed_preferences();
    Tau1Stats out;
    out.runs = runs;
    out.samples.assign(runs, -1);

    auto one_run = [&](std::size_t r) {
        auto rng = derived_rng(seed, r);
        BufferDetail b = initial;
        std::vector<int> sig, gam;
        for (long long n = 1; n <= horizon; ++n) {
            auto [c, s] = source.draw(rng);
            Arrival a{c, s, {}, {}};
            if (draw_prefs) {
                sig = uniform_permutation(st.server_list(c), rng);
                gam = uniform_permutation(st.customer_list(s), rng);
                a.customer_prefs = sig;
                a.server_prefs = gam;
            }
            b = advance(st, policy, std::move(b), std::span<const Arrival>(&a, 1));
            if (b.empty()) {
                out.samples[r] = n;
                return;
            }
        }
    };

    int workers = std::max(1, std::min<int>(threads, static_cast<int>(runs)));
    if (workers == 1) {
        for (std::size_t r = 0; r < runs; ++r) one_run(r);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < workers; ++t)
            pool.emplace_back([&, t] {
                for (std::size_t r = static_cast<std::size_t>(t); r < runs;
                     r += static_cast<std::size_t>(workers))
                    one_run(r);
            });
        for (auto& th : pool) th.join();
    }

    std::vector<long long> done;
    for (long long v : out.samples) {
        if (v < 0)
            ++out.censored;
        else
            done.push_back(v);
    }
    if (!done.empty()) {
        std::sort(done.begin(), done.end());
        out.mean = std::accumulate(done.begin(), done.end(), 0.0) / double(done.size());
        out.median = done[(done.size() - 1) / 2];
        out.p90 = done[(done.size() * 9 + 9) / 10 - 1];  // nearest rank
        out.max = done.back();
    }
    return out;
}

std::string H2Report::summary() const
{
    if (certificate) return "certified by case " + std::to_string(*certificate);
    return "inconclusive";
}

H2Report h2_advisor(const MatchingStructure& st, const Policy& policy,
                    const ArrivalDistribution& mu)
{
    H2Report rep;
    rep.strongly_connected = is_strongly_connected(associated_digraph(st));
    rep.kind = detect_model_kind(st);
    rep.ncond = check_ncond(st, mu);
    rep.scond = check_scond(st, mu);
    auto part = check_bi_separable(st);
    if (part) rep.scond_monotone = check_scond_monotone(st, *part, mu);

    bool sc = rep.strongly_connected;
    bool n = rep.ncond.holds;
    // Cases 4-6 rest on results that assume the stability region, hence on N-cond.
    rep.cases = {
        sc && rep.scond.holds,
        sc && n && policy.kind == PolicyKind::ml,
        sc && part.has_value() && rep.scond_monotone->holds,
        rep.kind == ModelKind::bm && policy.kind == PolicyKind::fcfs && n,
        rep.kind == ModelKind::gm && policy.kind == PolicyKind::fcfs && n,
        rep.kind == ModelKind::gm && policy.kind == PolicyKind::ml && n,
    };
    for (std::size_t k = 0; k < rep.cases.size(); ++k) {
        if (rep.cases[k]) {
            rep.certificate = static_cast<int>(k + 1);
            break;
        }
    }
    return rep;
}

}  // namespace ebm
