#include "ebm/loynes.hpp"

#include <algorithm>
#include <set>
#include <thread>

#include "ebm/error.hpp"

namespace ebm {

namespace {

long long mod(long long a, long long p)
{
    long long r = a % p;
    return r < 0 ? r + p : r;
}

// Events at times [from, to) applied to b.
BufferDetail apply_range(const MatchingStructure& st, const Policy& policy,
                         const PeriodicSample& sample, BufferDetail b, long long from, long long to)
{
    for (long long t = from; t < to; ++t) b = step_buffer(st, policy, b, sample.at(t));
    return b;
}

std::size_t length(const BufferDetail& b) { return b.w.size() + b.z.size(); }

}  // namespace

const ArrivalQuadruple& PeriodicSample::at(long long t) const
{
    return events[static_cast<std::size_t>(mod(origin + t, period()))];
}

void PeriodicSample::validate(const MatchingStructure& st) const
{
    if (events.empty()) throw Error(ErrorCode::validation_error, "periodic sample has no events");
    if (origin < 0 || origin >= period())
        throw Error(ErrorCode::validation_error,
                    "origin " + std::to_string(origin) + " outside the period");
    for (std::size_t k = 0; k < events.size(); ++k) {
        const auto& q = events[k];
        if (q.c < 1 || q.c > st.customers() || q.s < 1 || q.s > st.servers())
            throw Error(ErrorCode::out_of_range_edge,
                        "event " + std::to_string(k) + " is not a customer/server pair");
        if (!st.in_f(q.c, q.s))
            throw Error(ErrorCode::arrival_not_in_f,
                        "event " + std::to_string(k) + " (" + std::to_string(q.c) + "," +
                            format_server(q.s) + ") is not in F");
        if (!q.prefs.empty()) q.prefs.validate(st);
    }
}

std::optional<StationarySolution> backward_coupling(const MatchingStructure& st,
                                                    const Policy& policy,
                                                    const PeriodicSample& sample,
                                                    int max_backsteps, int threads)
{
    sample.validate(st);
    const int p = sample.period();
    std::vector<BufferDetail> values(p);
    std::vector<int> depth(p, -1);

    // T_k: one period ending just before time k. The value at shift k is the fixed point
    // reached by iterating T_k from the empty buffer.
    auto solve = [&](int k) {
        BufferDetail cur;
        for (int n = 1; n <= max_backsteps; ++n) {
            BufferDetail next = apply_range(st, policy, sample, cur, k - p, k);
            if (n > 1 && next == cur) {
                values[k] = std::move(cur);
                depth[k] = n - 1;
                return;
            }
            cur = std::move(next);
        }
    };

    int workers = std::clamp(threads, 1, p);
    if (workers == 1) {
        for (int k = 0; k < p; ++k) solve(k);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < workers; ++t)
            pool.emplace_back([&, t] {
                for (int k = t; k < p; k += workers) solve(k);
            });
        for (auto& th : pool) th.join();
    }

    if (std::any_of(depth.begin(), depth.end(), [](int d) { return d < 0; })) return std::nullopt;

    for (int k = 0; k < p; ++k) {
        BufferDetail next = step_buffer(st, policy, values[k], sample.at(k));
        if (next != values[(k + 1) % p])
            throw Error(ErrorCode::stationarity_violation,
                        "stationary values fail the recursion at shift " + std::to_string(k));
    }
    StationarySolution sol;
    sol.values = std::move(values);
    sol.coupling_depth = *std::max_element(depth.begin(), depth.end());
    return sol;
}

std::vector<std::size_t> backward_min_lengths(const MatchingStructure& st, const Policy& policy,
                                              const PeriodicSample& sample, int periods)
{
    sample.validate(st);
    const int p = sample.period();
    std::vector<BufferDetail> cur(p);
    std::vector<std::size_t> out;
    for (int n = 1; n <= periods; ++n) {
        std::size_t best = SIZE_MAX;
        for (int k = 0; k < p; ++k) {
            cur[k] = apply_range(st, policy, sample, cur[k], k - p, k);
            best = std::min(best, length(cur[k]));
        }
        out.push_back(best);
    }
    return out;
}

bool check_renovation(const MatchingStructure& st, const Policy& policy,
                      const PeriodicSample& sample, const std::vector<ErasingCouple>& couples,
                      int window)
{
    sample.validate(st);
    const long long p = sample.period();
    Word block_c, block_s;
    for (const auto& e : couples) {
        block_c.insert(block_c.end(), e.c.begin(), e.c.end());
        block_s.insert(block_s.end(), e.s.begin(), e.s.end());
    }
    if (block_c.size() != block_s.size()) return false;
    const long long m = static_cast<long long>(block_c.size());

    // A buffer longer than this can not be empty again within the window: every arrival
    // removes at most one item per side.
    const std::size_t bound = static_cast<std::size_t>(2 * (p + window) + 2);

    for (long long k = 0; k < p; ++k) {
        // States at time 0 of systems started empty at any time -j <= 0. Starts at -(r + Np)
        // go through the period map ending at -r, whose orbit from the empty buffer is finite
        // unless it outgrows the bound.
        std::set<BufferDetail> at_zero;
        bool overflow = false;
        for (long long r = 0; r < p && !overflow; ++r) {
            std::set<BufferDetail> orbit;
            BufferDetail x;
            while (orbit.insert(x).second) {
                at_zero.insert(apply_range(st, policy, sample, x, k - r, k));
                x = apply_range(st, policy, sample, x, k - r - p, k - r);
                if (length(x) > bound) {
                    overflow = true;
                    break;
                }
            }
        }
        if (overflow) return false;

        bool found = false;
        std::set<BufferDetail> states = std::move(at_zero);
        for (long long l = 0; l <= window && !found; ++l) {
            if (l > 0) {
                std::set<BufferDetail> next;
                for (const auto& b : states) next.insert(step_buffer(st, policy, b, sample.at(k + l - 1)));
                states = std::move(next);
            }
            if (states.size() != 1 || !states.begin()->empty()) continue;
            bool block = true;
            for (long long t = 0; t < m && block; ++t) {
                const auto& q = sample.at(k + l + t);
                block = q.c == block_c[t] && q.s == block_s[t];
            }
            found = block;
        }
        if (!found) return false;
    }
    return true;
}

std::vector<int> construction_points(const StationarySolution& solution)
{
    std::vector<int> out;
    for (std::size_t k = 0; k < solution.values.size(); ++k)
        if (solution.values[k].empty()) out.push_back(static_cast<int>(k));
    if (out.empty())
        throw Error(ErrorCode::no_construction_points,
                    "the stationary buffer is never empty on this sample");
    return out;
}

PeriodicMatching biinfinite_matching(const MatchingStructure& st, const Policy& policy,
                                     const PeriodicSample& sample,
                                     const StationarySolution& solution)
{
    const int p = sample.period();
    if (static_cast<int>(solution.values.size()) != p)
        throw Error(ErrorCode::validation_error, "solution and sample have different periods");
    PeriodicMatching out;
    out.period = p;
    out.construction_points = construction_points(solution);
    const auto& cp = out.construction_points;

    for (std::size_t i = 0; i < cp.size(); ++i) {
        int from = cp[i];
        int to = i + 1 < cp.size() ? cp[i + 1] : cp[0] + p;
        std::vector<ArrivalQuadruple> segment;
        for (int t = from; t < to; ++t) segment.push_back(sample.at(t));
        auto tr = run(st, policy, BufferDetail{}, std::span<const ArrivalQuadruple>(segment), from);
        if (!is_perfect(tr))
            throw Error(ErrorCode::imperfect_segment,
                        "segment [" + std::to_string(from) + "," + std::to_string(to) +
                            ") leaves " + format_buffer(tr.final_buffer()));
        for (int t = from; t < to; ++t)
            if (tr.steps[t - from] != solution.values[(t + 1) % p])
                throw Error(ErrorCode::imperfect_segment,
                            "segment run departs from the stationary values at time " +
                                std::to_string(t + 1));
        for (Match mt : tr.matches) {
            mt.customer_index = mod(mt.customer_index, p);
            mt.server_index = mod(mt.server_index, p);
            mt.step = mod(mt.step, p);
            out.matches.push_back(mt);
        }
    }
    std::sort(out.matches.begin(), out.matches.end(),
              [](const Match& a, const Match& b) { return a.customer_index < b.customer_index; });
    return out;
}

std::optional<long long> forward_coupling_check(const MatchingStructure& st, const Policy& policy,
                                                const PeriodicSample& sample,
                                                const StationarySolution& solution,
                                                const BufferDetail& initial, long long max_steps)
{
    validate_buffer(st, initial.w, initial.z);
    const long long p = sample.period();
    auto stationary = [&](long long t) -> const BufferDetail& {
        return solution.values[static_cast<std::size_t>(mod(t, p))];
    };
    BufferDetail cur = initial;
    for (long long t = 0; t <= max_steps; ++t) {
        if (cur == stationary(t)) {
            BufferDetail probe = cur;
            bool stays = true;
            for (long long i = 0; i < p && stays; ++i) {
                probe = step_buffer(st, policy, probe, sample.at(t + i));
                stays = probe == stationary(t + i + 1);
            }
            if (stays) return t;
        }
        cur = step_buffer(st, policy, cur, sample.at(t));
    }
    return std::nullopt;
}

}  // namespace ebm
