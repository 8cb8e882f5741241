#include "ebm/policy.hpp"

#include <algorithm>

#include "ebm/error.hpp"

namespace ebm {

const char* to_string(PolicyKind k)
{
    switch (k) {
    case PolicyKind::fcfs: return "fcfs";
    case PolicyKind::lcfs: return "lcfs";
    case PolicyKind::rand: return "rand";
    case PolicyKind::ml: return "ml";
    case PolicyKind::ms: return "ms";
    }
    return "?";
}

const char* to_string(PreferenceMode m)
{
    switch (m) {
    case PreferenceMode::deterministic: return "deterministic";
    case PreferenceMode::uniform: return "uniform";
    case PreferenceMode::per_arrival: return "per-arrival";
    }
    return "?";
}

PolicyKind parse_policy_kind(std::string_view name)
{
    if (name == "fcfs") return PolicyKind::fcfs;
    if (name == "lcfs") return PolicyKind::lcfs;
    if (name == "rand" || name == "priority") return PolicyKind::rand;
    if (name == "ml") return PolicyKind::ml;
    if (name == "ms") return PolicyKind::ms;
    throw Error(ErrorCode::parse_error, "unknown policy '" + std::string(name) + "'");
}

std::string describe(const Policy& p)
{
    std::string out = to_string(p.kind);
    if (p.class_admissible()) out += std::string(" (") + to_string(p.mode) + ")";
    return out;
}

Arrival view(const ArrivalQuadruple& q)
{
    Arrival a;
    a.customer = q.c;
    a.server = q.s;
    if (!q.prefs.empty()) {
        if (q.c) a.customer_prefs = q.prefs.sigma[q.c - 1];
        if (q.s) a.server_prefs = q.prefs.gamma[q.s - 1];
    }
    return a;
}

namespace {

std::span<const int> effective_prefs(const MatchingStructure& st, const Policy& policy, Side side,
                                     int cls, std::span<const int> given)
{
    if (policy.fixed_preferences() && !policy.profile.empty()) {
        return side == Side::customer ? std::span<const int>(policy.profile.sigma[cls - 1])
                                      : std::span<const int>(policy.profile.gamma[cls - 1]);
    }
    if (!given.empty()) return given;
    return side == Side::customer ? std::span<const int>(st.server_list(cls))
                                  : std::span<const int>(st.customer_list(cls));
}

int select_in_order(PolicyKind kind, const std::vector<int>& counts, std::span<const int> prefs)
{
    int best = 0, best_count = 0;
    for (int k : prefs) {
        int n = counts[k - 1];
        if (n <= 0) continue;
        switch (kind) {
        case PolicyKind::rand: return k;
        case PolicyKind::ml:
            if (n > best_count) best = k, best_count = n;
            break;
        case PolicyKind::ms:
            if (best == 0 || n < best_count) best = k, best_count = n;
            break;
        default: break;
        }
    }
    return best;
}

// Position of the partner chosen in `queue` by an entering item with neighbor set `nbrs`.
int pick_position(const MatchingStructure& st, const Policy& policy, const Word& queue, Mask nbrs,
                  Side side, int entering, std::span<const int> given, int alphabet)
{
    switch (policy.kind) {
    case PolicyKind::fcfs:
        for (std::size_t k = 0; k < queue.size(); ++k)
            if (has(nbrs, queue[k])) return static_cast<int>(k);
        return -1;
    case PolicyKind::lcfs:
        for (std::size_t k = queue.size(); k-- > 0;)
            if (has(nbrs, queue[k])) return static_cast<int>(k);
        return -1;
    default: break;
    }
    std::vector<int> counts(alphabet, 0);
    bool any = false;
    for (int letter : queue) {
        if (has(nbrs, letter)) {
            ++counts[letter - 1];
            any = true;
        }
    }
    if (!any) return -1;
    int cls = select_in_order(policy.kind, counts,
                              effective_prefs(st, policy, side, entering, given));
    // within a class the oldest item goes first
    for (std::size_t k = 0; k < queue.size(); ++k)
        if (queue[k] == cls) return static_cast<int>(k);
    return -1;
}

}  // namespace

int select_match(const MatchingStructure& st, const Policy& policy, const std::vector<int>& counts,
                 Side side, int entering, std::span<const int> prefs)
{
    if (!policy.class_admissible())
        throw Error(ErrorCode::not_class_admissible,
                    std::string(to_string(policy.kind)) + " is not class-admissible");
    return select_in_order(policy.kind, counts,
                           effective_prefs(st, policy, side, entering, prefs));
}

StepDecision decide(const MatchingStructure& st, const Policy& policy, const Word& w, const Word& z,
                    const Arrival& a)
{
    if (a.customer && a.server && !st.in_f(a.customer, a.server))
        throw Error(ErrorCode::arrival_not_in_f, "(" + format_customer(a.customer) + "," +
                                                     format_server(a.server) + ") is not in F");
    StepDecision d;
    if (a.customer)
        d.server_pos = pick_position(st, policy, z, st.server_nbrs(a.customer), Side::customer,
                                     a.customer, a.customer_prefs, st.servers());
    if (a.server)
        d.customer_pos = pick_position(st, policy, w, st.customer_nbrs(a.server), Side::server,
                                       a.server, a.server_prefs, st.customers());
    // buffer-first: the pair matches together only when both buffer searches failed
    d.together = a.customer && a.server && d.server_pos < 0 && d.customer_pos < 0 &&
                 st.in_e(a.customer, a.server);
    return d;
}

BufferDetail step_buffer(const MatchingStructure& st, const Policy& policy, const BufferDetail& b,
                         const Arrival& a)
{
    StepDecision d = decide(st, policy, b.w, b.z, a);
    BufferDetail out = b;
    if (d.together) return out;
    if (d.customer_pos >= 0) out.w.erase(out.w.begin() + d.customer_pos);
    if (d.server_pos >= 0) out.z.erase(out.z.begin() + d.server_pos);
    if (a.customer && d.server_pos < 0) out.w.push_back(a.customer);
    if (a.server && d.customer_pos < 0) out.z.push_back(a.server);
    return out;
}

BufferDetail step_buffer(const MatchingStructure& st, const Policy& policy, const BufferDetail& b,
                         const ArrivalQuadruple& q)
{
    return step_buffer(st, policy, b, view(q));
}

ClassDetail step_class(const MatchingStructure& st, const Policy& policy, const ClassDetail& d,
                       const Arrival& a)
{
    if (!policy.class_admissible())
        throw Error(ErrorCode::not_class_admissible,
                    std::string(to_string(policy.kind)) +
                        " acts on buffer details; project step_buffer instead");
    if (a.customer && a.server && !st.in_f(a.customer, a.server))
        throw Error(ErrorCode::arrival_not_in_f, "(" + format_customer(a.customer) + "," +
                                                     format_server(a.server) + ") is not in F");
    // P(y,c) and Q(x,s) restricted to the neighbor classes
    auto restricted = [](const std::vector<int>& counts, Mask nbrs) {
        std::vector<int> out(counts.size(), 0);
        for (int k : members(nbrs)) out[k - 1] = counts[k - 1];
        return out;
    };
    int p = 0, q = 0;
    if (a.customer)
        p = select_match(st, policy, restricted(d.y, st.server_nbrs(a.customer)), Side::customer,
                         a.customer, a.customer_prefs);
    if (a.server)
        q = select_match(st, policy, restricted(d.x, st.customer_nbrs(a.server)), Side::server,
                         a.server, a.server_prefs);
    ClassDetail out = d;
    if (a.customer && a.server && !p && !q && st.in_e(a.customer, a.server)) return out;
    if (p)
        --out.y[p - 1];
    else if (a.customer)
        ++out.x[a.customer - 1];
    if (q)
        --out.x[q - 1];
    else if (a.server)
        ++out.y[a.server - 1];
    return out;
}

PermutationTable PermutationTable::build(const MatchingStructure& st)
{
    auto all_perms = [](std::vector<int> items) {
        std::vector<std::vector<int>> out;
        std::sort(items.begin(), items.end());
        do out.push_back(items);
        while (std::next_permutation(items.begin(), items.end()));
        return out;
    };
    PermutationTable t;
    for (int c = 1; c <= st.customers(); ++c) t.sigma.push_back(all_perms(st.server_list(c)));
    for (int s = 1; s <= st.servers(); ++s) t.gamma.push_back(all_perms(st.customer_list(s)));
    return t;
}

std::vector<int> uniform_permutation(const std::vector<int>& items, std::mt19937_64& rng)
{
    std::vector<int> out = items;
    std::shuffle(out.begin(), out.end(), rng);
    return out;
}

PreferenceProfile draw_uniform_profile(const MatchingStructure& st, std::mt19937_64& rng)
{
    PreferenceProfile p;
    for (int c = 1; c <= st.customers(); ++c)
        p.sigma.push_back(uniform_permutation(st.server_list(c), rng));
    for (int s = 1; s <= st.servers(); ++s)
        p.gamma.push_back(uniform_permutation(st.customer_list(s), rng));
    return p;
}

}  // namespace ebm
