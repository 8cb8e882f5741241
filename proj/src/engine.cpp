#include "ebm/engine.hpp"

#include <sstream>

#include "ebm/error.hpp"

namespace ebm {

BufferDetail MatchingTrace::final_buffer() const
{
    BufferDetail b;
    for (const auto& it : customers) b.w.push_back(it.cls);
    for (const auto& it : servers) b.z.push_back(it.cls);
    return b;
}

MatchingTrace run(const MatchingStructure& st, const Policy& policy, const BufferDetail& initial,
                  std::span<const Arrival> input, long long first_index)
{
    if (!is_admissible_buffer(st, initial.w, initial.z))
        validate_buffer(st, initial.w, initial.z);  // throws with the offending pair

    MatchingTrace tr;
    tr.initial = initial;
    tr.first_step = first_index;
    auto tag = [](const Word& word) {
        std::vector<TaggedItem> out;
        long long n = static_cast<long long>(word.size());
        for (long long k = 0; k < n; ++k) out.push_back({word[k], k - n});
        return out;
    };
    tr.customers = tag(initial.w);
    tr.servers = tag(initial.z);
    BufferDetail cur = initial;
    long long next_customer = first_index, next_server = first_index;
    tr.steps.reserve(input.size());

    for (std::size_t t = 0; t < input.size(); ++t) {
        const Arrival& a = input[t];
        if (!a.customer && !a.server)
            throw Error(ErrorCode::not_admissible_input, "arrival with neither customer nor server");
        long long step = first_index + static_cast<long long>(t);
        StepDecision d = decide(st, policy, cur.w, cur.z, a);
        long long ci = a.customer ? next_customer++ : 0;
        long long si = a.server ? next_server++ : 0;
        if (d.together) {
            tr.matches.push_back({ci, si, a.customer, a.server, step});
        } else {
            if (d.customer_pos >= 0) {
                const TaggedItem& partner = tr.customers[d.customer_pos];
                tr.matches.push_back({partner.index, si, partner.cls, a.server, step});
            }
            if (d.server_pos >= 0) {
                const TaggedItem& partner = tr.servers[d.server_pos];
                tr.matches.push_back({ci, partner.index, a.customer, partner.cls, step});
            }
            if (d.customer_pos >= 0) {
                tr.customers.erase(tr.customers.begin() + d.customer_pos);
                cur.w.erase(cur.w.begin() + d.customer_pos);
            }
            if (d.server_pos >= 0) {
                tr.servers.erase(tr.servers.begin() + d.server_pos);
                cur.z.erase(cur.z.begin() + d.server_pos);
            }
            if (a.customer && d.server_pos < 0) {
                tr.customers.push_back({a.customer, ci});
                cur.w.push_back(a.customer);
            }
            if (a.server && d.customer_pos < 0) {
                tr.servers.push_back({a.server, si});
                cur.z.push_back(a.server);
            }
        }
        tr.steps.push_back(cur);
    }
    return tr;
}

MatchingTrace run(const MatchingStructure& st, const Policy& policy, const BufferDetail& initial,
                  std::span<const ArrivalQuadruple> input, long long first_index)
{
    std::vector<Arrival> views;
    views.reserve(input.size());
    for (const auto& q : input) views.push_back(view(q));
    return run(st, policy, initial, std::span<const Arrival>(views), first_index);
}

BufferDetail advance(const MatchingStructure& st, const Policy& policy, BufferDetail b,
                     std::span<const Arrival> input)
{
    for (const Arrival& a : input) {
        StepDecision d = decide(st, policy, b.w, b.z, a);
        if (d.together) continue;
        if (d.customer_pos >= 0) b.w.erase(b.w.begin() + d.customer_pos);
        if (d.server_pos >= 0) b.z.erase(b.z.begin() + d.server_pos);
        if (a.customer && d.server_pos < 0) b.w.push_back(a.customer);
        if (a.server && d.customer_pos < 0) b.z.push_back(a.server);
    }
    return b;
}

std::vector<ArrivalQuadruple> word_arrivals(const Word& c, const Word& s,
                                            std::span<const PreferenceProfile> prefs)
{
    std::size_t n = std::max(c.size(), s.size());
    if (!prefs.empty() && prefs.size() != n)
        throw Error(ErrorCode::profile_length_mismatch,
                    "expected " + std::to_string(n) + " preference profiles, got " +
                        std::to_string(prefs.size()));
    std::size_t lead_c = c.size() - std::min(c.size(), s.size());
    std::size_t lead_s = s.size() - std::min(c.size(), s.size());
    std::vector<ArrivalQuadruple> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        ArrivalQuadruple q;
        if (k >= lead_s) q.c = c[k - lead_s];
        if (k >= lead_c) q.s = s[k - lead_c];
        if (!prefs.empty()) q.prefs = prefs[k];
        out.push_back(std::move(q));
    }
    return out;
}

MatchingTrace match_words(const MatchingStructure& st, const Policy& policy, const Word& c,
                          const Word& s, std::span<const PreferenceProfile> prefs,
                          const BufferDetail& initial)
{
    auto input = word_arrivals(c, s, prefs);
    return run(st, policy, initial, std::span<const ArrivalQuadruple>(input));
}

bool is_perfect(const MatchingTrace& trace)
{
    return trace.customers.empty() && trace.servers.empty();
}

std::string format_trace(const MatchingTrace& trace)
{
    std::ostringstream os;
    std::size_t m = 0;
    for (std::size_t t = 0; t < trace.steps.size(); ++t) {
        long long step = trace.first_step + static_cast<long long>(t);
        while (m < trace.matches.size() && trace.matches[m].step == step) {
            const Match& x = trace.matches[m++];
            os << 't' << step << " match " << format_customer(x.customer_class) << '@'
               << x.customer_index << ' ' << format_server(x.server_class) << '@'
               << x.server_index << '\n';
        }
        os << 't' << step << " buffer " << format_buffer(trace.steps[t]) << '\n';
    }
    return os.str();
}

}  // namespace ebm
