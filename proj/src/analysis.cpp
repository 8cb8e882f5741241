#include "ebm/analysis.hpp"

#include <functional>
#include <map>
#include <sstream>

#include "ebm/error.hpp"

namespace ebm {

const char* to_string(CheckStatus s)
{
    switch (s) {
    case CheckStatus::clean: return "clean";
    case CheckStatus::violated: return "violated";
    case CheckStatus::budget_exhausted: return "budget-exhausted";
    }
    return "?";
}

ArrivalAlphabet::ArrivalAlphabet(const MatchingStructure& st, const Policy& policy)
    : st_(&st), perms_(std::make_shared<PermutationTable>(PermutationTable::build(st))),
      enumerate_(policy.uses_preferences() && !policy.fixed_preferences())
{
    for (auto [c, s] : st.arrival_edges()) {
        auto v = variants(c, s);
        choices_.insert(choices_.end(), v.begin(), v.end());
    }
}

std::vector<Arrival> ArrivalAlphabet::variants(int c, int s) const
{
    std::vector<Arrival> out;
    if (!enumerate_) {
        out.push_back({c, s, {}, {}});
        return out;
    }
    static const std::vector<std::vector<int>> none{{}};
    const auto& sig = c ? perms_->sigma[c - 1] : none;
    const auto& gam = s ? perms_->gamma[s - 1] : none;
    for (const auto& a : sig)
        for (const auto& b : gam) out.push_back({c, s, a, b});
    return out;
}

ArrivalQuadruple ArrivalAlphabet::quadruple(const Arrival& a) const
{
    ArrivalQuadruple q{a.customer, a.server, {}};
    if (a.customer_prefs.empty() && a.server_prefs.empty()) return q;
    q.prefs = PreferenceProfile::ascending(*st_);
    if (a.customer && !a.customer_prefs.empty())
        q.prefs.sigma[a.customer - 1].assign(a.customer_prefs.begin(), a.customer_prefs.end());
    if (a.server && !a.server_prefs.empty())
        q.prefs.gamma[a.server - 1].assign(a.server_prefs.begin(), a.server_prefs.end());
    return q;
}

SubadditiveEvaluation evaluate_subadditive_pair(const MatchingStructure& st, const Policy& policy,
                                                const std::vector<ArrivalQuadruple>& first,
                                                const std::vector<ArrivalQuadruple>& second)
{
    auto views = [](const std::vector<ArrivalQuadruple>& in) {
        std::vector<Arrival> out;
        for (const auto& q : in) out.push_back(view(q));
        return out;
    };
    auto v1 = views(first), v2 = views(second);
    SubadditiveEvaluation ev;
    ev.first = advance(st, policy, {}, v1);
    ev.second = advance(st, policy, {}, v2);
    ev.combined = advance(st, policy, ev.first, v2);
    return ev;
}

SubadditiveResult check_subadditive(const MatchingStructure& st, const Policy& policy,
                                    const SubadditiveOptions& opt)
{
    ArrivalAlphabet alpha(st, policy);
    const auto& letters = alpha.choices();
    SubadditiveResult res;
    bool exhausted = false;

    // Only the residual of the first piece matters for the combined run, so the first piece
    // is reduced to its set of reachable residuals, each with one witness input.
    std::map<BufferDetail, std::vector<int>> residuals;
    std::vector<int> path;
    std::function<void(const BufferDetail&, int)> first_piece = [&](const BufferDetail& b,
                                                                     int depth) {
        residuals.emplace(b, path);
        if (depth == opt.max_len_first || exhausted) return;
        for (int k = 0; k < static_cast<int>(letters.size()); ++k) {
            if (++res.steps > opt.budget.max_steps) {
                exhausted = true;
                return;
            }
            Arrival a = letters[k];
            BufferDetail next = b;
            next = advance(st, policy, std::move(next), std::span<const Arrival>(&a, 1));
            path.push_back(k);
            first_piece(next, depth + 1);
            path.pop_back();
            if (exhausted) return;
        }
    };
    first_piece({}, 0);
    res.residual_states = residuals.size();

    std::vector<const BufferDetail*> keys;
    std::vector<const std::vector<int>*> witnesses;
    for (const auto& [b, w] : residuals) {
        keys.push_back(&b);
        witnesses.push_back(&w);
    }

    auto to_quads = [&](const std::vector<int>& idx) {
        std::vector<ArrivalQuadruple> out;
        for (int k : idx) out.push_back(alpha.quadruple(letters[k]));
        return out;
    };

    // states[0] runs the second piece alone; states[r+1] continues residual r.
    std::function<bool(const std::vector<BufferDetail>&, int)> second_piece =
        [&](const std::vector<BufferDetail>& states, int depth) -> bool {
        if (depth > 0) {
            for (std::size_t r = 0; r < keys.size(); ++r) {
                SubadditiveEvaluation ev{states[r + 1], *keys[r], states[0]};
                if (!ev.holds()) {
                    res.counterexample = SubadditiveCounterexample{
                        to_quads(*witnesses[r]), to_quads(path), ev};
                    return true;
                }
            }
        }
        if (depth == opt.max_len_second) return false;
        for (int k = 0; k < static_cast<int>(letters.size()); ++k) {
            res.steps += states.size();
            if (res.steps > opt.budget.max_steps) {
                exhausted = true;
                return false;
            }
            std::span<const Arrival> one(&letters[k], 1);
            std::vector<BufferDetail> next;
            next.reserve(states.size());
            for (const auto& b : states) next.push_back(advance(st, policy, b, one));
            path.push_back(k);
            bool found = second_piece(next, depth + 1);
            path.pop_back();
            if (found || exhausted) return found;
        }
        return false;
    };

    if (!exhausted) {
        std::vector<BufferDetail> start(keys.size() + 1);
        for (std::size_t r = 0; r < keys.size(); ++r) start[r + 1] = *keys[r];
        path.clear();
        second_piece(start, 0);
    }

    if (res.counterexample)
        res.status = CheckStatus::violated;
    else if (exhausted)
        res.status = CheckStatus::budget_exhausted;
    return res;
}

std::vector<ClassDetail> enumerate_details(const MatchingStructure& st, int max_count)
{
    int n = st.customers(), m = st.servers();
    std::vector<int> digits(n + m, 0);
    std::vector<ClassDetail> out;
    while (true) {
        ClassDetail d{{digits.begin(), digits.begin() + n}, {digits.begin() + n, digits.end()}};
        if (is_admissible_detail(st, d)) out.push_back(std::move(d));
        int k = 0;
        while (k < n + m && digits[k] == max_count) digits[k++] = 0;
        if (k == n + m) break;
        ++digits[k];
    }
    return out;
}

NonexpansiveResult check_nonexpansive(const MatchingStructure& st, const Policy& policy,
                                      int max_count, const Budget& budget)
{
    if (!policy.class_admissible())
        throw Error(ErrorCode::not_class_admissible,
                    "non-expansiveness is defined on class details");
    ArrivalAlphabet alpha(st, policy);
    auto details = enumerate_details(st, max_count);
    NonexpansiveResult res;
    std::vector<ClassDetail> next(details.size());
    for (const Arrival& a : alpha.choices()) {
        for (std::size_t i = 0; i < details.size(); ++i) next[i] = step_class(st, policy, details[i], a);
        for (std::size_t i = 0; i < details.size(); ++i) {
            for (std::size_t j = i + 1; j < details.size(); ++j) {
                if (++res.pairs > budget.max_steps) {
                    res.status = CheckStatus::budget_exhausted;
                    return res;
                }
                int before = l1_distance(details[i], details[j]);
                int after = l1_distance(next[i], next[j]);
                if (after > before) {
                    res.status = CheckStatus::violated;
                    res.counterexample = NonexpansiveCounterexample{
                        details[i], details[j], alpha.quadruple(a), next[i], next[j], before, after};
                    return res;
                }
            }
        }
    }
    return res;
}

std::optional<ConsistencyViolation> find_consistency_violation(const MatchingStructure& st,
                                                               const Policy& policy,
                                                               int max_count)
{
    PermutationTable perms = PermutationTable::build(st);
    auto scan = [&](Side side) -> std::optional<ConsistencyViolation> {
        int entering_classes = side == Side::customer ? st.customers() : st.servers();
        int alphabet = side == Side::customer ? st.servers() : st.customers();
        for (int e = 1; e <= entering_classes; ++e) {
            const auto& nbrs = side == Side::customer ? st.server_list(e) : st.customer_list(e);
            std::vector<std::vector<int>> orders;
            if (policy.fixed_preferences() && !policy.profile.empty())
                orders.push_back(side == Side::customer ? policy.profile.sigma[e - 1]
                                                        : policy.profile.gamma[e - 1]);
            else
                orders = side == Side::customer ? perms.sigma[e - 1] : perms.gamma[e - 1];
            // all queue-length vectors supported on the neighbor set
            std::vector<std::vector<int>> vectors;
            std::vector<int> digits(nbrs.size(), 0);
            while (true) {
                std::vector<int> counts(alphabet, 0);
                for (std::size_t k = 0; k < nbrs.size(); ++k) counts[nbrs[k] - 1] = digits[k];
                vectors.push_back(std::move(counts));
                std::size_t k = 0;
                while (k < digits.size() && digits[k] == max_count) digits[k++] = 0;
                if (k == digits.size()) break;
                ++digits[k];
            }
            for (const auto& order : orders) {
                for (const auto& u : vectors) {
                    int pu = select_match(st, policy, u, side, e, order);
                    if (!pu) continue;
                    for (const auto& v : vectors) {
                        int pv = select_match(st, policy, v, side, e, order);
                        if (!pv || pu == pv) continue;
                        if (u[pv - 1] > 0 && v[pu - 1] > 0)
                            return ConsistencyViolation{side, e, order, u, v, pu, pv};
                    }
                }
            }
        }
        return std::nullopt;
    };
    if (auto v = scan(Side::customer)) return v;
    return scan(Side::server);
}

std::string format_arrivals(const std::vector<ArrivalQuadruple>& input)
{
    Word c, s;
    for (const auto& q : input) {
        if (q.c) c.push_back(q.c);
        if (q.s) s.push_back(q.s);
    }
    return "(" + format_customers(c) + ", " + format_servers(s) + ")";
}

}  // namespace ebm
