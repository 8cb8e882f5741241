#include "ebm/erasing.hpp"

#include <map>
#include <queue>
#include <set>
#include <tuple>

#include "ebm/error.hpp"

namespace ebm {

namespace {

void require_admissible_input(const MatchingStructure& st, const Word& c, const Word& s)
{
    if (c.size() != s.size())
        throw Error(ErrorCode::not_admissible_input, "couple words must have equal lengths");
    for (std::size_t k = 0; k < c.size(); ++k) {
        if (c[k] < 1 || c[k] > st.customers() || s[k] < 1 || s[k] > st.servers() ||
            !st.in_f(c[k], s[k]))
            throw Error(ErrorCode::not_admissible_input,
                        "arrival " + std::to_string(k + 1) + " (" + format_customer(c[k]) + "," +
                            format_server(s[k]) + ") is not in F");
    }
}

bool admissible_input(const MatchingStructure& st, const Word& c, const Word& s)
{
    if (c.size() != s.size()) return false;
    for (std::size_t k = 0; k < c.size(); ++k)
        if (!st.in_f(c[k], s[k])) return false;
    return true;
}

// Runs (c,s) from position `from` onward out of `start`, over every preference word at once;
// true iff every reachable final buffer is empty.
bool always_empties(const MatchingStructure& st, const Policy& policy, const ArrivalAlphabet& alpha,
                    const BufferDetail& start, const Word& c, const Word& s, std::size_t from)
{
    std::set<BufferDetail> cur{start};
    for (std::size_t k = from; k < c.size(); ++k) {
        auto variants = alpha.variants(c[k], s[k]);
        std::set<BufferDetail> next;
        for (const auto& b : cur)
            for (const Arrival& a : variants)
                next.insert(advance(st, policy, b, std::span<const Arrival>(&a, 1)));
        cur = std::move(next);
    }
    for (const auto& b : cur)
        if (!b.empty()) return false;
    return true;
}

bool strong_with(const MatchingStructure& st, const Policy& policy, const ArrivalAlphabet& alpha,
                 const Word& c, const Word& s, bool check_suffixes)
{
    if (c.empty()) return false;
    if (check_suffixes) {
        for (std::size_t k = 0; k < c.size(); ++k)
            if (!always_empties(st, policy, alpha, {}, c, s, k)) return false;
    }
    for (int i = 1; i <= st.customers(); ++i)
        for (int j = 1; j <= st.servers(); ++j)
            if (!st.in_e(i, j) && !always_empties(st, policy, alpha, {{i}, {j}}, c, s, 0))
                return false;
    return true;
}

using Path = std::vector<std::pair<int, int>>;  // (i_l, j_l)

// Shortest alternating path i1-j1-i2-...-iq-jq inside C^ u S^ that covers both sets and has
// every (i_l, j_l) in F.
std::optional<Path> spanning_path(const MatchingStructure& st, Mask cc, Mask ss, int start)
{
    using State = std::tuple<int, Mask, Mask>;  // last server, visited customers, visited servers
    std::map<State, std::pair<State, std::pair<int, int>>> parent;
    std::queue<State> q;
    const State root{0, 0, 0};
    for (int j : members(st.server_nbrs(start) & ss)) {
        if (!st.in_f(start, j)) continue;
        State s0{j, bit(start), bit(j)};
        if (parent.emplace(s0, std::make_pair(root, std::make_pair(start, j))).second) q.push(s0);
    }
    while (!q.empty()) {
        State cur = q.front();
        q.pop();
        auto [j, mc, ms] = cur;
        if (mc == cc && ms == ss) {
            Path path;
            for (State s = cur; s != root; s = parent.at(s).first) path.push_back(parent.at(s).second);
            std::reverse(path.begin(), path.end());
            return path;
        }
        for (int i : members(st.customer_nbrs(j) & cc)) {
            for (int jn : members(st.server_nbrs(i) & ss)) {
                if (!st.in_f(i, jn)) continue;
                State nxt{jn, mc | bit(i), ms | bit(jn)};
                if (parent.emplace(nxt, std::make_pair(cur, std::make_pair(i, jn))).second)
                    q.push(nxt);
            }
        }
    }
    return std::nullopt;
}

struct Candidate {
    Word c, s;
    std::string label;
};

std::vector<Candidate> path_candidates(const MatchingStructure& st, Mask cc, Mask ss, const Path& p)
{
    std::vector<Candidate> out;
    std::size_t q = p.size();
    Word ci, sj;
    for (auto [i, j] : p) {
        ci.push_back(i);
        sj.push_back(j);
    }
    bool complete = (st.server_nbrs_of(cc) & ss) == ss;
    for (int i : members(cc))
        if ((st.server_nbrs(i) & ss) != ss) complete = false;
    out.push_back({ci, sj, complete ? "alternating path, complete induced subgraph"
                                    : "alternating path"});
    if (q >= 2) {
        bool shifted_in_f = true;
        for (std::size_t l = 1; l < q; ++l)
            if (!st.in_f(ci[l], sj[l - 1])) shifted_in_f = false;
        if (shifted_in_f) {
            Word c2 = ci, s2 = sj;
            c2.insert(c2.end(), ci.begin() + 1, ci.end());
            s2.insert(s2.end(), sj.begin(), sj.end() - 1);
            bool last_only = (st.customer_nbrs(sj.back()) & cc) == bit(ci.back());
            bool first_only = (st.server_nbrs(ci.front()) & ss) == bit(sj.front());
            std::string label = last_only    ? "doubled path, last server closes the path"
                                : first_only ? "doubled path, first customer opens the path"
                                             : "doubled path";
            out.push_back({c2, s2, label});
        }
    }
    return out;
}

std::optional<ErasingCouple> accept(const MatchingStructure& st, const Policy& policy,
                                    const ArrivalAlphabet& alpha, const Candidate& cand,
                                    std::set<std::pair<Word, Word>>& tried)
{
    if (!admissible_input(st, cand.c, cand.s)) return std::nullopt;
    if (!tried.emplace(cand.c, cand.s).second) return std::nullopt;
    if (!strong_with(st, policy, alpha, cand.c, cand.s, true)) return std::nullopt;
    return ErasingCouple{cand.c, cand.s, CoupleStrength::strong, std::nullopt, cand.label, {}};
}

}  // namespace

bool verify_erasing_couple(const MatchingStructure& st, const Policy& policy,
                           const BufferDetail& target, const Word& c, const Word& s)
{
    require_admissible_input(st, c, s);
    if (target.w.size() != target.z.size())
        throw Error(ErrorCode::validation_error, "erasing targets need |w| = |z|");
    validate_buffer(st, target.w, target.z);
    ArrivalAlphabet alpha(st, policy);
    // The prefix (w,z) never triggers a choice: it only rebuilds the buffer.
    return always_empties(st, policy, alpha, {}, c, s, 0) &&
           always_empties(st, policy, alpha, target, c, s, 0);
}

bool verify_strong_erasing_couple(const MatchingStructure& st, const Policy& policy, const Word& c,
                                  const Word& s)
{
    require_admissible_input(st, c, s);
    ArrivalAlphabet alpha(st, policy);
    return strong_with(st, policy, alpha, c, s, true);
}

std::optional<ErasingCouple> construct_strong_erasing_couple(const MatchingStructure& st,
                                                             const Policy& policy,
                                                             const StrongSearchOptions& opt)
{
    ArrivalAlphabet alpha(st, policy);
    std::set<std::pair<Word, Word>> tried;

    if (opt.use_paths && st.customers() <= 10 && st.servers() <= 10) {
        Mask all_c = st.all_customers(), all_s = st.all_servers();
        for (Mask cc = 1; cc <= all_c; ++cc) {
            if (st.server_nbrs_of(cc) != all_s) continue;
            for (Mask ss = 1; ss <= all_s; ++ss) {
                if (st.customer_nbrs_of(ss) != all_c) continue;
                for (int start : members(cc)) {
                    auto path = spanning_path(st, cc, ss, start);
                    if (!path) continue;
                    for (const auto& cand : path_candidates(st, cc, ss, *path))
                        if (auto got = accept(st, policy, alpha, cand, tried)) return got;
                }
            }
        }
    }

    if (opt.use_bi_separable) {
        if (auto part = check_bi_separable(st)) {
            std::vector<IndependentSet> maxi;
            for (const auto& p : part->parts)
                if (p.maximal() && p.two_sided()) maxi.push_back(p);
            for (std::size_t a = 0; a < maxi.size(); ++a)
                for (std::size_t b = 0; b < maxi.size(); ++b)
                    for (std::size_t d = 0; d < maxi.size(); ++d) {
                        if (a == b || b == d || a == d) continue;
                        for (int k1 : members(maxi[a].a))
                            for (int l1 : members(maxi[a].b))
                                for (int k2 : members(maxi[b].a))
                                    for (int l2 : members(maxi[b].b))
                                        for (int k3 : members(maxi[d].a))
                                            for (int l3 : members(maxi[d].b)) {
                                                if (!st.in_f(k1, l2) || !st.in_f(k2, l3) ||
                                                    !st.in_f(k3, l1))
                                                    continue;
                                                Candidate cand{{k1, k2, k3}, {l2, l3, l1},
                                                               "three maximal parts"};
                                                if (auto got = accept(st, policy, alpha, cand, tried))
                                                    return got;
                                            }
                    }
        }
    }

    if (opt.search_length > 0) {
        // Suffix-perfect couples are closed under taking suffixes, so they grow by prepending.
        std::vector<std::pair<Word, Word>> frontier{{{}, {}}};
        for (int len = 1; len <= opt.search_length && !frontier.empty(); ++len) {
            std::vector<std::pair<Word, Word>> next;
            for (const auto& [c, s] : frontier) {
                for (auto [i, j] : st.arrival_edges()) {
                    Word c2{i}, s2{j};
                    c2.insert(c2.end(), c.begin(), c.end());
                    s2.insert(s2.end(), s.begin(), s.end());
                    if (!always_empties(st, policy, alpha, {}, c2, s2, 0)) continue;
                    if (strong_with(st, policy, alpha, c2, s2, false))
                        return ErasingCouple{c2, s2, CoupleStrength::strong, std::nullopt,
                                             "suffix-closed search", {}};
                    if (next.size() < opt.search_frontier) next.emplace_back(c2, s2);
                }
            }
            frontier = std::move(next);
        }
    }
    return std::nullopt;
}

std::optional<ErasingCouple> path_couple(const MatchingStructure& st, int i, int j)
{
    if (st.in_e(i, j)) return std::nullopt;
    // BFS over servers j_l; each step picks i_l with (i_l, j_l) in E and F.
    std::map<int, std::pair<int, int>> parent;  // j_l -> (previous j, i_{l-1})
    std::queue<int> q;
    for (int j1 : st.server_list(i)) {
        parent.emplace(j1, std::make_pair(0, 0));
        q.push(j1);
    }
    while (!q.empty()) {
        int jl = q.front();
        q.pop();
        for (int il : st.customer_list(jl)) {
            if (!st.in_f(il, jl)) continue;
            if (st.in_e(il, j)) {
                Word c{il}, s{jl};
                for (int cur = jl; parent.at(cur).first != 0; cur = parent.at(cur).first) {
                    c.insert(c.begin(), parent.at(cur).second);
                    s.insert(s.begin(), parent.at(cur).first);
                }
                return ErasingCouple{c, s, CoupleStrength::erasing, BufferDetail{{i}, {j}},
                                     "alternating path between the pair", {}};
            }
            for (int jn : st.server_list(il)) {
                if (parent.count(jn)) continue;
                parent.emplace(jn, std::make_pair(jl, il));
                q.push(jn);
            }
        }
    }
    return std::nullopt;
}

ErasingCouple construct_erasing_couple(const MatchingStructure& st, const Policy& policy,
                                       const BufferDetail& target, const ErasingSearchOptions& opt)
{
    if (target.w.size() != target.z.size())
        throw Error(ErrorCode::validation_error, "erasing targets need |w| = |z|");
    validate_buffer(st, target.w, target.z);
    ErasingCouple out;
    out.target = target;
    if (target.empty()) {
        out.construction = "empty couple";
        return out;
    }

    std::optional<std::optional<ErasingCouple>> strong;  // computed on first use
    auto get_strong = [&]() -> const std::optional<ErasingCouple>& {
        if (!strong) strong = construct_strong_erasing_couple(st, policy, opt.strong);
        return *strong;
    };

    auto single = [&](int i, int j) -> std::optional<ErasingCouple> {
        BufferDetail one{{i}, {j}};
        if (auto pc = path_couple(st, i, j); pc && verify_erasing_couple(st, policy, one, pc->c, pc->s))
            return pc;
        if (const auto& sc = get_strong()) return sc;
        // bounded breadth-first search over admissible inputs
        std::vector<std::pair<Word, Word>> level{{{}, {}}};
        for (int d = 1; d <= opt.search_depth; ++d) {
            std::vector<std::pair<Word, Word>> next;
            for (const auto& [c, s] : level)
                for (auto [a, b] : st.arrival_edges()) {
                    Word c2 = c, s2 = s;
                    c2.push_back(a);
                    s2.push_back(b);
                    if (verify_erasing_couple(st, policy, one, c2, s2))
                        return ErasingCouple{c2, s2, CoupleStrength::erasing, one,
                                             "breadth-first search", {}};
                    next.emplace_back(std::move(c2), std::move(s2));
                }
            level = std::move(next);
        }
        return std::nullopt;
    };

    BufferDetail residual = target;
    out.residuals.push_back(residual.w.size());
    std::vector<std::string> rules;
    while (!residual.empty()) {
        int i = residual.w.back(), j = residual.z.back();
        auto piece = single(i, j);
        if (!piece)
            throw Error(ErrorCode::search_exhausted,
                        "no erasing couple of (" + format_customer(i) + "," + format_server(j) +
                            ") within depth " + std::to_string(opt.search_depth));
        out.c.insert(out.c.end(), piece->c.begin(), piece->c.end());
        out.s.insert(out.s.end(), piece->s.begin(), piece->s.end());
        rules.push_back(piece->construction);
        auto arrivals = pair_arrivals(out.c, out.s);
        BufferDetail next = run(st, policy, target, std::span<const ArrivalQuadruple>(arrivals))
                                .final_buffer();
        out.residuals.push_back(next.w.size());
        if (next.w.size() >= residual.w.size())
            throw Error(ErrorCode::search_exhausted,
                        "residual did not shrink after appending a single-letter couple");
        residual = std::move(next);
    }

    if (!verify_erasing_couple(st, policy, target, out.c, out.s)) {
        // some preference draw escapes the construction; repeat a strong couple instead
        const auto& sc = get_strong();
        if (!sc)
            throw Error(ErrorCode::search_exhausted,
                        "constructed couple fails for some preference word");
        Word c, s;
        for (std::size_t k = 0; k < target.w.size(); ++k) {
            c.insert(c.end(), sc->c.begin(), sc->c.end());
            s.insert(s.end(), sc->s.begin(), sc->s.end());
            if (verify_erasing_couple(st, policy, target, c, s)) {
                out.c = c;
                out.s = s;
                out.construction = "repeated strong couple";
                return out;
            }
        }
        throw Error(ErrorCode::search_exhausted, "no validated erasing couple");
    }
    out.construction.clear();
    for (std::size_t k = 0; k < rules.size(); ++k)
        out.construction += (k ? " + " : "") + rules[k];
    return out;
}

}  // namespace ebm
