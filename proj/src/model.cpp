#include "ebm/model.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <sstream>

#include "ebm/error.hpp"

namespace ebm {

int popcount(Mask m) { return std::popcount(m); }

std::vector<int> members(Mask m)
{
    std::vector<int> out;
    while (m) {
        out.push_back(std::countr_zero(m) + 1);
        m &= m - 1;
    }
    return out;
}

namespace {

std::vector<Edge> normalize(std::vector<Edge> edges, int customers, int servers, const char* what)
{
    for (const auto& [c, s] : edges) {
        if (c < 1 || c > customers || s < 1 || s > servers) {
            std::ostringstream os;
            os << what << " edge (" << c << "," << s << ") outside " << customers << "x" << servers;
            throw Error(ErrorCode::out_of_range_edge, os.str());
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

// union-find over customers then servers
struct Components {
    std::vector<int> parent;
    explicit Components(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int v)
    {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    }
    void join(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

MatchingStructure MatchingStructure::build(int customers, int servers, std::vector<Edge> matching,
                                           std::vector<Edge> arrival)
{
    return assemble(customers, servers, std::move(matching), std::move(arrival), true);
}

MatchingStructure MatchingStructure::assemble(int customers, int servers, std::vector<Edge> matching,
                                              std::vector<Edge> arrival, bool check_connected)
{
    if (customers < 1 || servers < 1)
        throw Error(ErrorCode::validation_error, "both class sets must be non-empty");
    if (customers > max_classes_per_side || servers > max_classes_per_side)
        throw Error(ErrorCode::too_large, "at most 63 classes per side are supported");

    MatchingStructure st;
    st.n_customers_ = customers;
    st.n_servers_ = servers;
    st.e_ = normalize(std::move(matching), customers, servers, "matching");
    st.f_ = normalize(std::move(arrival), customers, servers, "arrival");
    if (st.e_.empty()) throw Error(ErrorCode::validation_error, "E must be non-empty");
    if (st.f_.empty()) throw Error(ErrorCode::validation_error, "F must be non-empty");

    st.e_by_customer_.assign(customers, 0);
    st.e_by_server_.assign(servers, 0);
    st.f_by_customer_.assign(customers, 0);
    Mask f_servers = 0;
    for (auto [c, s] : st.e_) {
        st.e_by_customer_[c - 1] |= bit(s);
        st.e_by_server_[s - 1] |= bit(c);
    }
    for (auto [c, s] : st.f_) {
        st.f_by_customer_[c - 1] |= bit(s);
        f_servers |= bit(s);
    }
    for (int c = 1; c <= customers; ++c) {
        if (st.f_by_customer_[c - 1] == 0)
            throw Error(ErrorCode::isolated_arrival_vertex,
                        "customer class " + format_customer(c) + " has no arrival edge");
    }
    for (int s = 1; s <= servers; ++s) {
        if (!has(f_servers, s))
            throw Error(ErrorCode::isolated_arrival_vertex,
                        "server class " + format_server(s) + " has no arrival edge");
    }

    if (check_connected) {
        Components comp(customers + servers);
        for (auto [c, s] : st.e_) comp.join(c - 1, customers + s - 1);
        int root = comp.find(0);
        for (int v = 1; v < customers + servers; ++v) {
            if (comp.find(v) != root) {
                std::string name =
                    v < customers ? format_customer(v + 1) : format_server(v - customers + 1);
                throw Error(ErrorCode::disconnected_matching_graph,
                            "matching graph does not reach class " + name);
            }
        }
    }

    st.s_lists_.resize(customers);
    st.c_lists_.resize(servers);
    for (int c = 1; c <= customers; ++c) st.s_lists_[c - 1] = members(st.e_by_customer_[c - 1]);
    for (int s = 1; s <= servers; ++s) st.c_lists_[s - 1] = members(st.e_by_server_[s - 1]);
    return st;
}

Mask MatchingStructure::server_nbrs_of(Mask cs) const
{
    Mask out = 0;
    for (int c : members(cs)) out |= e_by_customer_[c - 1];
    return out;
}

Mask MatchingStructure::customer_nbrs_of(Mask ss) const
{
    Mask out = 0;
    for (int s : members(ss)) out |= e_by_server_[s - 1];
    return out;
}

MatchingStructure make_gm_structure(int n, const std::vector<std::pair<int, int>>& reduced_edges)
{
    if (n < 1) throw Error(ErrorCode::validation_error, "GM reduced graph needs a node");
    Components comp(n);
    std::vector<Edge> e, f;
    for (auto [u, v] : reduced_edges) {
        if (u < 1 || u > n || v < 1 || v > n || u == v)
            throw Error(ErrorCode::out_of_range_edge, "bad reduced-graph edge");
        comp.join(u - 1, v - 1);
        e.emplace_back(u, v);
        e.emplace_back(v, u);
    }
    for (int v = 1; v < n; ++v) {
        if (comp.find(v) != comp.find(0))
            throw Error(ErrorCode::disconnected_matching_graph, "reduced graph is not connected");
    }
    for (int c = 1; c <= n; ++c) f.emplace_back(c, c);
    if (e.empty()) throw Error(ErrorCode::validation_error, "reduced graph has no edge");
    // The double cover of a bipartite reduced graph is disconnected, so the connectivity
    // requirement moves to the reduced graph here.
    return MatchingStructure::assemble(n, n, std::move(e), std::move(f), false);
}

Digraph associated_digraph(const MatchingStructure& st)
{
    Digraph g;
    int n = st.customers();
    g.vertex_count = n + st.servers();
    for (auto [c, s] : st.matching_edges()) g.arcs.emplace_back(c - 1, n + s - 1);
    for (auto [c, s] : st.arrival_edges()) g.arcs.emplace_back(n + s - 1, c - 1);
    return g;
}

bool is_strongly_connected(const Digraph& g)
{
    if (g.vertex_count <= 1) return true;
    std::vector<std::vector<int>> fwd(g.vertex_count), bwd(g.vertex_count);
    for (auto [u, v] : g.arcs) {
        fwd[u].push_back(v);
        bwd[v].push_back(u);
    }
    auto reaches_all = [&](const std::vector<std::vector<int>>& adj) {
        std::vector<char> seen(g.vertex_count, 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        int count = 1;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int v : adj[u]) {
                if (!seen[v]) {
                    seen[v] = 1;
                    ++count;
                    stack.push_back(v);
                }
            }
        }
        return count == g.vertex_count;
    };
    // Strongly connected iff vertex 0 reaches everything in both orientations.
    return reaches_all(fwd) && reaches_all(bwd);
}

IndependentSet make_independent_set(const MatchingStructure& st, Mask a, Mask b)
{
    IndependentSet is;
    is.a = a;
    is.b = b;
    is.c_circ = st.all_customers() & ~(a | st.customer_nbrs_of(b));
    is.s_circ = st.all_servers() & ~(b | st.server_nbrs_of(a));
    return is;
}

std::vector<IndependentSet> enumerate_independent_sets(const MatchingStructure& st, int cap)
{
    if (st.customers() + st.servers() > cap)
        throw Error(ErrorCode::too_large, "independent-set enumeration is capped at " +
                                              std::to_string(cap) + " classes");
    std::vector<IndependentSet> out;
    Mask all_c = st.all_customers();
    for (Mask a = 0;; a = (a - all_c) & all_c) {
        // B ranges over subsets of the servers left unreachable from A
        Mask free = st.all_servers() & ~st.server_nbrs_of(a);
        for (Mask b = 0;; b = (b - free) & free) {
            if (a | b) out.push_back(make_independent_set(st, a, b));
            if (b == free) break;
        }
        if (a == all_c) break;
    }
    return out;
}

std::optional<BiSeparablePartition> check_bi_separable(const MatchingStructure& st,
                                                       std::string* why)
{
    auto fail = [&](std::string reason) -> std::optional<BiSeparablePartition> {
        if (why) *why = std::move(reason);
        return std::nullopt;
    };
    int n = st.customers(), m = st.servers();
    Components comp(n + m);
    for (int c = 1; c <= n; ++c)
        for (int s = 1; s <= m; ++s)
            if (!st.in_e(c, s)) comp.join(c - 1, n + s - 1);

    std::vector<int> order;
    std::vector<std::pair<Mask, Mask>> groups;
    std::vector<int> slot(n + m, -1);
    for (int v = 0; v < n + m; ++v) {
        int r = comp.find(v);
        if (slot[r] < 0) {
            slot[r] = static_cast<int>(groups.size());
            groups.emplace_back(0, 0);
        }
        auto& g = groups[slot[r]];
        if (v < n)
            g.first |= bit(v + 1);
        else
            g.second |= bit(v - n + 1);
    }
    if (groups.size() < 2) return fail("complement graph has a single component");

    BiSeparablePartition part;
    for (auto [a, b] : groups) {
        IndependentSet is = make_independent_set(st, a, b);
        std::string label = "{" + format_mask(a, false) + (a && b ? "," : "") +
                            format_mask(b, true) + "}";
        if (is.two_sided() && (st.server_nbrs_of(a) & b))
            return fail("component " + label + " contains a matching edge");
        if (!is.maximal() && is.two_sided())
            return fail("component " + label + " is two-sided but not maximal");
        if (is.maximal()) {
            for (int c : members(a))
                if (st.server_nbrs(c) != (st.all_servers() & ~b))
                    return fail("neighbor identity fails for customer " + format_customer(c));
            for (int s : members(b))
                if (st.customer_nbrs(s) != (st.all_customers() & ~a))
                    return fail("neighbor identity fails for server " + format_server(s));
        }
        part.parts.push_back(is);
    }
    return part;
}

const char* to_string(ModelKind k)
{
    switch (k) {
    case ModelKind::bm: return "BM";
    case ModelKind::gm: return "GM";
    case ModelKind::ebm: return "EBM";
    }
    return "?";
}

ModelKind detect_model_kind(const MatchingStructure& st)
{
    int n = st.customers(), m = st.servers();
    if (static_cast<int>(st.arrival_edges().size()) == n * m) return ModelKind::bm;
    if (n != m || static_cast<int>(st.arrival_edges().size()) != n) return ModelKind::ebm;
    // F must itself be the bijection c -> c~, so no search over bijections is needed.
    std::vector<int> tilde(n + 1, 0), inverse(m + 1, 0);
    for (auto [c, s] : st.arrival_edges()) {
        if (tilde[c] || inverse[s]) return ModelKind::ebm;
        tilde[c] = s;
        inverse[s] = c;
    }
    for (auto [c, s] : st.matching_edges()) {
        int d = inverse[s];
        if (d == c) return ModelKind::ebm;  // the reduced graph has no loops
        if (!st.in_e(d, tilde[c])) return ModelKind::ebm;
    }
    return ModelKind::gm;
}

std::string format_customer(int c) { return std::to_string(c); }
std::string format_server(int s) { return "s" + std::to_string(s); }

std::string format_mask(Mask m, bool servers)
{
    std::string out;
    for (int k : members(m)) {
        if (!out.empty()) out += ",";
        out += servers ? format_server(k) : format_customer(k);
    }
    return out;
}

}  // namespace ebm
