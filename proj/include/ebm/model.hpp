#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ebm {

/// Subsets of a class alphabet; bit k stands for class k+1.
using Mask = std::uint64_t;
using Edge = std::pair<int, int>;  // (customer class, server class), both 1-based

inline constexpr int max_classes_per_side = 63;

inline Mask bit(int cls) { return Mask{1} << (cls - 1); }
inline bool has(Mask m, int cls) { return (m >> (cls - 1)) & 1U; }
inline Mask full_mask(int n) { return n >= 64 ? ~Mask{0} : (Mask{1} << n) - 1; }
int popcount(Mask m);
std::vector<int> members(Mask m);

/// The quadruple (C, S, E, F): classes, matching edges and arrival edges.
class MatchingStructure {
public:
    static MatchingStructure build(int customers, int servers, std::vector<Edge> matching,
                                   std::vector<Edge> arrival);

    int customers() const { return n_customers_; }
    int servers() const { return n_servers_; }

    bool in_e(int c, int s) const { return has(e_by_customer_[c - 1], s); }
    bool in_f(int c, int s) const { return has(f_by_customer_[c - 1], s); }

    // S(c) and C(s)
    Mask server_nbrs(int c) const { return e_by_customer_[c - 1]; }
    Mask customer_nbrs(int s) const { return e_by_server_[s - 1]; }
    // S(A) and C(B)
    Mask server_nbrs_of(Mask customers) const;
    Mask customer_nbrs_of(Mask servers) const;

    const std::vector<int>& server_list(int c) const { return s_lists_[c - 1]; }
    const std::vector<int>& customer_list(int s) const { return c_lists_[s - 1]; }

    const std::vector<Edge>& matching_edges() const { return e_; }
    const std::vector<Edge>& arrival_edges() const { return f_; }

    Mask all_customers() const { return full_mask(n_customers_); }
    Mask all_servers() const { return full_mask(n_servers_); }

    bool operator==(const MatchingStructure& o) const
    {
        return n_customers_ == o.n_customers_ && n_servers_ == o.n_servers_ && e_ == o.e_ &&
               f_ == o.f_;
    }

private:
    friend MatchingStructure make_gm_structure(int, const std::vector<std::pair<int, int>>&);
    static MatchingStructure assemble(int customers, int servers, std::vector<Edge> matching,
                                      std::vector<Edge> arrival, bool check_connected);

    int n_customers_ = 0;
    int n_servers_ = 0;
    std::vector<Edge> e_, f_;
    std::vector<Mask> e_by_customer_, e_by_server_, f_by_customer_;
    std::vector<std::vector<int>> s_lists_, c_lists_;
};

/// GM model built from a reduced graph R on n nodes: S = {1~..n~}, F pairs c with c~,
/// and E is the bipartite double cover of R.
MatchingStructure make_gm_structure(int n, const std::vector<std::pair<int, int>>& reduced_edges);

/// Vertices 0..customers-1 stand for customer classes, then servers follow.
struct Digraph {
    int vertex_count = 0;
    std::vector<std::pair<int, int>> arcs;
};

Digraph associated_digraph(const MatchingStructure& st);
bool is_strongly_connected(const Digraph& g);

struct IndependentSet {
    Mask a = 0;  // customer classes
    Mask b = 0;  // server classes
    Mask c_circ = 0;
    Mask s_circ = 0;

    bool maximal() const { return c_circ == 0 && s_circ == 0; }
    bool two_sided() const { return a != 0 && b != 0; }
    bool operator==(const IndependentSet&) const = default;
};

IndependentSet make_independent_set(const MatchingStructure& st, Mask a, Mask b);

inline constexpr int default_enumeration_cap = 20;

std::vector<IndependentSet> enumerate_independent_sets(const MatchingStructure& st,
                                                       int cap = default_enumeration_cap);

struct BiSeparablePartition {
    std::vector<IndependentSet> parts;
    int order() const { return static_cast<int>(parts.size()); }
};

/// Complement-component test with explicit re-verification of every defining condition.
/// When `why` is given and the answer is none, it names the failed condition.
std::optional<BiSeparablePartition> check_bi_separable(const MatchingStructure& st,
                                                       std::string* why = nullptr);

enum class ModelKind { bm, gm, ebm };

const char* to_string(ModelKind k);
ModelKind detect_model_kind(const MatchingStructure& st);

std::string format_customer(int c);
std::string format_server(int s);
std::string format_mask(Mask m, bool servers);

}  // namespace ebm
