#pragma once

#include <vector>

#include "ebm/loynes.hpp"
#include "ebm/model.hpp"
#include "ebm/state.hpp"

namespace fixtures {

using ebm::Edge;

inline const std::vector<Edge> nn_edges = {{1, 1}, {1, 2}, {2, 2}, {2, 3}, {3, 3}};

inline std::vector<Edge> complete(int n, int m)
{
    std::vector<Edge> out;
    for (int c = 1; c <= n; ++c)
        for (int s = 1; s <= m; ++s) out.emplace_back(c, s);
    return out;
}

// NN graph with every pair allowed to arrive.
inline ebm::MatchingStructure nn() { return ebm::MatchingStructure::build(3, 3, nn_edges, complete(3, 3)); }

// NN graph with the five arrival couples of the periodic example.
inline ebm::MatchingStructure nnbis()
{
    return ebm::MatchingStructure::build(3, 3, nn_edges, {{1, 2}, {2, 1}, {2, 3}, {3, 1}, {3, 2}});
}

inline ebm::MatchingStructure fig4_first()
{
    return ebm::MatchingStructure::build(3, 2, {{1, 2}, {2, 1}, {2, 2}, {3, 1}}, complete(3, 2));
}
inline ebm::MatchingStructure fig4_second()
{
    return ebm::MatchingStructure::build(3, 3, {{1, 3}, {1, 2}, {2, 3}, {2, 1}, {3, 2}, {3, 1}},
                                         complete(3, 3));
}
inline ebm::MatchingStructure fig4_third()
{
    return ebm::MatchingStructure::build(
        5, 4,
        {{1, 4}, {1, 3}, {2, 4}, {2, 3}, {3, 3}, {3, 2}, {3, 4}, {3, 1}, {4, 2}, {4, 1}, {5, 2}, {5, 1}},
        complete(5, 4));
}

// The period-9 sample; time 0 is the couple (1, s2).
inline ebm::PeriodicSample om()
{
    const std::vector<Edge> pairs = {{1, 2}, {2, 1}, {1, 2}, {2, 3}, {1, 2},
                                     {2, 3}, {2, 3}, {3, 1}, {3, 2}};
    ebm::PeriodicSample s;
    for (auto [c, v] : pairs) s.events.push_back({c, v, {}});
    return s;
}

inline ebm::BufferDetail bd(const char* w, const char* z)
{
    return {ebm::parse_customers(w), ebm::parse_servers(z)};
}

inline const ebm::Word fcfs_couple_c = {3, 3, 1, 2, 1, 2, 1, 2, 2};
inline const ebm::Word fcfs_couple_s = {1, 2, 2, 1, 2, 3, 2, 3, 3};

inline ebm::Word doubled(const ebm::Word& w)
{
    ebm::Word out = w;
    out.insert(out.end(), w.begin(), w.end());
    return out;
}

// Every admissible buffer detail with |w| = |z| <= r.
inline std::vector<ebm::BufferDetail> admissible_buffers(const ebm::MatchingStructure& st, int r)
{
    std::vector<ebm::BufferDetail> out;
    for (int len = 0; len <= r; ++len) {
        std::vector<ebm::Word> layer{{}};
        for (int k = 0; k < len; ++k) {
            std::vector<ebm::Word> next;
            for (const auto& w : layer)
                for (int c = 1; c <= st.customers(); ++c) {
                    auto v = w;
                    v.push_back(c);
                    next.push_back(std::move(v));
                }
            layer = std::move(next);
        }
        std::vector<ebm::Word> slayer{{}};
        for (int k = 0; k < len; ++k) {
            std::vector<ebm::Word> next;
            for (const auto& w : slayer)
                for (int s = 1; s <= st.servers(); ++s) {
                    auto v = w;
                    v.push_back(s);
                    next.push_back(std::move(v));
                }
            slayer = std::move(next);
        }
        for (const auto& w : layer)
            for (const auto& z : slayer)
                if (ebm::is_admissible_buffer(st, w, z)) out.push_back({w, z});
    }
    return out;
}

}  // namespace fixtures
