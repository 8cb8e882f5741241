#pragma once

#include <algorithm>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "ebm/model.hpp"
#include "ebm/rational.hpp"

namespace fixtures {

// Random spanning tree over C u S plus extra edges: connected by construction.
inline std::vector<ebm::Edge> random_connected_bipartite(int n, int m, double extra, std::mt19937_64& rng)
{
    std::set<ebm::Edge> edges;
    std::vector<int> order;  // vertices: customers 0..n-1, servers n..n+m-1
    for (int v = 0; v < n + m; ++v) order.push_back(v);
    std::shuffle(order.begin(), order.end(), rng);
    // attach each vertex to an earlier vertex on the other side
    std::vector<int> seen_c, seen_s;
    auto is_c = [&](int v) { return v < n; };
    // make sure the first two vertices are on opposite sides
    auto other = std::find_if(order.begin(), order.end(), [&](int v) { return is_c(v) != is_c(order[0]); });
    std::iter_swap(order.begin() + 1, other);
    for (int v : order) {
        auto& pool = is_c(v) ? seen_s : seen_c;
        if (!pool.empty()) {
            std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
            int u = pool[pick(rng)];
            edges.insert(is_c(v) ? ebm::Edge{v + 1, u - n + 1} : ebm::Edge{u + 1, v - n + 1});
        }
        (is_c(v) ? seen_c : seen_s).push_back(v);
    }
    std::bernoulli_distribution coin(extra);
    for (int c = 1; c <= n; ++c)
        for (int s = 1; s <= m; ++s)
            if (coin(rng)) edges.insert({c, s});
    return {edges.begin(), edges.end()};
}

inline std::vector<std::pair<int, int>> random_connected_graph(int n, double extra, std::mt19937_64& rng)
{
    std::set<std::pair<int, int>> edges;
    for (int v = 2; v <= n; ++v) {
        std::uniform_int_distribution<int> pick(1, v - 1);
        edges.insert({pick(rng), v});
    }
    std::bernoulli_distribution coin(extra);
    for (int u = 1; u <= n; ++u)
        for (int v = u + 1; v <= n; ++v)
            if (coin(rng)) edges.insert({u, v});
    return {edges.begin(), edges.end()};
}

// Full-support rational weights with denominators at most 30 * cells, summing to 1.
inline std::vector<std::pair<ebm::Edge, ebm::Rational>> random_mu(const std::vector<ebm::Edge>& support,
                                                                  std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> w(1, 30);
    std::vector<int> raw;
    int total = 0;
    for (std::size_t k = 0; k < support.size(); ++k) {
        raw.push_back(w(rng));
        total += raw.back();
    }
    std::vector<std::pair<ebm::Edge, ebm::Rational>> out;
    for (std::size_t k = 0; k < support.size(); ++k) out.emplace_back(support[k], ebm::Rational(raw[k], total));
    return out;
}

}  // namespace fixtures
