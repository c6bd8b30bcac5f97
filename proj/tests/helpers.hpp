#pragma once

#include "ttsis/ttsis.hpp"

#include <numeric>
#include <vector>

namespace ttsis::testing {

inline Network random_network(Rng& rng, int n, double p)
{
    Network g(n);
    for (std::size_t i = 0; i < g.n_pairs(); ++i)
        if (uniform01(rng) < p)
            g.toggle_pair(i);
    return g;
}

inline NetworkState random_state(Rng& rng, std::size_t n)
{
    NetworkState x(n);
    for (std::size_t i = 0; i < n; ++i)
        x.set(i, uniform01(rng) < 0.5);
    return x;
}

inline TTVector random_tt(Rng& rng, std::size_t n, Index rank)
{
    std::vector<TTCore> cores;
    for (std::size_t k = 0; k < n; ++k) {
        const Index left = k == 0 ? 1 : rank;
        const Index right = k + 1 == n ? 1 : rank;
        TTCore c(left, right);
        for (auto& v : c.data())
            v = 2.0 * uniform01(rng) - 1.0;
        cores.push_back(std::move(c));
    }
    return TTVector(std::move(cores));
}

inline bool is_connected(const Network& g)
{
    std::vector<int> parent(static_cast<std::size_t>(g.size()));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int a) {
        while (parent[static_cast<std::size_t>(a)] != a)
            a = parent[static_cast<std::size_t>(a)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
        return a;
    };
    for (auto [m, n] : g.edges())
        parent[static_cast<std::size_t>(find(m))] = find(n);
    int roots = 0;
    for (int i = 0; i < g.size(); ++i)
        roots += find(i) == i;
    return roots == 1;
}

inline Network two_triangles()
{
    Network g(6);
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    g.add_edge(0, 2);
    g.add_edge(3, 4);
    g.add_edge(4, 5);
    g.add_edge(3, 5);
    return g;
}

} // namespace ttsis::testing
