#pragma once

// Test fixtures and independent oracles. Nothing in here calls into the
// library code paths the oracles are meant to check.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "manetlab/registry.hpp"
#include "manetlab/topology.hpp"

namespace manetlab::testing {

inline NodeRecord node(const std::string& name, int i) {
    auto hex = [](int v) {
        const char* digits = "0123456789abcdef";
        return std::string{digits[(v >> 4) & 0xf], digits[v & 0xf]};
    };
    return NodeRecord::from_strings(
        name, "10.0." + std::to_string(i / 250) + "." + std::to_string(i % 250 + 1),
        "aa:00:00:00:" + hex(i >> 8) + ":" + hex(i),
        "192.168." + std::to_string(i / 250) + "." + std::to_string(i % 250 + 1),
        "bb:00:00:00:" + hex(i >> 8) + ":" + hex(i));
}

// sai, pritu, nitin: the three-node laboratory fixture.
inline Registry three_nodes() {
    Registry r;
    r.add_node(node("sai", 1));
    r.add_node(node("pritu", 2));
    r.add_node(node("nitin", 3));
    return r;
}

inline Registry numbered_nodes(std::size_t n) {
    Registry r;
    for (std::size_t i = 0; i < n; ++i) r.add_node(node("n" + std::to_string(i), static_cast<int>(i)));
    return r;
}

// Union-find connectivity over the upper triangle.
inline bool union_find_connected(const AdjacencyMatrix& m) {
    std::vector<std::size_t> parent(m.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::size_t components = m.size();
    for (std::size_t a = 0; a < m.size(); ++a) {
        for (std::size_t b = a + 1; b < m.size(); ++b) {
            if (m(a, b) == 0) continue;
            auto ra = find(a), rb = find(b);
            if (ra != rb) {
                parent[ra] = rb;
                --components;
            }
        }
    }
    return components <= 1;
}

// Transitive closure (Warshall); connected iff every pair is reachable.
inline bool path_search_connected(const AdjacencyMatrix& m) {
    const std::size_t n = m.size();
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
        reach[i][i] = true;
        for (std::size_t j = 0; j < n; ++j) reach[i][j] = reach[i][j] || m(i, j) != 0;
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (reach[i][k] && reach[k][j]) reach[i][j] = true;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (!reach[i][j]) return false;
    return true;
}

inline std::size_t oracle_max_degree(const AdjacencyMatrix& m) {
    std::size_t best = 0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        std::size_t d = 0;
        for (std::size_t j = 0; j < m.size(); ++j) d += m(i, j) != 0;
        best = std::max(best, d);
    }
    return best;
}

// Builds the matrix whose upper-triangle pairs (row-major) are the bits of mask.
inline AdjacencyMatrix matrix_from_mask(std::size_t n, std::uint64_t mask) {
    AdjacencyMatrix m(n);
    std::size_t bit = 0;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b, ++bit)
            if (mask & (std::uint64_t{1} << bit)) {
                m.set_cell(a, b, 1);
                m.set_cell(b, a, 1);
            }
    return m;
}

inline std::size_t pair_count(std::size_t n) { return n * (n - 1) / 2; }

// Brute-force loss window membership: walk the schedule one window at a time.
inline bool oracle_in_loss_window(std::int64_t t_rel, std::int64_t loss, std::int64_t normal,
                                  std::int64_t cycles) {
    std::int64_t window_start = 0;
    for (std::int64_t k = 0; k < cycles; ++k) {
        if (t_rel >= window_start && t_rel < window_start + loss) return true;
        window_start += loss + normal;
    }
    return false;
}

}  // namespace manetlab::testing
