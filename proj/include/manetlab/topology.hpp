#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace manetlab {

// Square n x n matrix of link flags. Cells hold raw bytes so that malformed
// input (non-Boolean values, asymmetry) can be represented and rejected by
// validate_matrix() rather than silently normalised.
class AdjacencyMatrix {
public:
    AdjacencyMatrix() = default;
    explicit AdjacencyMatrix(std::size_t n) : n_(n), cells_(n * n, 0) {}

    static AdjacencyMatrix from_rows(const std::vector<std::vector<int>>& rows);
    // Undirected edge list over n nodes.
    static AdjacencyMatrix from_edges(std::size_t n,
                                      std::span<const std::pair<std::size_t, std::size_t>> edges);

    std::size_t size() const noexcept { return n_; }
    std::uint8_t operator()(std::size_t row, std::size_t col) const { return cells_[row * n_ + col]; }
    bool linked(std::size_t a, std::size_t b) const { return (*this)(a, b) != 0; }

    void set_cell(std::size_t row, std::size_t col, std::uint8_t value) {
        cells_[row * n_ + col] = value;
    }
    void set_link(std::size_t a, std::size_t b, bool on) {
        set_cell(a, b, on ? 1 : 0);
        set_cell(b, a, on ? 1 : 0);
    }

    std::size_t degree(std::size_t row) const;
    std::size_t max_degree() const;
    // Unordered pairs (a < b) in row-major order.
    std::vector<std::pair<std::size_t, std::size_t>> edges() const;

    friend bool operator==(const AdjacencyMatrix&, const AdjacencyMatrix&) = default;

private:
    std::size_t n_ = 0;
    std::vector<std::uint8_t> cells_;
};

// Classification codes carried over from the testbed's original tooling.
enum class TopologyStatus : int { Rejected99 = 99, Accepted100 = 100 };

enum class RejectReason { None, OverConnected, Disconnected };

struct Topology {
    AdjacencyMatrix adjacency;
    std::optional<TopologyStatus> status;
    std::size_t seq = 0;
    // Operator-supplied rather than generated; allowed to be Rejected99.
    bool manual = false;

    friend bool operator==(const Topology&, const Topology&) = default;
};

struct GenParams {
    std::size_t n = 1;
    int density_pct = 50;
    int max_degree = 4;
    std::uint64_t seed = 0;
    std::uint64_t max_attempts = 10000;

    friend bool operator==(const GenParams&, const GenParams&) = default;
};

// Generator used for every random choice in topology generation.
using TopologyRng = std::mt19937_64;

// Throws Error(Infeasible) when the parameters are out of range or no
// connected graph can satisfy the degree bound.
void check_feasible(const GenParams& params);

// Throws Error(MalformedMatrix) on asymmetry, a non-zero diagonal or a
// non-Boolean cell.
void validate_matrix(const AdjacencyMatrix& m);

// One Bernoulli(density_pct/100) draw per unordered pair, pairs visited in
// row-major order. Each draw consumes exactly one 64-bit output of rng.
Topology sample_matrix(const GenParams& params, TopologyRng& rng);

struct Classification {
    TopologyStatus status;
    RejectReason reason;
};

// Degree check first, then breadth-first inclusion from node 0.
Classification classify_detailed(const AdjacencyMatrix& m, int max_degree);
TopologyStatus classify(const Topology& t, int max_degree);
bool is_connected(const AdjacencyMatrix& m);

struct Generated {
    Topology topology;
    std::uint64_t attempts = 0;
};

// Rejection sampling with a generator seeded from params.seed. The first
// Accepted100 sample wins.
Generated generate(const GenParams& params);

// Canonical undirected DOT rendering, see README for the exact layout.
std::string to_dot(const Topology& t, std::span<const std::string> names);
// Inverse of to_dot for canonical input. Unknown names and malformed lines
// raise ParseError.
AdjacencyMatrix parse_dot(std::string_view dot, std::span<const std::string> names);

}  // namespace manetlab
