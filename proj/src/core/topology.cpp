#include "manetlab/topology.hpp"

#include <algorithm>
#include <deque>
#include <map>

#include "manetlab/error.hpp"
#include "text.hpp"

namespace manetlab {

AdjacencyMatrix AdjacencyMatrix::from_rows(const std::vector<std::vector<int>>& rows) {
    AdjacencyMatrix m(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != rows.size()) {
            throw Error(Errc::MalformedMatrix, "row " + std::to_string(r) + " has " +
                                                   std::to_string(rows[r].size()) +
                                                   " entries, expected " +
                                                   std::to_string(rows.size()));
        }
        for (std::size_t c = 0; c < rows.size(); ++c) {
            int v = rows[r][c];
            m.set_cell(r, c, static_cast<std::uint8_t>(v < 0 || v > 255 ? 255 : v));
        }
    }
    return m;
}

AdjacencyMatrix AdjacencyMatrix::from_edges(
    std::size_t n, std::span<const std::pair<std::size_t, std::size_t>> edges) {
    AdjacencyMatrix m(n);
    for (auto [a, b] : edges) m.set_link(a, b, true);
    return m;
}

std::size_t AdjacencyMatrix::degree(std::size_t row) const {
    std::size_t d = 0;
    for (std::size_t c = 0; c < n_; ++c) d += (*this)(row, c) != 0 ? 1 : 0;
    return d;
}

std::size_t AdjacencyMatrix::max_degree() const {
    std::size_t best = 0;
    for (std::size_t r = 0; r < n_; ++r) best = std::max(best, degree(r));
    return best;
}

std::vector<std::pair<std::size_t, std::size_t>> AdjacencyMatrix::edges() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t a = 0; a < n_; ++a) {
        for (std::size_t b = a + 1; b < n_; ++b) {
            if (linked(a, b)) out.emplace_back(a, b);
        }
    }
    return out;
}

void check_feasible(const GenParams& params) {
    auto fail = [](const std::string& why) { throw Error(Errc::Infeasible, why); };
    if (params.n < 1) fail("node count must be at least 1");
    if (params.density_pct < 0 || params.density_pct > 100) fail("density must be within 0..100");
    if (params.max_degree < 0) fail("maximum degree must be non-negative");
    if (params.max_attempts < 1) fail("max_attempts must be at least 1");
    if (params.n >= 2 && params.max_degree < 1) {
        fail("maximum degree 0 cannot connect " + std::to_string(params.n) + " nodes");
    }
    if (params.n > 2) {
        auto n = static_cast<std::uint64_t>(params.n);
        auto d = static_cast<std::uint64_t>(params.max_degree);
        if (n * d < 2 * (n - 1)) {
            fail("maximum degree " + std::to_string(d) + " cannot connect " + std::to_string(n) +
                 " nodes (" + std::to_string(n * d) + " < " + std::to_string(2 * (n - 1)) + ")");
        }
    }
}

void validate_matrix(const AdjacencyMatrix& m) {
    for (std::size_t r = 0; r < m.size(); ++r) {
        if (m(r, r) != 0) {
            throw Error(Errc::MalformedMatrix, "non-zero diagonal at " + std::to_string(r));
        }
        for (std::size_t c = 0; c < m.size(); ++c) {
            if (m(r, c) > 1) {
                throw Error(Errc::MalformedMatrix, "non-Boolean entry at (" + std::to_string(r) +
                                                       "," + std::to_string(c) + ")");
            }
            if (m(r, c) != m(c, r)) {
                throw Error(Errc::MalformedMatrix, "asymmetric entry at (" + std::to_string(r) +
                                                       "," + std::to_string(c) + ")");
            }
        }
    }
}

Topology sample_matrix(const GenParams& params, TopologyRng& rng) {
    Topology t{AdjacencyMatrix(params.n), std::nullopt, 0, false};
    const auto threshold = static_cast<std::uint64_t>(params.density_pct);
    for (std::size_t a = 0; a < params.n; ++a) {
        for (std::size_t b = a + 1; b < params.n; ++b) {
            // 2^64 mod 100 == 16, so the modulo bias is below 1e-17.
            if (rng() % 100 < threshold) t.adjacency.set_link(a, b, true);
        }
    }
    return t;
}

bool is_connected(const AdjacencyMatrix& m) {
    const std::size_t n = m.size();
    if (n <= 1) return true;
    std::vector<bool> seen(n, false);
    std::deque<std::size_t> frontier{0};
    seen[0] = true;
    std::size_t reached = 1;
    while (!frontier.empty()) {
        auto node = frontier.front();
        frontier.pop_front();
        for (std::size_t next = 0; next < n; ++next) {
            if (!seen[next] && m.linked(node, next)) {
                seen[next] = true;
                ++reached;
                frontier.push_back(next);
            }
        }
    }
    return reached == n;
}

Classification classify_detailed(const AdjacencyMatrix& m, int max_degree) {
    validate_matrix(m);
    for (std::size_t r = 0; r < m.size(); ++r) {
        if (static_cast<long long>(m.degree(r)) > max_degree) {
            return {TopologyStatus::Rejected99, RejectReason::OverConnected};
        }
    }
    if (!is_connected(m)) return {TopologyStatus::Rejected99, RejectReason::Disconnected};
    return {TopologyStatus::Accepted100, RejectReason::None};
}

TopologyStatus classify(const Topology& t, int max_degree) {
    return classify_detailed(t.adjacency, max_degree).status;
}

Generated generate(const GenParams& params) {
    check_feasible(params);
    TopologyRng rng(params.seed);
    std::uint64_t over = 0;
    std::uint64_t disconnected = 0;
    for (std::uint64_t attempt = 1; attempt <= params.max_attempts; ++attempt) {
        Topology t = sample_matrix(params, rng);
        auto verdict = classify_detailed(t.adjacency, params.max_degree);
        if (verdict.status == TopologyStatus::Accepted100) {
            t.status = TopologyStatus::Accepted100;
            return {std::move(t), attempt};
        }
        if (verdict.reason == RejectReason::OverConnected) {
            ++over;
        } else {
            ++disconnected;
        }
    }
    throw GenerationExhausted(over, disconnected);
}

std::string to_dot(const Topology& t, std::span<const std::string> names) {
    const auto& m = t.adjacency;
    validate_matrix(m);
    if (names.size() != m.size()) {
        throw Error(Errc::DimensionMismatch, "expected " + std::to_string(m.size()) +
                                                 " node names, got " +
                                                 std::to_string(names.size()));
    }
    std::string out = "graph topo_" + std::to_string(t.seq) + " {\n";
    for (auto [a, b] : m.edges()) {
        out += "  \"" + names[a] + "\" -- \"" + names[b] + "\";\n";
    }
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m.degree(i) == 0) out += "  \"" + names[i] + "\";\n";
    }
    out += "}\n";
    return out;
}

namespace {

// Reads a double-quoted name starting at s[pos]; advances pos past the closing quote.
std::optional<std::string_view> read_quoted(std::string_view s, std::size_t& pos) {
    if (pos >= s.size() || s[pos] != '"') return std::nullopt;
    auto close = s.find('"', pos + 1);
    if (close == std::string_view::npos) return std::nullopt;
    auto name = s.substr(pos + 1, close - pos - 1);
    pos = close + 1;
    return name;
}

}  // namespace

AdjacencyMatrix parse_dot(std::string_view dot, std::span<const std::string> names) {
    std::map<std::string, std::size_t, std::less<>> index;
    for (std::size_t i = 0; i < names.size(); ++i) index.emplace(names[i], i);
    auto lookup = [&](std::string_view name, std::size_t line) {
        auto it = index.find(name);
        if (it == index.end()) throw ParseError(line, "unknown node '" + std::string(name) + "'");
        return it->second;
    };

    AdjacencyMatrix m(names.size());
    auto lines = text::split_lines(dot);
    bool opened = false;
    bool closed = false;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        auto line = text::trim(lines[i]);
        if (line.empty()) continue;
        if (!opened) {
            if (!line.starts_with("graph ") || !line.ends_with("{")) {
                throw ParseError(line_no, "expected 'graph <id> {'");
            }
            opened = true;
            continue;
        }
        if (line == "}") {
            closed = true;
            continue;
        }
        if (closed) throw ParseError(line_no, "content after closing brace");
        if (!line.ends_with(";")) throw ParseError(line_no, "statement must end with ';'");
        line.remove_suffix(1);
        std::size_t pos = 0;
        auto first = read_quoted(line, pos);
        if (!first) throw ParseError(line_no, "expected quoted node name");
        auto a = lookup(*first, line_no);
        auto rest = text::trim(line.substr(pos));
        if (rest.empty()) continue;  // bare node statement
        if (!rest.starts_with("--")) throw ParseError(line_no, "expected '--'");
        rest = text::trim(rest.substr(2));
        pos = 0;
        auto second = read_quoted(rest, pos);
        if (!second || pos != rest.size()) throw ParseError(line_no, "malformed edge statement");
        auto b = lookup(*second, line_no);
        if (a == b) throw ParseError(line_no, "self loop");
        m.set_link(a, b, true);
    }
    if (!opened || !closed) throw ParseError(lines.size(), "unterminated graph");
    return m;
}

}  // namespace manetlab
