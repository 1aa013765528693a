#include "manetlab/scenario.hpp"

#include "manetlab/error.hpp"
#include "manetlab/rules.hpp"
#include "text.hpp"

namespace manetlab {

namespace {

GenParams params_for_seq(const GenParams& base, std::size_t seq) {
    GenParams p = base;
    p.seed = base.seed + static_cast<std::uint64_t>(seq);  // wraps modulo 2^64
    return p;
}

}  // namespace

Scenario build_scenario(std::string name, const GenParams& params, std::size_t count,
                        std::size_t registry_size, std::uint32_t interval_s) {
    if (!text::is_identifier(name)) {
        throw Error(Errc::InvalidSpec, "scenario name '" + name + "' must match [A-Za-z0-9_-]{1,32}");
    }
    if (count < 1) throw Error(Errc::InvalidSpec, "a scenario needs at least one topology");
    if (interval_s < 1) throw Error(Errc::InvalidSpec, "replay interval must be at least 1 s");
    check_feasible(params);
    if (params.n > registry_size) {
        throw Error(Errc::InvalidSpec, "scenario needs " + std::to_string(params.n) +
                                           " nodes but only " + std::to_string(registry_size) +
                                           " are registered");
    }
    Scenario s;
    s.name = std::move(name);
    s.params = params;
    s.interval_s = interval_s;
    s.topologies.reserve(count);
    for (std::size_t seq = 0; seq < count; ++seq) {
        try {
            Topology t = generate(params_for_seq(params, seq)).topology;
            t.seq = seq;
            s.topologies.push_back(std::move(t));
        } catch (const GenerationExhausted& e) {
            throw GenerationExhausted(e.over_connected(), e.disconnected(),
                                      "scenario '" + s.name + "' topology " + std::to_string(seq));
        }
    }
    return s;
}

Topology regenerate_topology(const Scenario& s, std::size_t seq) {
    Topology t = generate(params_for_seq(s.params, seq)).topology;
    t.seq = seq;
    return t;
}

std::string save_scenario(const Scenario& s) {
    const auto& p = s.params;
    std::string out = "scenario " + s.name + "\n";
    out += "nodes " + std::to_string(p.n) + " topologies " + std::to_string(s.size()) +
           " density " + std::to_string(p.density_pct) + " maxdeg " +
           std::to_string(p.max_degree) + " seed " + std::to_string(p.seed) + " interval " +
           std::to_string(s.interval_s) + "\n";
    for (std::size_t i = 0; i < s.topologies.size(); ++i) {
        const auto& t = s.topologies[i];
        if (i > 0) out += "\n";
        int status = static_cast<int>(t.status.value_or(TopologyStatus::Rejected99));
        out += "topology " + std::to_string(t.seq) + " status " + std::to_string(status);
        if (t.manual) out += " manual";
        out += "\n";
        const auto& m = t.adjacency;
        for (std::size_t r = 0; r < m.size(); ++r) {
            for (std::size_t c = 0; c < m.size(); ++c) {
                if (c > 0) out += ' ';
                out += static_cast<char>('0' + m(r, c));
            }
            out += '\n';
        }
    }
    return out;
}

Scenario load_scenario(std::string_view content) {
    auto lines = text::split_lines(content);
    std::size_t i = 0;
    auto next_nonblank = [&]() -> std::optional<std::size_t> {
        while (i < lines.size() && text::trim(lines[i]).empty()) ++i;
        if (i == lines.size()) return std::nullopt;
        return i++;
    };

    Scenario s;
    auto first = next_nonblank();
    if (!first) throw ParseError(1, "empty scenario file");
    auto head = text::split_ws(lines[*first]);
    if (head.size() != 2 || head[0] != "scenario" || !text::is_identifier(head[1])) {
        throw ParseError(*first + 1, "expected 'scenario <name>'");
    }
    s.name = std::string(head[1]);

    auto second = next_nonblank();
    if (!second) throw ParseError(lines.size() + 1, "missing parameter line");
    auto par = text::split_ws(lines[*second]);
    const std::size_t par_line = *second + 1;
    const char* keys[] = {"nodes", "topologies", "density", "maxdeg", "seed", "interval"};
    if (par.size() != 12) throw ParseError(par_line, "expected 6 key/value pairs");
    std::uint64_t values[6];
    for (std::size_t k = 0; k < 6; ++k) {
        if (par[2 * k] != keys[k]) {
            throw ParseError(par_line, "expected key '" + std::string(keys[k]) + "'");
        }
        auto v = text::parse_uint<std::uint64_t>(par[2 * k + 1]);
        if (!v) throw ParseError(par_line, "bad value for '" + std::string(keys[k]) + "'");
        values[k] = *v;
    }
    if (values[0] < 1) throw ParseError(par_line, "nodes must be at least 1");
    if (values[2] > 100) throw ParseError(par_line, "density must be within 0..100");
    if (values[3] > 1'000'000) throw ParseError(par_line, "maxdeg out of range");
    if (values[5] < 1 || values[5] > UINT32_MAX) throw ParseError(par_line, "bad interval");
    s.params.n = static_cast<std::size_t>(values[0]);
    const std::size_t declared = static_cast<std::size_t>(values[1]);
    s.params.density_pct = static_cast<int>(values[2]);
    s.params.max_degree = static_cast<int>(values[3]);
    s.params.seed = values[4];
    s.interval_s = static_cast<std::uint32_t>(values[5]);
    const std::size_t n = s.params.n;

    while (auto at = next_nonblank()) {
        const std::size_t line_no = *at + 1;
        auto tok = text::split_ws(lines[*at]);
        bool manual = tok.size() == 5 && tok[4] == "manual";
        if ((tok.size() != 4 && !manual) || tok[0] != "topology" || tok[2] != "status") {
            throw ParseError(line_no, "expected 'topology <seq> status <99|100> [manual]'");
        }
        auto seq = text::parse_uint<std::size_t>(tok[1]);
        if (!seq || *seq != s.topologies.size()) {
            throw ParseError(line_no, "topology numbers must run 0,1,2,... in order");
        }
        if (tok[3] != "99" && tok[3] != "100") throw ParseError(line_no, "status must be 99 or 100");

        Topology t{AdjacencyMatrix(n), std::nullopt, *seq, manual};
        for (std::size_t r = 0; r < n; ++r) {
            if (i >= lines.size()) throw ParseError(lines.size() + 1, "matrix ends early");
            const std::size_t row_line = i + 1;
            auto cells = text::split_ws(lines[i++]);
            if (cells.size() != n) {
                throw ParseError(row_line, "matrix row has " + std::to_string(cells.size()) +
                                               " entries, expected " + std::to_string(n));
            }
            for (std::size_t c = 0; c < n; ++c) {
                if (cells[c] != "0" && cells[c] != "1") {
                    throw ParseError(row_line, "matrix entries must be 0 or 1");
                }
                t.adjacency.set_cell(r, c, cells[c] == "1" ? 1 : 0);
            }
        }
        t.status = classify(t, s.params.max_degree);
        s.topologies.push_back(std::move(t));
    }
    if (s.topologies.size() != declared) {
        throw Error(Errc::DimensionMismatch, "header declares " + std::to_string(declared) +
                                                 " topologies, file holds " +
                                                 std::to_string(s.topologies.size()));
    }
    return s;
}

VirtualTime ScenarioPlayer::apply(Scenario& s, std::size_t seq, bool force) {
    if (seq >= s.size()) {
        throw Error(Errc::OutOfRange, "scenario '" + s.name + "' has topologies 0.." +
                                          std::to_string(s.size() - 1) + ", not " +
                                          std::to_string(seq));
    }
    if (s.stale) {
        throw Error(Errc::StaleScenario,
                    "scenario '" + s.name + "' predates a registry change; rebuild or reload it");
    }
    auto rulesets = compile(s.topologies[seq], registry_, force);
    auto at = medium_.apply_rulesets(std::move(rulesets),
                                     {{"scenario", s.name}, {"seq", std::to_string(seq)}});
    s.current = seq;
    if (on_apply_) on_apply_(s, seq);
    return at;
}

std::vector<std::pair<VirtualTime, std::size_t>> ScenarioPlayer::play(Scenario& s,
                                                                      std::size_t from,
                                                                      std::size_t to) {
    if (playing_) {
        throw Error(Errc::AlreadyPlaying, "scenario '" + playing_->name + "' is already playing");
    }
    if (from > to || to >= s.size()) {
        throw Error(Errc::OutOfRange, "play range " + std::to_string(from) + ".." +
                                          std::to_string(to) + " outside 0.." +
                                          std::to_string(s.size() - 1));
    }
    apply(s, from);

    std::vector<std::pair<VirtualTime, std::size_t>> schedule;
    const VirtualTime t0 = medium_.now();
    const VirtualTime interval = static_cast<VirtualTime>(s.interval_s) * kSecond;
    schedule.emplace_back(t0, from);
    if (from == to) return schedule;

    playing_ = &s;
    for (std::size_t seq = from + 1; seq <= to; ++seq) {
        VirtualTime at = t0 + static_cast<VirtualTime>(seq - from) * interval;
        schedule.emplace_back(at, seq);
        pending_.push_back(medium_.schedule(at, [this, seq, last = seq == to] { step(seq, last); }));
    }
    return schedule;
}

void ScenarioPlayer::step(std::size_t seq, bool last) {
    if (!pending_.empty()) pending_.erase(pending_.begin());
    Scenario* s = playing_;
    if (last) playing_ = nullptr;
    if (!s) return;
    try {
        apply(*s, seq);
    } catch (const Error& e) {
        medium_.record("WARNING", {{"scenario", s->name},
                                   {"seq", std::to_string(seq)},
                                   {"error", std::string(to_string(e.code()))}});
        cancel();
    }
}

std::size_t ScenarioPlayer::cancel() {
    std::size_t dropped = 0;
    for (auto id : pending_) dropped += medium_.cancel(id) ? 1 : 0;
    pending_.clear();
    playing_ = nullptr;
    return dropped;
}

}  // namespace manetlab
