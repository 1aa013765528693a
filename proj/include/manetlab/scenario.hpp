#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "manetlab/medium.hpp"
#include "manetlab/registry.hpp"
#include "manetlab/topology.hpp"

namespace manetlab {

inline constexpr std::uint32_t kDefaultReplayIntervalSeconds = 30;

// A named, seeded series of topologies. Topology `seq` is generated from
// params.seed + seq, so any single one can be regenerated on its own.
struct Scenario {
    std::string name;
    GenParams params;
    std::vector<Topology> topologies;
    std::uint32_t interval_s = kDefaultReplayIntervalSeconds;
    std::optional<std::size_t> current;
    bool stale = false;

    std::size_t size() const noexcept { return topologies.size(); }
};

// Throws Infeasible, InvalidSpec (bad name, count == 0 or n > registry_size),
// or GenerationExhausted naming the failing seq.
Scenario build_scenario(std::string name, const GenParams& params, std::size_t count,
                        std::size_t registry_size,
                        std::uint32_t interval_s = kDefaultReplayIntervalSeconds);

Topology regenerate_topology(const Scenario& s, std::size_t seq);

std::string save_scenario(const Scenario& s);
// Re-classifies every matrix; the stored status line is informational only.
Scenario load_scenario(std::string_view text);

// Drives scenario topologies onto a medium, by hand or on a fixed interval of
// virtual time. At most one playback runs at a time.
class ScenarioPlayer {
public:
    ScenarioPlayer(Medium& medium, const Registry& registry)
        : medium_(medium), registry_(registry) {}

    ScenarioPlayer(const ScenarioPlayer&) = delete;
    ScenarioPlayer& operator=(const ScenarioPlayer&) = delete;

    // Compiles topology `seq` and applies it. Throws OutOfRange, StaleScenario,
    // RejectedTopology (without force) and DimensionMismatch.
    VirtualTime apply(Scenario& s, std::size_t seq, bool force = false);

    // Applies `from` immediately and schedules the rest interval_s apart.
    // `s` must outlive the playback (or the playback must be cancelled).
    std::vector<std::pair<VirtualTime, std::size_t>> play(Scenario& s, std::size_t from,
                                                          std::size_t to);
    // Cancels pending steps; returns how many were dropped.
    std::size_t cancel();

    bool playing() const noexcept { return playing_ != nullptr; }
    const Scenario* playing_scenario() const noexcept { return playing_; }

    // Called after every successful apply, manual or scheduled.
    void on_apply(std::function<void(const Scenario&, std::size_t)> hook) {
        on_apply_ = std::move(hook);
    }

private:
    void step(std::size_t seq, bool last);

    Medium& medium_;
    const Registry& registry_;
    Scenario* playing_ = nullptr;
    std::vector<EventQueue::EventId> pending_;
    std::function<void(const Scenario&, std::size_t)> on_apply_;
};

}  // namespace manetlab
