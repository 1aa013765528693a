#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "manetlab/adversary.hpp"
#include "manetlab/backend.hpp"
#include "manetlab/medium.hpp"
#include "manetlab/probe.hpp"
#include "manetlab/registry.hpp"
#include "manetlab/scenario.hpp"
#include "manetlab/traffic.hpp"

namespace manetlab {

struct TestbedOptions {
    VirtualTime link_latency = kDefaultLinkLatency;
    std::string wireless_ifname = "ath0";
};

// The whole emulation behind one object: registry, medium, scenarios,
// attacks, flows and probes. Not thread-safe; callers serialise access.
//
// While a remote command runs (see begin_exec) every mutating call throws
// Error(Busy) and the virtual clock stands still.
class Testbed {
public:
    class ExecLease;

    explicit Testbed(Registry registry = {}, std::unique_ptr<Backend> backend = nullptr,
                     TestbedOptions options = {});
    ~Testbed();

    Testbed(const Testbed&) = delete;
    Testbed& operator=(const Testbed&) = delete;

    const Registry& registry() const noexcept { return registry_; }
    Medium& medium() noexcept { return medium_; }
    const Medium& medium() const noexcept { return medium_; }
    const Backend& backend() const noexcept { return *backend_; }
    const TestbedOptions& options() const noexcept { return options_; }
    VirtualTime now() const noexcept { return medium_.now(); }
    bool exec_active() const noexcept { return exec_active_; }

    // Registry. Returns the index plus any warning raised by the add.
    std::pair<std::size_t, std::vector<std::string>> add_node(NodeRecord record);
    std::size_t remove_node(std::string_view name);

    // Scenarios. Building or loading replaces a scenario of the same name
    // unless that scenario is playing.
    const Scenario& build_scenario(const std::string& name, const GenParams& params,
                                   std::size_t count,
                                   std::uint32_t interval_s = kDefaultReplayIntervalSeconds);
    const Scenario& load_scenario(std::string_view text);
    std::string save_scenario(std::string_view name) const;
    const Scenario& scenario(std::string_view name) const;
    std::vector<std::string> scenario_names() const;

    VirtualTime apply_topology(std::string_view scenario, std::size_t seq, bool force = false);
    std::vector<std::pair<VirtualTime, std::size_t>> play(std::string_view scenario,
                                                          std::size_t from, std::size_t to);
    // Returns the number of cancelled steps. Throws OutOfRange when nothing plays.
    std::size_t stop_play();
    const Scenario* playing() const noexcept { return player_.playing_scenario(); }

    struct AppliedTopology {
        std::string scenario;
        Topology topology;
    };
    const std::optional<AppliedTopology>& applied() const noexcept { return applied_; }
    // DOT of the applied topology, if any.
    std::optional<std::string> current_dot() const;

    // Adversary.
    std::uint64_t launch_attack(const AttackSpec& spec);
    VirtualTime stop_attack(std::uint64_t attack_id);
    std::vector<std::string> inject(const InjectionSpec& spec);
    void save_attack(const AttackSpec& spec);
    std::vector<std::string> list_attacks() const { return adversary_.list_attacks(); }
    std::uint64_t replay_attack(std::string_view name);
    const Adversary& adversary() const noexcept { return adversary_; }
    void load_attack_list(std::string_view text);

    // Traffic.
    std::uint64_t start_flow(const FlowSpec& spec);
    FlowStats stop_flow(std::uint64_t flow_id);
    const TrafficGenerator& traffic() const noexcept { return traffic_; }

    // Probe.
    ProbeReport ping(const std::string& src, const std::string& dst, std::uint32_t count = 3,
                     std::uint32_t timeout_ms = 1000);
    // Takes the exclusivity token; EXEC_START is traced now, EXEC_END when the
    // lease dies. Throws UnknownNode, Busy.
    ExecLease begin_exec(std::string_view node);
    // begin_exec + run. Throws CommandFailed on a non-zero exit status.
    ExecResult remote_exec(std::string_view node, std::string_view command);

    // Clock.
    std::size_t advance_to(VirtualTime until);
    std::size_t tick(VirtualTime delta) { return advance_to(now() + delta); }

private:
    void ensure_idle() const;
    void on_registry_event(const RegistryEvent& event);
    void on_applied(const Scenario& s, std::size_t seq);
    void end_exec(const std::string& node, int exit_code);
    Scenario& mutable_scenario(std::string_view name);
    const Scenario& install(Scenario s);

    TestbedOptions options_;
    Registry registry_;
    Medium medium_;
    std::unique_ptr<Backend> backend_;
    std::map<std::string, Scenario, std::less<>> scenarios_;
    ScenarioPlayer player_;
    Adversary adversary_;
    TrafficGenerator traffic_;
    Prober prober_;
    std::optional<AppliedTopology> applied_;
    bool exec_active_ = false;
};

// Holds the testbed's exclusivity token for one node.
class Testbed::ExecLease {
public:
    ExecLease(ExecLease&& other) noexcept;
    ExecLease& operator=(ExecLease&&) = delete;
    ExecLease(const ExecLease&) = delete;
    ExecLease& operator=(const ExecLease&) = delete;
    ~ExecLease();

    const std::string& node() const noexcept { return node_; }
    // Runs one command through the backend; may be called repeatedly.
    ExecResult run(std::string_view command);

private:
    friend class Testbed;
    ExecLease(Testbed* bed, std::string node) : bed_(bed), node_(std::move(node)) {}

    Testbed* bed_;
    std::string node_;
    int last_exit_ = 0;
};

}  // namespace manetlab
