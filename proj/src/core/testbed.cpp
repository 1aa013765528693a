#include "manetlab/testbed.hpp"

#include "manetlab/error.hpp"

namespace manetlab {

Testbed::Testbed(Registry registry, std::unique_ptr<Backend> backend, TestbedOptions options)
    : options_(std::move(options)),
      registry_(std::move(registry)),
      medium_(registry_, options_.link_latency),
      backend_(backend ? std::move(backend)
                       : std::make_unique<SimulatedBackend>(options_.wireless_ifname)),
      player_(medium_, registry_),
      adversary_(medium_, registry_),
      traffic_(medium_, registry_),
      prober_(medium_, registry_) {
    registry_.subscribe([this](const RegistryEvent& e) { on_registry_event(e); });
    player_.on_apply([this](const Scenario& s, std::size_t seq) { on_applied(s, seq); });
}

Testbed::~Testbed() = default;

void Testbed::ensure_idle() const {
    if (exec_active_) {
        throw Error(Errc::Busy, "a remote command is executing; no other fixture is available");
    }
}

void Testbed::on_registry_event(const RegistryEvent& event) {
    switch (event.kind) {
    case RegistryEvent::Kind::Added:
    case RegistryEvent::Kind::Removed:
        for (auto& [name, s] : scenarios_) s.stale = true;
        break;
    case RegistryEvent::Kind::SoftLimitExceeded:
        medium_.record("WARNING", {{"reason", "soft-limit"},
                                   {"limit", std::to_string(Registry::kSoftLimit)},
                                   {"count", std::to_string(registry_.size())},
                                   {"node", event.node}});
        break;
    }
}

std::pair<std::size_t, std::vector<std::string>> Testbed::add_node(NodeRecord record) {
    ensure_idle();
    std::vector<std::string> warnings;
    auto index = registry_.add_node(std::move(record));
    if (registry_.size() > Registry::kSoftLimit) {
        warnings.push_back("soft limit " + std::to_string(Registry::kSoftLimit) + " exceeded");
    }
    return {index, warnings};
}

std::size_t Testbed::remove_node(std::string_view name) {
    ensure_idle();
    const std::string node(name);
    auto remaining = registry_.remove_node(node);
    adversary_.stop_targeting(node);
    traffic_.stop_touching(node);
    medium_.forget_node(node);
    return remaining;
}

const Scenario& Testbed::install(Scenario s) {
    if (const Scenario* p = player_.playing_scenario(); p && p->name == s.name) {
        throw Error(Errc::AlreadyPlaying, "scenario '" + s.name + "' is playing");
    }
    auto [it, inserted] = scenarios_.insert_or_assign(s.name, std::move(s));
    return it->second;
}

const Scenario& Testbed::build_scenario(const std::string& name, const GenParams& params,
                                        std::size_t count, std::uint32_t interval_s) {
    ensure_idle();
    return install(manetlab::build_scenario(name, params, count, registry_.size(), interval_s));
}

const Scenario& Testbed::load_scenario(std::string_view text) {
    ensure_idle();
    return install(manetlab::load_scenario(text));
}

std::string Testbed::save_scenario(std::string_view name) const {
    return manetlab::save_scenario(scenario(name));
}

const Scenario& Testbed::scenario(std::string_view name) const {
    auto it = scenarios_.find(name);
    if (it == scenarios_.end()) {
        throw Error(Errc::UnknownScenario, "no scenario named '" + std::string(name) + "'");
    }
    return it->second;
}

Scenario& Testbed::mutable_scenario(std::string_view name) {
    return const_cast<Scenario&>(std::as_const(*this).scenario(name));
}

std::vector<std::string> Testbed::scenario_names() const {
    std::vector<std::string> names;
    for (const auto& [name, s] : scenarios_) names.push_back(name);
    return names;
}

void Testbed::on_applied(const Scenario& s, std::size_t seq) {
    for (auto& [name, other] : scenarios_) {
        if (name != s.name) other.current.reset();
    }
    applied_ = AppliedTopology{s.name, s.topologies[seq]};
    std::set<std::string, std::less<>> in_use;
    for (std::size_t i = 0; i < s.topologies[seq].adjacency.size(); ++i) {
        in_use.insert(registry_.at(i).name);
    }
    registry_.set_in_use(std::move(in_use));
    std::vector<Ruleset> rulesets;
    rulesets.reserve(registry_.size());
    for (const auto& n : registry_.nodes()) {
        if (const auto* rs = medium_.active_ruleset(n.name)) rulesets.push_back(*rs);
    }
    backend_->push_rulesets(rulesets, registry_);
}

VirtualTime Testbed::apply_topology(std::string_view scenario_name, std::size_t seq, bool force) {
    ensure_idle();
    return player_.apply(mutable_scenario(scenario_name), seq, force);
}

std::vector<std::pair<VirtualTime, std::size_t>> Testbed::play(std::string_view scenario_name,
                                                               std::size_t from, std::size_t to) {
    ensure_idle();
    return player_.play(mutable_scenario(scenario_name), from, to);
}

std::size_t Testbed::stop_play() {
    ensure_idle();
    if (!player_.playing()) throw Error(Errc::OutOfRange, "no scenario is playing");
    return player_.cancel();
}

std::optional<std::string> Testbed::current_dot() const {
    if (!applied_) return std::nullopt;
    const auto& t = applied_->topology;
    if (t.adjacency.size() > registry_.size()) return std::nullopt;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < t.adjacency.size(); ++i) names.push_back(registry_.at(i).name);
    return to_dot(t, names);
}

std::uint64_t Testbed::launch_attack(const AttackSpec& spec) {
    ensure_idle();
    return adversary_.launch(spec);
}

VirtualTime Testbed::stop_attack(std::uint64_t attack_id) {
    ensure_idle();
    return adversary_.stop(attack_id);
}

std::vector<std::string> Testbed::inject(const InjectionSpec& spec) {
    ensure_idle();
    return adversary_.inject(spec);
}

void Testbed::save_attack(const AttackSpec& spec) {
    ensure_idle();
    adversary_.save_attack(spec);
}

std::uint64_t Testbed::replay_attack(std::string_view name) {
    ensure_idle();
    return adversary_.replay(name);
}

void Testbed::load_attack_list(std::string_view text) {
    ensure_idle();
    adversary_.load_attack_list(text);
}

std::uint64_t Testbed::start_flow(const FlowSpec& spec) {
    ensure_idle();
    return traffic_.start_flow(spec);
}

FlowStats Testbed::stop_flow(std::uint64_t flow_id) {
    ensure_idle();
    return traffic_.stop_flow(flow_id);
}

ProbeReport Testbed::ping(const std::string& src, const std::string& dst, std::uint32_t count,
                          std::uint32_t timeout_ms) {
    ensure_idle();
    return prober_.ping(src, dst, count, timeout_ms);
}

Testbed::ExecLease Testbed::begin_exec(std::string_view node) {
    const auto& record = registry_.get(node);
    ensure_idle();
    exec_active_ = true;
    medium_.record("EXEC_START", {{"node", record.name}});
    return ExecLease(this, record.name);
}

void Testbed::end_exec(const std::string& node, int exit_code) {
    medium_.record("EXEC_END", {{"node", node}, {"exit", std::to_string(exit_code)}});
    exec_active_ = false;
}

ExecResult Testbed::remote_exec(std::string_view node, std::string_view command) {
    auto lease = begin_exec(node);
    auto result = lease.run(command);
    if (result.exit_code != 0) throw CommandFailed(result.exit_code, result.output);
    return result;
}

std::size_t Testbed::advance_to(VirtualTime until) {
    ensure_idle();
    return medium_.advance(until);
}

Testbed::ExecLease::ExecLease(ExecLease&& other) noexcept
    : bed_(std::exchange(other.bed_, nullptr)),
      node_(std::move(other.node_)),
      last_exit_(other.last_exit_) {}

Testbed::ExecLease::~ExecLease() {
    if (bed_) bed_->end_exec(node_, last_exit_);
}

ExecResult Testbed::ExecLease::run(std::string_view command) {
    if (!bed_) throw Error(Errc::Busy, "exec lease already released");
    const auto& record = bed_->registry_.get(node_);
    try {
        auto result = bed_->backend_->exec(record, command, bed_->medium_);
        last_exit_ = result.exit_code;
        return result;
    } catch (...) {
        last_exit_ = -1;
        throw;
    }
}

}  // namespace manetlab
