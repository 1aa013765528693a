#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "manetlab/medium.hpp"
#include "manetlab/registry.hpp"
#include "manetlab/rules.hpp"

namespace manetlab {

struct ExecResult {
    int exit_code = 0;
    std::string output;
};

// Where compiled rulesets and operator commands end up. The medium always
// mirrors the emulation; a backend additionally reaches real nodes, or not.
class Backend {
public:
    virtual ~Backend() = default;

    virtual std::string_view name() const = 0;
    // Called right after the medium switched to `rulesets`.
    virtual void push_rulesets(const std::vector<Ruleset>& rulesets, const Registry& registry) = 0;
    virtual ExecResult exec(const NodeRecord& node, std::string_view command,
                            const Medium& medium) = 0;
};

// Hermetic backend. exec() understands a small command table:
//   echo <text>       prints text
//   ruleset-dump      prints the node's active ruleset as an iptables script
//   counters-dump     prints the node's per-protocol counters
//   sleep <ms>        holds the caller for ms of wall-clock time (<= 60000)
//   true / false      exit 0 / exit 1
// Anything else exits 127.
class SimulatedBackend final : public Backend {
public:
    explicit SimulatedBackend(std::string wireless_ifname = "ath0")
        : wireless_ifname_(std::move(wireless_ifname)) {}

    std::string_view name() const override { return "simulated"; }
    void push_rulesets(const std::vector<Ruleset>&, const Registry&) override {}
    ExecResult exec(const NodeRecord& node, std::string_view command,
                    const Medium& medium) override;

private:
    std::string wireless_ifname_;
};

std::string format_counters(const NodeCounters& counters);

}  // namespace manetlab
