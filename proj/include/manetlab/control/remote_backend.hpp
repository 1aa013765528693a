#pragma once

#include <chrono>
#include <string>

#include "manetlab/backend.hpp"

namespace manetlab::control {

// Talks to an agent on each member node over the wired network.
//
// Wire contract (this project's own):
//   POST /rules   body: iptables script (text/plain)  ->  200 {"ok": true}
//   POST /exec    body: {"command": "..."}            ->  200 {"exit_code": N, "output": "..."}
// Every request carries X-Manetlab-Node: <name>. Anything else is a BackendError.
class RemoteBackend final : public Backend {
public:
    RemoteBackend(int agent_port, std::string wireless_ifname,
                  std::chrono::milliseconds timeout = std::chrono::seconds(5));

    std::string_view name() const override { return "remote"; }
    void push_rulesets(const std::vector<Ruleset>& rulesets, const Registry& registry) override;
    ExecResult exec(const NodeRecord& node, std::string_view command, const Medium& medium) override;

private:
    int agent_port_;
    std::string wireless_ifname_;
    std::chrono::milliseconds timeout_;
};

}  // namespace manetlab::control
