#include "manetlab/control/remote_backend.hpp"

#include <httplib.h>

#include "manetlab/control/json_codec.hpp"

namespace manetlab::control {

namespace {

httplib::Client client_for(const NodeRecord& node, int port, std::chrono::milliseconds timeout) {
    httplib::Client cli(node.wired_ip.to_string(), port);
    cli.set_connection_timeout(timeout);
    cli.set_read_timeout(std::chrono::seconds(65));  // sleep-style commands
    cli.set_write_timeout(timeout);
    return cli;
}

std::string describe(const NodeRecord& node, int port) {
    return node.name + " (" + node.wired_ip.to_string() + ":" + std::to_string(port) + ")";
}

}  // namespace

RemoteBackend::RemoteBackend(int agent_port, std::string wireless_ifname,
                             std::chrono::milliseconds timeout)
    : agent_port_(agent_port), wireless_ifname_(std::move(wireless_ifname)), timeout_(timeout) {}

void RemoteBackend::push_rulesets(const std::vector<Ruleset>& rulesets, const Registry& registry) {
    for (const auto& rs : rulesets) {
        const auto& node = registry.get(rs.owner);
        auto cli = client_for(node, agent_port_, timeout_);
        httplib::Headers headers{{"X-Manetlab-Node", node.name}};
        auto res = cli.Post("/rules", headers, emit_script(rs, wireless_ifname_), "text/plain");
        if (!res) {
            throw Error(Errc::BackendError, "rule upload to " + describe(node, agent_port_) +
                                                " failed: " + httplib::to_string(res.error()));
        }
        bool acked = false;
        if (res->status == 200) {
            auto j = Json::parse(res->body, nullptr, false);
            acked = j.is_object() && j.contains("ok") && j["ok"] == true;
        }
        if (!acked) {
            throw Error(Errc::BackendError, "agent on " + describe(node, agent_port_) +
                                                " did not acknowledge the ruleset (HTTP " +
                                                std::to_string(res->status) + ")");
        }
    }
}

ExecResult RemoteBackend::exec(const NodeRecord& node, std::string_view command, const Medium&) {
    auto cli = client_for(node, agent_port_, timeout_);
    httplib::Headers headers{{"X-Manetlab-Node", node.name}};
    auto res = cli.Post("/exec", headers, dump(Json{{"command", command}}), "application/json");
    if (!res) {
        throw Error(Errc::BackendError,
                    "exec on " + describe(node, agent_port_) + " failed: " + httplib::to_string(res.error()));
    }
    auto j = Json::parse(res->body, nullptr, false);
    if (res->status != 200 || !j.is_object() || !j.contains("exit_code") || !j["exit_code"].is_number_integer() ||
        !j.contains("output") || !j["output"].is_string()) {
        throw Error(Errc::BackendError, "malformed exec reply from " + describe(node, agent_port_) + " (HTTP " +
                                            std::to_string(res->status) + ")");
    }
    return ExecResult{j["exit_code"].get<int>(), j["output"].get<std::string>()};
}

}  // namespace manetlab::control
