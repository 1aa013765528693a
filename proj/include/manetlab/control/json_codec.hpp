#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "json.hpp"
#include "manetlab/adversary.hpp"
#include "manetlab/backend.hpp"
#include "manetlab/error.hpp"
#include "manetlab/medium.hpp"
#include "manetlab/probe.hpp"
#include "manetlab/registry.hpp"
#include "manetlab/scenario.hpp"
#include "manetlab/traffic.hpp"

namespace manetlab::control {

// Key order in responses follows insertion order so output is stable.
using Json = nlohmann::ordered_json;

// A request body that must be a JSON object holding only the listed keys.
// Every accessor throws Error(MalformedRequest) on a missing key or a value
// of the wrong type.
class RequestBody {
public:
    RequestBody(std::string_view text, std::span<const std::string_view> allowed);
    RequestBody(std::string_view text, std::initializer_list<std::string_view> allowed)
        : RequestBody(text, std::span<const std::string_view>(allowed.begin(), allowed.size())) {}

    bool has(std::string_view key) const;
    std::string str(std::string_view key) const;
    std::optional<std::string> opt_str(std::string_view key) const;
    std::uint64_t uint(std::string_view key, std::uint64_t max = UINT64_MAX) const;
    std::optional<std::uint64_t> opt_uint(std::string_view key, std::uint64_t max = UINT64_MAX) const;
    bool flag(std::string_view key, bool fallback) const;

private:
    const nlohmann::json& at(std::string_view key) const;

    nlohmann::json doc_;
};

Json to_json(const NodeRecord& n);
Json to_json(const Scenario& s);
Json to_json(const AttackSpec& spec);
Json to_json(const ActiveAttack& a);
Json to_json(const FlowSpec& spec);
Json to_json(const FlowStats& stats);
Json to_json(const ProbeReport& report);
Json to_json(const ExecResult& result);
// One line of the /events stream.
Json event_json(std::size_t seq, const TraceEvent& e);
Json error_json(const Error& e);

NodeRecord node_from(const RequestBody& body);
AttackSpec attack_from(const RequestBody& body);
FlowSpec flow_from(const RequestBody& body);

// Keys accepted by node_from / attack_from / flow_from.
inline constexpr std::array<std::string_view, 5> kNodeKeys{
    "name", "wired_ip", "wired_mac", "wireless_ip", "wireless_mac"};
inline constexpr std::array<std::string_view, 7> kAttackKeys{
    "name", "target", "protocol", "kind", "loss_s", "normal_s", "cycles"};
inline constexpr std::array<std::string_view, 7> kFlowKeys{
    "src", "dst", "protocol", "port", "delay_ms", "payload_len", "count"};

// Newline-terminated compact JSON.
std::string dump(const Json& j);

}  // namespace manetlab::control
