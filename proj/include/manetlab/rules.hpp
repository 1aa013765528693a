#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "manetlab/net.hpp"
#include "manetlab/registry.hpp"
#include "manetlab/topology.hpp"

namespace manetlab {

// Wired control interface name used in every emitted script.
inline constexpr std::string_view kWiredInterface = "eth0";

struct FilterRule {
    enum class Action { AcceptSourceMac, DropAllWireless };

    Action action = Action::DropAllWireless;
    std::optional<MacAddress> mac;  // set iff action == AcceptSourceMac

    static FilterRule accept(MacAddress mac) { return {Action::AcceptSourceMac, mac}; }
    static FilterRule drop_all() { return {Action::DropAllWireless, std::nullopt}; }

    friend bool operator==(const FilterRule&, const FilterRule&) = default;
};

// Ingress filter for one node: accept each neighbour's wireless MAC, then drop
// every other wireless frame. An empty rule list means no filtering at all.
struct Ruleset {
    std::string owner;
    std::vector<FilterRule> rules;
    std::size_t topology_seq = 0;

    // First matching rule wins; falls through to accept.
    bool accepts(const MacAddress& source) const;

    friend bool operator==(const Ruleset&, const Ruleset&) = default;
};

// One ruleset per registry node, in index order. Throws DimensionMismatch when
// the topology does not cover exactly the registry, RejectedTopology when the
// topology is not Accepted100 and force is false.
std::vector<Ruleset> compile(const Topology& t, const Registry& reg, bool force = false);

std::string emit_script(const Ruleset& rs, std::string_view wireless_ifname);

struct ParsedScript {
    std::string wireless_ifname;
    std::vector<FilterRule> rules;
};

// Accepts exactly the emit_script() dialect; anything else is a ParseError.
ParsedScript parse_script(std::string_view script);

struct SymmetryViolation {
    std::string accepter;  // accepts frames from `peer`
    std::string peer;      // but does not accept frames from `accepter`

    friend bool operator==(const SymmetryViolation&, const SymmetryViolation&) = default;
};

// Every ordered pair (i, j) where i accepts j's wireless MAC but j does not
// accept i's, in (i, j) index order.
std::vector<SymmetryViolation> symmetric_check(std::span<const Ruleset> rulesets,
                                               const Registry& reg);

}  // namespace manetlab
